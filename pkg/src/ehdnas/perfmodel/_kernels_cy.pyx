# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch evaluator for the shared-tile paradigm.

Arithmetic order matches _kernels_py exactly so both backends produce
bit-identical totals: stem + layers in order + head + io per tile, then
a first-wins strict minimum over tiles.
"""

import numpy as np


def gp_eval(int[:, ::1] ops, unsigned char[::1] res_idx, double[:, :, ::1] layer_ms,
            double[:, ::1] stem_ms, double[:, ::1] head_ms, double io_ms):
    cdef Py_ssize_t n = ops.shape[0]
    cdef Py_ssize_t num_layers = ops.shape[1]
    cdef Py_ssize_t ncfg = layer_ms.shape[0]
    totals_arr = np.empty(n, dtype=np.float64)
    cfg_arr = np.empty(n, dtype=np.int32)
    cdef double[::1] totals = totals_arr
    cdef int[::1] cfg = cfg_arr
    cdef Py_ssize_t i, c, l
    cdef unsigned char r
    cdef double t, best_t
    cdef Py_ssize_t best_c
    for i in range(n):
        r = res_idx[i]
        best_c = 0
        best_t = float("inf")
        for c in range(ncfg):
            t = stem_ms[c, r]
            for l in range(num_layers):
                t = t + layer_ms[c, ops[i, l], r]
            t = t + head_ms[c, r]
            t = t + io_ms
            if t < best_t:
                best_t = t
                best_c = c
        totals[i] = best_t
        cfg[i] = <int> best_c
    return totals_arr, cfg_arr
