"""Pure-numpy batch evaluator for the shared-tile paradigm.

Must stay bit-identical to the compiled kernel: per tile the total is
accumulated stem + layer_0 + ... + layer_{L-1} + head + io in that
order, and the argmin keeps the earliest tile on ties.
"""

from __future__ import annotations

import numpy as np


def gp_eval(ops: np.ndarray, res_idx: np.ndarray, layer_ms: np.ndarray,
            stem_ms: np.ndarray, head_ms: np.ndarray, io_ms: float):
    n, num_layers = ops.shape
    totals = stem_ms[:, res_idx]  # (ncfg, n)
    for l in range(num_layers):
        totals = totals + layer_ms[:, ops[:, l], res_idx]
    totals = totals + head_ms[:, res_idx]
    totals = totals + io_ms
    cfg = np.argmin(totals, axis=0)  # first occurrence wins ties
    return totals[cfg, np.arange(n)], cfg.astype(np.int32)
