"""Kernel backend selection: compiled extension when built, numpy otherwise.

EHDNAS_KERNEL=python|cython forces a backend (cython errors out if the
extension was not built).  Both backends are bit-identical by contract.
"""

from __future__ import annotations

import os

_forced = os.environ.get("EHDNAS_KERNEL", "").strip().lower()

if _forced == "python":
    from . import _kernels_py as _impl
    BACKEND = "python"
elif _forced == "cython":
    from . import _kernels_cy as _impl  # noqa: F401  (ImportError is the contract)
    BACKEND = "cython"
else:
    try:
        from . import _kernels_cy as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

gp_eval = _impl.gp_eval
