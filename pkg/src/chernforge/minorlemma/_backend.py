"""Select the compiled mod-p kernels when available, else the pure-Python ones.

Set CHERNFORGE_PURE_PYTHON=1 to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("CHERNFORGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _fpkernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

eval_multilinear_derivs = _impl.eval_multilinear_derivs
rank_mod_p = _impl.rank_mod_p
det_mod_p = _impl.det_mod_p

__all__ = ["BACKEND", "det_mod_p", "eval_multilinear_derivs", "rank_mod_p"]
