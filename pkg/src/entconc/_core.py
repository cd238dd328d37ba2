"""Backend selection for the hot kernels.

The compiled extension is preferred; set ``ENTCONC_PURE_PYTHON=1`` to force
the NumPy fallback (used by the benchmark and the backend-parity tests).
"""
import os

from . import _kernels_py

if os.environ.get("ENTCONC_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "compiled"

log2_dim_v_rows = _impl.log2_dim_v_rows
grid_min_simplex = _impl.grid_min_simplex
