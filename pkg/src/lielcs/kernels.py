"""Backend selection for the RK4 chart kernels.

The compiled extension is used when it imports; set ``LIELCS_PURE=1`` to
force the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"

if os.environ.get("LIELCS_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

rk4_exp_coords = _impl.rk4_exp_coords
rk4_semidirect = _impl.rk4_semidirect

__all__ = ["BACKEND", "rk4_exp_coords", "rk4_semidirect"]
