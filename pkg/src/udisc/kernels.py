"""Backend selection for the hot polynomial kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used.  Set ``UDISC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("UDISC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

block_poly = _impl.block_poly
weighted_blocks = _impl.weighted_blocks

__all__ = ["BACKEND", "block_poly", "weighted_blocks"]
