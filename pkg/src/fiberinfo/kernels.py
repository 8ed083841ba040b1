"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``FIBERINFO_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("FIBERINFO_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

k0 = _impl.k0
ensemble_row_sums = _impl.ensemble_row_sums

__all__ = ["BACKEND", "k0", "ensemble_row_sums"]
