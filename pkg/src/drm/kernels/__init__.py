"""Hot-kernel dispatch.

The env var ``DRM_BACKEND`` selects the implementation:

* unset or ``auto`` -- numba if importable, else pure numpy;
* ``numba``         -- require the jit backend, raise if unavailable;
* ``numpy``         -- force the pure-numpy reference path.

Both backends expose the same functions with identical semantics (parity
is tested to float64 round-off); a single process uses one backend for
its whole lifetime, so determinism guarantees hold per backend.
"""
from __future__ import annotations

import os

from . import numpy_backend

_choice = os.environ.get("DRM_BACKEND", "auto").lower()

if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"DRM_BACKEND must be auto, numba or numpy, got {_choice!r}")

if _choice == "numpy":
    _impl = numpy_backend
    BACKEND = "numpy"
else:
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        _impl = numpy_backend
        BACKEND = "numpy"

softmax_rows = _impl.softmax_rows
softmax_xent = _impl.softmax_xent
adamw_update = _impl.adamw_update
minmax_gamma = _impl.minmax_gamma
proxy_rows = _impl.proxy_rows

__all__ = [
    "BACKEND",
    "softmax_rows",
    "softmax_xent",
    "adamw_update",
    "minmax_gamma",
    "proxy_rows",
    "numpy_backend",
]
