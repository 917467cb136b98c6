"""Hot-loop kernels: compiled when the extension is built, numpy otherwise.

Set ``CPFINETTI_PURE=1`` to force the fallback.  ``BACKEND`` names the
implementation in use.
"""
import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("CPFINETTI_PURE"):
        raise ImportError("pure backend requested")
    from . import _kernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"


def coherent_rows(alphas, m, w_max):
    alphas = np.ascontiguousarray(alphas, dtype=complex).reshape(-1)
    return _impl.coherent_rows(alphas, float(m), int(w_max))
