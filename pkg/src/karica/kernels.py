"""Kernel dispatch: the compiled extension when importable, numpy otherwise.

Set ``KARICA_PURE=1`` to force the numpy versions.
"""

import os

from . import _fallback

try:
    if os.environ.get("KARICA_PURE"):
        raise ImportError("pure mode requested")
    from . import _kernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"

step_batch = _impl.step_batch
path_lengths = _impl.path_lengths
