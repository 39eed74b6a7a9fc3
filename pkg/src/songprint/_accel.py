"""Optional numba acceleration.

Set ``SONGPRINT_PURE_NUMPY=1`` before import to force the numpy fallback
kernels even when numba is installed.
"""
import os

_FLAG = "SONGPRINT_PURE_NUMPY"

_disabled = os.environ.get(_FLAG, "").strip().lower() not in ("", "0", "false", "no")

HAVE_NUMBA = False
if not _disabled:
    try:
        from numba import njit as _njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - depends on environment
        _njit = None

USE_NUMBA = HAVE_NUMBA and not _disabled


def njit(fn):
    """Compile ``fn`` with numba when available; otherwise return it untouched."""
    if HAVE_NUMBA:
        return _njit(cache=True, nogil=True)(fn)
    return fn


def backend():
    return "numba" if USE_NUMBA else "numpy"
