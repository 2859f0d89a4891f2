"""Optional numba acceleration.

Set ``OIALAB_DISABLE_NUMBA=1`` before import to force the pure-numpy code
paths. When numba is not installed the numpy paths are used as well.
"""

import os

_DISABLED = os.environ.get("OIALAB_DISABLE_NUMBA", "").strip().lower() in {
    "1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba
    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise ``None``.

    Kernels decorated with this must have a numpy twin; dispatch happens in
    :mod:`oialab.kernels`.
    """
    if not HAS_NUMBA:
        def decorate(func):
            return None
        if args and callable(args[0]):
            return None
        return decorate
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend():
    return "numba" if HAS_NUMBA else "numpy"
