"""Numba switch.

Kernels are decorated with :func:`njit` from this module. When numba is not
importable, or ``QXFORM_DISABLE_NUMBA`` is set to a truthy value, the
decorator is a no-op and the kernels run as plain Python/numpy.
"""

import os

_FLAG = "QXFORM_DISABLE_NUMBA"


def _disabled_by_env():
    return os.environ.get(_FLAG, "").strip().lower() not in ("", "0", "false", "no")


try:
    if _disabled_by_env():
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit(cache=False)`` when enabled, identity otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"
