"""Numba switch.

Set ``OSNCENSUS_DISABLE_JIT=1`` to run every kernel on the pure-numpy
path. The flag is read once at import time.
"""
import logging
import os

_FLAG = "OSNCENSUS_DISABLE_JIT"

try:
    import numba

    logging.getLogger("numba").setLevel(logging.WARNING)
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def jit_disabled():
    return os.environ.get(_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


USE_JIT = HAVE_NUMBA and not jit_disabled()


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged.

    The returned object always exposes ``py_func`` so callers can reach the
    interpreted version regardless of the backend.
    """
    if not HAVE_NUMBA:
        func.py_func = func
        return func
    return numba.njit(cache=True)(func)


def backend_name():
    return "numba" if USE_JIT else "numpy"
