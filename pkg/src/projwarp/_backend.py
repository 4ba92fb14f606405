"""Backend selection.

Hot loops are written once as plain Python and compiled with numba when it
is available. Set ``PROJWARP_BACKEND=numpy`` to skip compilation entirely;
warps then run through the vectorized numpy path in :mod:`projwarp._vector`.
"""

import os
import warnings

BACKENDS = ("numba", "numpy")

_requested = os.environ.get("PROJWARP_BACKEND", "numba").strip().lower()
if _requested not in BACKENDS:
    warnings.warn(f"unknown PROJWARP_BACKEND={_requested!r}, using numba")
    _requested = "numba"

try:
    if _requested != "numba":
        raise ImportError
    import numba
    from numba import njit, prange

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip probing an incompatible system TBB
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "tbb", "workqueue"]
    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func


DEFAULT_BACKEND = "numba" if HAS_NUMBA else "numpy"


def jit(func):
    return njit(cache=True, nogil=True)(func)


def parallel_jit(func):
    return njit(cache=True, nogil=True, parallel=True)(func)


def resolve(backend=None):
    """Return the backend to use for a call, validating explicit requests."""
    if backend is None:
        return DEFAULT_BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is disabled or missing")
    return backend


def set_threads(workers):
    """Set the numba worker count, clamped to what the runtime allows.

    Returns the previous count so callers can restore it.
    """
    if not HAS_NUMBA:
        return 1
    prev = numba.get_num_threads()
    numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))
    return prev
