"""Numba acceleration toggle.

Hot trajectory kernels are compiled with numba when available.  Set
CURVEDFLOW_NUMBA=0 to force the pure-numpy fallback path (also used
automatically when numba is not importable).  Both paths are exercised by
benchmarks/bench_kernels.py.
"""

import os

USE_NUMBA = os.environ.get("CURVEDFLOW_NUMBA", "1") != "0"

if USE_NUMBA:
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

if not USE_NUMBA:
    prange = range

    def njit(*args, **kwargs):
        """Identity decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap
