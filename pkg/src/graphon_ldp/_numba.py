"""Optional numba acceleration.

Hot scan kernels carry an ``@njit`` decorator when numba is importable and
the environment variable ``GRAPHON_LDP_NO_NUMBA`` is unset.  Setting
``GRAPHON_LDP_NO_NUMBA=1`` (or any non-empty value) selects the pure-numpy
fallback path; ``benchmarks/bench_exhaustive_ls.py`` compares the two.
"""

import os

NUMBA_ENABLED = False

if not os.environ.get("GRAPHON_LDP_NO_NUMBA"):
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
