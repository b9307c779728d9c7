"""Numba acceleration toggle.

The hot kernels (subset enumeration, jump-process simulation) are written
twice: a numba @njit version and a pure-numpy fallback.  Set
``GRAPHLAP_NO_NUMBA=1`` to force the fallback (useful for debugging and for
the benchmark comparing both paths).
"""

import os

_DISABLED = os.environ.get("GRAPHLAP_NO_NUMBA", "").lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("numba disabled by GRAPHLAP_NO_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        # decorator shim: @njit and @njit(...) both become identity
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap
