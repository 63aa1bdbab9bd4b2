"""Optional numba acceleration for the numeric kernels.

Hot inner loops (elliptic function evaluation, elastica sampling) are written
in njit-compatible style and compiled with numba unless the environment
variable ELASTICA_FIT_NO_NUMBA is set to a truthy value, in which case the
same functions run as plain Python/numpy.  ``benchmarks/bench_kernels.py``
compares the two paths.
"""

import os

_DISABLE = os.environ.get("ELASTICA_FIT_NO_NUMBA", "").lower() in ("1", "true", "yes")

if not _DISABLE:
    try:
        from numba import njit as _njit
        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


def maybe_njit(func=None, **kwargs):
    """@njit(cache=True) when numba is active, identity decorator otherwise."""
    def wrap(f):
        if NUMBA_ENABLED:
            kwargs.setdefault("cache", True)
            return _njit(**kwargs)(f)
        return f
    if func is None:
        return wrap
    return wrap(func)
