"""JIT switch for the hot kernels.

Kernels are written once as plain loop code over numpy arrays. When numba is
importable and ``EPNRECOVERY_JIT`` is not set to ``0``, they are compiled with
``numba.njit``; otherwise the same source runs under CPython. Both paths
produce bit-identical results (no fastmath).
"""
from __future__ import annotations

import os

_FLAG = os.environ.get("EPNRECOVERY_JIT", "1").strip().lower()
_WANT_JIT = _FLAG not in ("0", "false", "no", "off")

try:
    if not _WANT_JIT:
        raise ImportError("disabled by EPNRECOVERY_JIT")
    from numba import njit as _njit

    JIT_ENABLED = True
except ImportError:
    JIT_ENABLED = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if JIT_ENABLED:
        kwargs.setdefault("cache", True)
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap
