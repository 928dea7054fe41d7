"""Orbit kernels with a compiled fast path and a pure-Python fallback.

The compiled module is used when it was built and every coordinate fits in
a signed 64-bit integer with headroom; otherwise the pure-Python version runs
on arbitrary-precision ints.  Both return identical values.
"""
from contextlib import contextmanager

from . import _pure as python_backend
from ._pure import BUDGET, RETURNED, SPLIT_DOMAIN, STRADDLE

try:
    from . import _compiled as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

INT64_SAFE = 1 << 62

_mode = "auto"


def available_backends():
    return ("python", "compiled") if compiled_backend is not None else ("python",)


def set_backend(mode):
    """Select ``"auto"``, ``"python"`` or ``"compiled"``."""
    global _mode
    if mode not in ("auto", "python", "compiled"):
        raise ValueError(f"unknown backend {mode!r}")
    if mode == "compiled" and compiled_backend is None:
        raise RuntimeError("compiled kernels are not built")
    _mode = mode


@contextmanager
def backend(mode):
    previous = _mode
    set_backend(mode)
    try:
        yield
    finally:
        set_backend(previous)


def _impl(hi, lo=0):
    if _mode == "python" or compiled_backend is None:
        return python_backend
    if lo >= 0 and hi < INT64_SAFE:
        return compiled_backend
    if _mode == "compiled":
        raise OverflowError("coordinates exceed the compiled kernel's int64 range")
    return python_backend


def active_backend(hi, lo=0):
    return "compiled" if _impl(hi, lo) is compiled_backend else "python"


def advance(left, shift, hi, c, length, a, b, budget):
    return _impl(hi, left[0]).advance(left, shift, hi, c, length, a, b, budget)


def segment_orbit(left, shift, hi, c, length, steps):
    return _impl(hi, left[0]).segment_orbit(left, shift, hi, c, length, steps)


def distance_records(left, shift, hi, x, horizon):
    return _impl(hi, left[0]).distance_records(left, shift, x, horizon)


__all__ = [
    "BUDGET", "RETURNED", "SPLIT_DOMAIN", "STRADDLE",
    "advance", "segment_orbit", "distance_records",
    "available_backends", "set_backend", "backend", "active_backend",
]
