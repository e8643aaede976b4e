"""Fibonacci numbers with the f_0 = f_1 = 1 convention.

The sequence is extended backwards by the recurrence, giving f_{-1} = 0 and
f_{-2} = 1. Exact values are available up to index 92 (the largest that fits
in an unsigned 64-bit integer); anything deeper goes through
:func:`scaled_terms`, which never forms f_k itself.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DivergentBaseError, FibIndexError

PHI = (1.0 + math.sqrt(5.0)) / 2.0

FIB_MIN = -2
FIB_MAX = 92


@lru_cache(maxsize=None)
def _table() -> tuple[int, ...]:
    values = [1, 0]  # f_{-2}, f_{-1}
    for _ in range(FIB_MIN + 2, FIB_MAX + 1):
        values.append(values[-1] + values[-2])
    return tuple(values)


def fib(n: int) -> int:
    """Return f_n exactly for -2 <= n <= 92."""
    n = int(n)
    if n < FIB_MIN or n > FIB_MAX:
        raise FibIndexError(f"Fibonacci index {n} outside [{FIB_MIN}, {FIB_MAX}]")
    return _table()[n - FIB_MIN]


def fib_float(n: int) -> float:
    # beyond the exact range the double is still meaningful up to ~1474
    if n <= FIB_MAX:
        return float(fib(n))
    a, b = float(fib(FIB_MAX - 1)), float(fib(FIB_MAX))
    for _ in range(n - FIB_MAX):
        a, b = b, a + b
    return b


def scaled_terms(q: float, n_max: int) -> np.ndarray:
    """Return ``t_k = f_k / q**k`` for ``k = 0..n_max``.

    Uses ``t_{k+1} = t_k/q + t_{k-1}/q**2`` so that deep indices stay finite.
    """
    if not q > 1.0:
        raise DivergentBaseError(f"scaled terms need q > 1, got q={q}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    t = np.empty(n_max + 1)
    t[0] = 1.0
    if n_max >= 1:
        t[1] = 1.0 / q
    inv, inv2 = 1.0 / q, 1.0 / (q * q)
    for k in range(1, n_max):
        t[k + 1] = t[k] * inv + t[k - 1] * inv2
    return t


def scaled_term(q: float, k: int) -> float:
    """Single ``f_k / q**k``, including the negative indices -1 and -2."""
    if k < 0:
        return fib(k) * q ** (-k)
    return float(scaled_terms(q, k)[k])


def require_convergent(q: float) -> None:
    if not q > PHI:
        raise DivergentBaseError(
            f"q={q} must exceed the golden ratio {PHI:.10f} for the series to converge"
        )
