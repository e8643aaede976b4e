"""Tail series ``S(q, h, p) = sum_k f_{pk+h} / q**(pk)`` and related constants.

Closed forms come from the 2x2 linear system satisfied by S(q,0,p) and
S(q,1,p); every other offset follows from
``S(q,h,p) = f_{h-1} S(q,1,p) + f_{h-2} S(q,0,p)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentBaseError
from .numbers import FIB_MAX, fib, fib_float, require_convergent, scaled_term, scaled_terms

ATOL = 1e-12
RTOL = 1e-9


def isclose(a: float, b: float) -> bool:
    """Package-wide mixed tolerance comparison."""
    return abs(a - b) <= ATOL + RTOL * abs(b)


def delta(q: float, p: int) -> float:
    """Determinant of the stride-p system, ``q^2p - (f_{p-2}+f_p) q^p + (-1)^p``."""
    if p < 1:
        raise ValueError(f"stride p must be >= 1, got {p}")
    qp = q**p
    return qp * qp - (fib(p - 2) + fib(p)) * qp + (-1) ** p


def base_pair(q: float, p: int = 1) -> tuple[float, float]:
    """Return ``(S(q,0,p), S(q,1,p))`` from the determinant solution."""
    require_convergent(q)
    if p < 1:
        raise ValueError(f"stride p must be >= 1, got {p}")
    qp = q**p
    det = delta(q, p)
    if det == 0.0:
        raise ZeroDivisionError(f"singular stride system at q={q}, p={p}")
    s0 = qp * (qp - fib(p - 2)) / det
    s1 = qp * (qp - fib(p - 2) + fib(p - 1)) / det
    return s0, s1


def tail_sum(q: float, h: int = 0, p: int = 1) -> float:
    """Closed-form value of ``S(q, h, p)``."""
    if h < 0:
        raise ValueError(f"offset h must be >= 0, got {h}")
    if p == 1:
        require_convergent(q)
        num = q * q * _fib(h) + q * _fib(h - 1)
        return num / (q * q - q - 1.0)
    s0, s1 = base_pair(q, p)
    return _fib(h - 1) * s1 + _fib(h - 2) * s0


def _fib(n: int) -> float:
    return float(fib(n)) if n <= FIB_MAX else fib_float(n)


def tail_sum_partial(q: float, h: int = 0, p: int = 1, terms: int = 200) -> float:
    """Truncated sum of the first ``terms`` terms of ``S(q, h, p)``."""
    if not q > 1.0:
        raise DivergentBaseError(f"q must exceed 1, got {q}")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    t = scaled_terms(q, p * (terms - 1) + h)
    # f_{pk+h}/q^{pk} = t_{pk+h} * q^h
    return float(np.sum(t[h::p][:terms]) * q**h)


def scaled_tails(q: float, h: int, p: int, n_max: int) -> np.ndarray:
    """Return ``S(q, pn+h, p) / q**(pn)`` for ``n = 0..n_max``.

    This is the sup of what the digits from position n onward can still add,
    measured in the units of the original target.
    """
    s0, s1 = base_pair(q, p)
    m_top = p * n_max + h
    t = scaled_terms(q, max(m_top, 1))
    out = np.empty(n_max + 1)
    qh = q**h
    for n in range(n_max + 1):
        m = p * n + h
        a = t[m - 1] if m >= 1 else scaled_term(q, m - 1)
        b = t[m - 2] if m >= 2 else scaled_term(q, m - 2)
        out[n] = qh * (a / q * s1 + b / (q * q) * s0)
    return out


def tail_remainder(q: float, n: int) -> float:
    """Exact tail ``sum_{k>n} f_k/q^k``, i.e. ``S(q, n+1) / q**(n+1)``."""
    require_convergent(q)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    t = scaled_terms(q, n + 1)
    return float((q * q * t[n + 1] + t[n]) / (q * q - q - 1.0))


@dataclass(frozen=True)
class CriticalRatio:
    p: int
    value: float

    def __float__(self) -> float:
        return self.value


def q_crit(p: int) -> CriticalRatio:
    """Largest q with ``S(q, 0, p) = 2``; stride-p greedy expansions are complete up to it."""
    if not 1 <= p <= 40:
        raise ValueError(f"q_crit is defined here for 1 <= p <= 40, got {p}")
    b = fib(p - 2) + 2 * fib(p)
    disc = b * b + (8 if p % 2 else -8)
    y = 0.5 * (b + math.sqrt(disc))
    return CriticalRatio(p, y ** (1.0 / p))
