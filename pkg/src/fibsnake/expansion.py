"""Greedy binary expansions with Fibonacci weights.

A target x in [0, S(q,h,p)] is written as ``sum_n u_n f_{pn+h} / q**(pn)``.
The textbook recursion keeps remainders ``r_{n+1} = q^p (r_n - u_n f_{pn+h})``,
which multiplies rounding error by ``q^p`` at every step. Internally we track
the scaled remainder ``r_n / q**(pn)`` instead, so that digits stay meaningful
all the way down to double precision; the unscaled remainders are exposed as a
derived property.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericalInstabilityError, OutOfRangeError, RegimeWarning
from .numbers import fib, require_convergent, scaled_terms
from .series import q_crit, scaled_tails, tail_sum

ControlWord = tuple[int, ...]

DEFAULT_DEPTH = 64
CLAMP_RTOL = 1e-9
TARGET_RTOL = 1e-12
REGIME_RTOL = 1e-12
EXACT_FIB_INDEX = 76  # f_76 < 2**53


def as_word(digits: Iterable[int]) -> ControlWord:
    word = tuple(int(d) for d in digits)
    if any(d not in (0, 1) for d in word):
        raise ValueError(f"control word digits must be 0 or 1, got {word}")
    return word


def word_str(word: Sequence[int]) -> str:
    return "".join(str(int(d)) for d in word)


def stride_weights(q: float, p: int, h: int, n: int) -> np.ndarray:
    """``f_{pk+h} / q**(pk)`` for ``k = 0..n-1``."""
    return _weights(float(q), p, h, n).copy()


@lru_cache(maxsize=128)
def _weights(q: float, p: int, h: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0)
    t = scaled_terms(q, p * (n - 1) + h)
    w = t[h::p][:n] * q**h
    # while f_m is exact in a double, divide directly so that x = f_m ties resolve exactly
    for k in range(n):
        m = p * k + h
        if m > EXACT_FIB_INDEX:
            break
        w[k] = fib(m) / q ** (p * k)
    w.flags.writeable = False
    return w


@lru_cache(maxsize=128)
def _bounds(q: float, p: int, h: int, depth: int) -> np.ndarray:
    b = scaled_tails(q, h, p, depth)
    b.flags.writeable = False
    return b


def evaluate(word: Sequence[int], q: float, p: int = 1, h: int = 0) -> float:
    """Value of ``sum_k word_k f_{pk+h} / q**(pk)``."""
    require_convergent(q)
    digits = np.asarray(as_word(word), dtype=float)
    if digits.size == 0:
        return 0.0
    return float(digits @ _weights(float(q), p, h, digits.size))


def subset_sums(weights: np.ndarray) -> np.ndarray:
    """All ``sum_k w_k u_k`` over binary u, indexed with u_0 as the top bit."""
    weights = np.asarray(weights)
    vals = np.zeros(1, dtype=weights.dtype if weights.size else float)
    for w in weights:
        vals = np.stack([vals, vals + w], axis=1).reshape(-1)
    return vals


def shift(word: Sequence[int]) -> ControlWord:
    """Drop the leading digit."""
    word = as_word(word)
    if not word:
        raise ValueError("cannot shift an empty control word")
    return word[1:]


def in_regime(q: float, p: int = 1) -> bool:
    """True when greedy stride-p expansions are guaranteed to fill [0, S(q,h,p)]."""
    return q <= q_crit(p).value * (1.0 + REGIME_RTOL)


@dataclass(frozen=True)
class ExpansionResult:
    word: ControlWord
    scaled_remainders: np.ndarray  # r_n / q^(pn), n = 0..depth
    scaled_bounds: np.ndarray  # S(q, pn+h, p) / q^(pn), n = 0..depth
    value: float
    residual: float
    q: float
    p: int = 1
    h: int = 0

    @property
    def depth(self) -> int:
        return len(self.word)

    @property
    def remainders(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.scaled_remainders * self._growth()

    @property
    def bounds(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.scaled_bounds * self._growth()

    @property
    def tail_bound(self) -> float:
        """Largest possible |residual| for an in-regime expansion of this depth."""
        return float(self.scaled_bounds[-1])

    def _growth(self) -> np.ndarray:
        return float(self.q) ** (self.p * np.arange(self.depth + 1, dtype=float))


def _check_targets(x: np.ndarray, upper: float) -> np.ndarray:
    if np.any(~np.isfinite(x)) or np.any(x < 0.0) or np.any(x > upper * (1.0 + TARGET_RTOL)):
        bad = x[(x < 0.0) | (x > upper * (1.0 + TARGET_RTOL)) | ~np.isfinite(x)]
        raise OutOfRangeError(f"target {bad[0]!r} outside [0, {upper!r}]")
    return np.minimum(x, upper)


def greedy_batch(
    targets: Iterable[float] | np.ndarray,
    q: float,
    p: int = 1,
    h: int = 0,
    depth: int = DEFAULT_DEPTH,
    warn: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run the greedy rule on many targets at once.

    Returns ``(digits, scaled_remainders, scaled_bounds)`` with shapes
    ``(m, depth)``, ``(m, depth + 1)`` and ``(depth + 1,)``.
    """
    require_convergent(q)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    regime = in_regime(q, p)
    if not regime and warn:
        warnings.warn(
            f"q={q} exceeds q({p})={q_crit(p).value:.10g}; greedy expansions are not complete",
            RegimeWarning,
            stacklevel=2,
        )
    bounds = _bounds(float(q), p, h, depth)
    weights = _weights(float(q), p, h, depth)
    x = _check_targets(np.atleast_1d(np.asarray(targets, dtype=float)), bounds[0])

    m = x.size
    digits = np.zeros((m, depth), dtype=np.int8)
    rem = np.empty((m, depth + 1))
    rho = x.copy()
    rem[:, 0] = rho
    for n in range(depth):
        take = (rho >= weights[n]) & (rho <= bounds[n])
        digits[:, n] = take
        rho = np.where(take, rho - weights[n], rho)
        if regime:
            excess = rho - bounds[n + 1]
            if np.any(excess > 0.0):
                if np.any(excess > CLAMP_RTOL * bounds[n + 1]):
                    raise NumericalInstabilityError(
                        f"remainder left its admissible interval at n={n + 1} "
                        f"(excess {excess.max():.3e} over bound {bounds[n + 1]:.3e})"
                    )
                rho = np.minimum(rho, bounds[n + 1])
        rem[:, n + 1] = rho
    return digits, rem, bounds.copy()


def _expand(x: float, q: float, p: int, h: int, depth: int) -> ExpansionResult:
    # same rule as greedy_batch, on plain floats: one target does not pay numpy's per-call cost
    require_convergent(q)
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    regime = in_regime(q, p)
    bounds = _bounds(float(q), p, h, depth)
    weights = _weights(float(q), p, h, depth)
    rho = float(_check_targets(np.atleast_1d(float(x)), bounds[0])[0])
    b, w = bounds.tolist(), weights.tolist()
    word, rem = [], [rho]
    for n in range(depth):
        take = w[n] <= rho <= b[n]
        word.append(int(take))
        if take:
            rho -= w[n]
        if regime and rho > b[n + 1]:
            if rho - b[n + 1] > CLAMP_RTOL * b[n + 1]:
                raise NumericalInstabilityError(
                    f"remainder left its admissible interval at n={n + 1} "
                    f"(excess {rho - b[n + 1]:.3e} over bound {b[n + 1]:.3e})"
                )
            rho = b[n + 1]
        rem.append(rho)
    word = tuple(word)
    value = float(np.asarray(word, dtype=float) @ weights)
    target = min(float(x), float(bounds[0]))
    return ExpansionResult(
        word=word,
        scaled_remainders=np.array(rem),
        scaled_bounds=bounds.copy(),
        value=value,
        residual=target - value,
        q=q,
        p=p,
        h=h,
    )


def greedy_real(x: float, q: float, depth: int = DEFAULT_DEPTH) -> ExpansionResult:
    """Greedy expansion ``x = sum_k u_k f_k / q**k``.

    Complete for ``q`` in ``(phi, 1 + sqrt(3)]``; above that a
    :class:`RegimeWarning` is issued and the residual may stay large.
    """
    if not in_regime(q, 1):
        warnings.warn(
            f"q={q} exceeds 1+sqrt(3); some targets in [0, S(q)] are unreachable",
            RegimeWarning,
            stacklevel=2,
        )
    return _expand(x, q, 1, 0, depth)


def greedy_strided(
    x: float, q: float, p: int, h: int = 0, depth: int = DEFAULT_DEPTH
) -> ExpansionResult:
    """Greedy expansion ``x = sum_n u_n f_{pn+h} / q**(pn)`` on one stride."""
    if p < 1 or h < 0:
        raise ValueError(f"need p >= 1 and h >= 0, got p={p}, h={h}")
    if not in_regime(q, p):
        warnings.warn(
            f"q={q} exceeds q({p})={q_crit(p).value:.10g}; stride expansions are not complete",
            RegimeWarning,
            stacklevel=2,
        )
    return _expand(x, q, p, h, depth)


def gap_interval(q: float, p: int = 1, h: int = 0) -> tuple[float, float] | None:
    """Open interval of targets below ``f_h`` that no stride-(p, h) word reaches.

    A target under ``f_h`` forces the leading digit to 0, after which at most
    ``S(q, p+h, p) / q**p`` is attainable. Returns None when that already covers
    everything up to ``f_h``.
    """
    require_convergent(q)
    lo = tail_sum(q, p + h, p) / q**p
    hi = float(fib(h))
    if lo < hi:
        return lo, hi
    return None
