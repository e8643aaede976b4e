"""Planar snake manipulator: forward kinematics and workspace enumeration.

Link n has length ``u_n f_n / q**n`` and turns the running heading by
``-v_n * omega``. The base sits at the origin and the heading of link 0
already includes ``v_0`` (the running sum starts at j = 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetError
from .expansion import ControlWord, as_word, evaluate, greedy_real, subset_sums
from .numbers import require_convergent, scaled_terms
from .series import tail_remainder

MAX_LINKS_INDEX = 12
DEDUP_GRID = 1e-10


@dataclass(frozen=True)
class ManipulatorParams:
    """Scaling ratio q and rotation angle ``omega = 2*pi*d/p``.

    ``p = 1`` (with ``d = 1``) is allowed and stands for a full turn, i.e. no
    rotation at all; it makes the real base representable.
    """

    q: float
    d: int = 1
    p: int = 1

    def __post_init__(self) -> None:
        require_convergent(self.q)
        if self.p < 1 or not 1 <= self.d <= self.p:
            raise ValueError(f"need 1 <= d <= p, got d={self.d}, p={self.p}")
        if math.gcd(self.d, self.p) != 1:
            raise ValueError(f"d={self.d} and p={self.p} must be coprime")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.d / self.p

    @property
    def z(self) -> complex:
        """Complex base ``q e^{i omega}``; ``f_k / z**k`` is link k under full rotation."""
        if self.p == 1:
            return complex(self.q, 0.0)
        return self.q * complex(math.cos(self.omega), math.sin(self.omega))

    def heading(self, turns: np.ndarray | int) -> np.ndarray:
        """``exp(-i * omega * turns)`` via the p exact unit vectors."""
        return self.unit_vectors[np.mod(turns, self.p)]

    @property
    def unit_vectors(self) -> np.ndarray:
        j = np.arange(self.p)
        ang = -2.0 * np.pi * ((j * self.d) % self.p) / self.p
        vec = np.cos(ang) + 1j * np.sin(ang)
        # snap the axis-aligned ones so quarter turns are exact
        vec.real[np.abs(vec.real) < 1e-15] = 0.0
        vec.imag[np.abs(vec.imag) < 1e-15] = 0.0
        return vec


@dataclass(frozen=True)
class Configuration:
    u: ControlWord
    v: ControlWord

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", as_word(self.u))
        object.__setattr__(self, "v", as_word(self.v))
        if len(self.u) != len(self.v):
            raise ValueError(f"u and v must have equal length, got {len(self.u)} and {len(self.v)}")

    def __len__(self) -> int:
        return len(self.u)


@dataclass(frozen=True)
class JointTrace:
    points: np.ndarray  # complex positions x_0..x_N
    base: complex = field(default=0j)

    @property
    def end(self) -> complex:
        return complex(self.points[-1]) if len(self.points) else self.base

    def links(self) -> np.ndarray:
        """Link vectors ``x_n - x_{n-1}`` with ``x_{-1}`` the base."""
        return np.diff(np.concatenate([[self.base], self.points]))


def cumulative_angles(v: Sequence[int], omega: float) -> np.ndarray:
    """Unreduced headings ``omega * sum_{j<=k} v_j``."""
    return omega * np.cumsum(np.asarray(as_word(v), dtype=float))


def joint_positions(config: Configuration, params: ManipulatorParams) -> JointTrace:
    n = len(config)
    if n == 0:
        return JointTrace(np.zeros(0, dtype=complex))
    t = scaled_terms(params.q, n - 1)
    turns = np.cumsum(np.asarray(config.v, dtype=np.int64))
    steps = np.asarray(config.u, dtype=float) * t * params.heading(turns)
    return JointTrace(np.cumsum(steps))


def total_length(u: Sequence[int], q: float) -> float:
    return evaluate(u, q, 1, 0)


def match_length(target: float, q: float, depth: int = 64) -> ControlWord:
    """Length controls whose total length is within the depth tail of ``target``."""
    return greedy_real(target, q, depth).word


def _dedup_keys(pos: np.ndarray) -> np.ndarray:
    return np.stack(
        [np.round(pos.real / DEDUP_GRID), np.round(pos.imag / DEDUP_GRID)], axis=1
    ).astype(np.int64)


def workspace(n_index: int, params: ManipulatorParams) -> np.ndarray:
    """End-effector positions of the links 0..N over all binary (u, v).

    Returned as an ``(m, 2)`` array, deduplicated on a 1e-10 grid and sorted
    lexicographically. States are merged after every link on (position,
    heading), which keeps the enumeration far below 4^(N+1).
    """
    if not 0 <= n_index <= MAX_LINKS_INDEX:
        raise BudgetError(f"workspace index N={n_index} outside [0, {MAX_LINKS_INDEX}]")
    t = scaled_terms(params.q, n_index)
    pos = np.zeros(1, dtype=complex)
    turns = np.zeros(1, dtype=np.int64)
    for k in range(n_index + 1):
        cand_pos, cand_turns = [], []
        for v in (0, 1):
            nt = (turns + v) % params.p
            step = t[k] * params.heading(nt)
            cand_pos += [pos, pos + step]
            cand_turns += [nt, nt]
        pos = np.concatenate(cand_pos)
        turns = np.concatenate(cand_turns)
        keys = np.concatenate([_dedup_keys(pos), turns[:, None]], axis=1)
        _, idx = np.unique(keys, axis=0, return_index=True)
        pos, turns = pos[idx], turns[idx]
    _, idx = np.unique(_dedup_keys(pos), axis=0, return_index=True)
    pts = np.stack([pos[idx].real, pos[idx].imag], axis=1) + 0.0
    return pts[np.lexsort((pts[:, 1], pts[:, 0]))]


def workspace_error_bound(n_index: int, q: float) -> float:
    """Bound on the Hausdorff distance between W_N and the infinite-link workspace."""
    return tail_remainder(q, n_index)


def full_rotation_values(n_links: int, params: ManipulatorParams) -> np.ndarray:
    """End points for every u of length ``n_links`` with all rotations on."""
    t = scaled_terms(params.q, max(n_links - 1, 0))[:n_links]
    steps = t * params.heading(np.arange(1, n_links + 1))
    return subset_sums(steps)

