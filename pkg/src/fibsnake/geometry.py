"""Planar geometry: convex hulls, zonogons, containment and Hausdorff distance."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._threads import worker_count
from .errors import RegimeError
from .manipulator import ManipulatorParams
from .series import q_crit, tail_sum

REGIME_RTOL = 1e-12


@dataclass(frozen=True)
class Polygon2:
    """Convex polygon, counterclockwise, with no three consecutive collinear vertices.

    ``degenerate`` marks hulls that collapsed to a segment (2 vertices) or a
    point (1 vertex).
    """

    vertices: np.ndarray
    degenerate: bool = False

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def area(self) -> float:
        if self.degenerate:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True)
class Segment2:
    direction: tuple[float, float]
    length: float

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ValueError(f"segment length must be >= 0, got {self.length}")
        if abs(math.hypot(*self.direction) - 1.0) > 1e-12:
            raise ValueError(f"direction {self.direction} is not a unit vector")

    @property
    def vector(self) -> np.ndarray:
        return self.length * np.asarray(self.direction, dtype=float)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[float]] | np.ndarray) -> Polygon2:
    """Monotone-chain hull; collinear boundary points are dropped."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float).reshape(-1, 2).tolist())))
    if not pts:
        raise ValueError("convex hull of an empty point set")
    if len(pts) <= 2:
        return Polygon2(np.array(pts), degenerate=True)

    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) <= 2:
        # all collinear: keep the two extremes
        return Polygon2(np.array([pts[0], pts[-1]]), degenerate=True)
    return Polygon2(np.array(hull))


def zonogon(vectors: Sequence[complex], turns: Sequence[Fraction] | None = None) -> Polygon2:
    """Minkowski sum of the segments ``[0, v]`` for each generator ``v``.

    ``turns`` optionally gives each generator's direction as an exact fraction
    of a full turn, which keeps the edge ordering free of float ties.
    """
    gens = [complex(v) for v in vectors]
    if turns is None:
        turns = [Fraction(math.atan2(v.imag, v.real) / (2 * math.pi)).limit_denominator(10**9) % 1
                 for v in gens]
    edges: dict[Fraction, complex] = {}
    start = 0j
    for v, a in zip(gens, turns):
        if v == 0:
            continue
        a = Fraction(a) % 1
        edges[a] = edges.get(a, 0j) + v
        b = (a + Fraction(1, 2)) % 1
        edges[b] = edges.get(b, 0j) - v
        if a >= Fraction(1, 2):
            start += v
    if not edges:
        return Polygon2(np.array([[start.real, start.imag]]), degenerate=True)

    verts = [start]
    for a in sorted(edges):
        verts.append(verts[-1] + edges[a])
    verts.pop()  # closes back onto start
    arr = np.array([[v.real, v.imag] for v in verts]) + 0.0
    return Polygon2(arr, degenerate=len(edges) == 2)


def reachable_segments(params: ManipulatorParams) -> list[tuple[complex, Fraction]]:
    """Generators ``S(q,h,p) q^-h e^{-i h omega}`` and their exact directions."""
    q, d, p = params.q, params.d, params.p
    out = []
    heading = params.unit_vectors
    for h in range(p):
        length = tail_sum(q, h, p) / q**h
        out.append((length * heading[h % p], Fraction(-h * d, p) % 1))
    return out


def reachable_polygon(params: ManipulatorParams) -> Polygon2:
    """Asymptotic full-rotation reachable set as a zonogon (valid for q <= q(p))."""
    qc = q_crit(params.p).value
    if params.q > qc * (1.0 + REGIME_RTOL):
        raise RegimeError(f"q={params.q} exceeds q(p)={qc:.10g} for p={params.p}")
    segs = reachable_segments(params)
    return zonogon([v for v, _ in segs], [a for _, a in segs])


def _segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(*(pts - a).T)
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return np.hypot(*(pts - proj).T)


def boundary_distance(pts: np.ndarray, poly: Polygon2) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    v = poly.vertices
    if len(v) == 1:
        return np.hypot(*(pts - v[0]).T)
    n = len(v) if len(v) > 2 else 1
    dist = np.full(len(pts), np.inf)
    for i in range(n):
        dist = np.minimum(dist, _segment_distance(pts, v[i], v[(i + 1) % len(v)]))
    return dist


def points_in_polygon(pts: np.ndarray, poly: Polygon2, slack: float = 0.0) -> np.ndarray:
    """Vectorised :func:`point_in_polygon` over an ``(m, 2)`` array."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if poly.degenerate or len(poly) < 3:
        return boundary_distance(pts, poly) <= slack
    v = poly.vertices
    e = np.roll(v, -1, axis=0) - v
    rel = pts[:, None, :] - v[None, :, :]
    cross = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
    inside = np.all(cross >= 0.0, axis=1)
    if slack > 0.0 and not np.all(inside):
        out = ~inside
        inside[out] = boundary_distance(pts[out], poly) <= slack
    return inside


def point_in_polygon(pt: Sequence[float], poly: Polygon2, slack: float = 0.0) -> bool:
    """True when ``pt`` is inside ``poly`` or within ``slack`` of its boundary."""
    return bool(points_in_polygon(np.asarray(pt, dtype=float)[None, :], poly, slack)[0])


def is_interior(pt: Sequence[float], poly: Polygon2, margin: float = 1e-12) -> bool:
    """Strict interiority: inside and at least ``margin`` away from every edge."""
    if poly.degenerate or len(poly) < 3:
        return False
    p = np.asarray(pt, dtype=float)[None, :]
    return bool(points_in_polygon(p, poly)[0] and boundary_distance(p, poly)[0] > margin)


def _directed_chunk(a: np.ndarray, b: np.ndarray) -> float:
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    return float(np.sqrt(d2.min(axis=1).max()))


def directed_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """``sup_{x in a} inf_{y in b} |x - y|`` by brute force."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise ValueError("Hausdorff distance needs two nonempty point sets")
    rows = max(1, 2**22 // len(b))
    chunks = [a[i : i + rows] for i in range(0, len(a), rows)]
    if len(chunks) == 1:
        return _directed_chunk(chunks[0], b)
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return max(pool.map(lambda c: _directed_chunk(c, b), chunks))


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two finite planar point sets."""
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))
