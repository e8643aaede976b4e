"""Iterated-function-system view of the Fibonacci control system.

The pair ``(x(u), x(shift(u)))`` evolves by the affine maps
``F_c(x) = (c, 0) + A x`` with the companion matrix
``A = [[1/z, 1/z^2], [1, 0]]``. ``A`` itself always has norm >= 1, so the
contractive system uses the ``2^k`` compositions of k one-step maps, with k
the first power where ``||A^k|| < 1``.

Complex bases are handled in R^4 by realifying each complex entry into a 2x2
rotation-scaling block, with coordinates ``(Re x1, Im x1, Re x2, Im x2)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BudgetError, DivergentBaseError, FibSnakeError, RegimeError
from .expansion import as_word
from .geometry import Polygon2, convex_hull
from .numbers import PHI, fib, scaled_terms
from .series import tail_sum

Base = float | complex

MAX_CELLS_LOG2 = 24
K_CAP = 200
BURN_IN = 100
CHAOS_GENERATOR = "numpy.random.PCG64"


def _is_complex(base: Base) -> bool:
    return isinstance(base, complex) or np.iscomplexobj(base)


def _check_modulus(base: Base) -> float:
    r = abs(base)
    if not r > PHI:
        raise DivergentBaseError(f"|base|={r} must exceed the golden ratio {PHI:.10f}")
    return r


def _block(c: complex) -> np.ndarray:
    return np.array([[c.real, -c.imag], [c.imag, c.real]])


def companion(base: Base) -> np.ndarray:
    """2x2 companion matrix for a real base, 4x4 realification for a complex one."""
    _check_modulus(base)
    if not _is_complex(base):
        q = float(base)
        return np.array([[1.0 / q, 1.0 / (q * q)], [1.0, 0.0]])
    z = complex(base)
    m = np.zeros((4, 4))
    m[:2, :2] = _block(1.0 / z)
    m[:2, 2:] = _block(1.0 / (z * z))
    m[2:, :2] = np.eye(2)
    return m


def matrix_power(m: np.ndarray, k: int) -> np.ndarray:
    """``m**k`` by repeated multiplication."""
    out = np.eye(len(m))
    for _ in range(k):
        out = out @ m
    return out


def matrix_power_closed(q: float, k: int) -> np.ndarray:
    """Closed form ``A(q)^k = q^-(k+1) [[f_k q, f_{k-1}], [f_{k-1} q^2, f_{k-2} q]]``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_modulus(q)
    q = float(q)

    def t(j: int) -> float:
        # f_j / q^j
        if j <= 92:
            return fib(j) * q ** (-j)
        return float(scaled_terms(q, j)[j])

    return np.array([[t(k), t(k - 1) / (q * q)], [t(k - 1), t(k - 2) / (q * q)]])


def _jacobi_max_eig(g: np.ndarray, tol: float = 1e-12, sweeps: int = 100) -> float:
    a = np.array(g, dtype=float)
    n = len(a)
    for _ in range(sweeps):
        off = math.sqrt(sum(a[i, j] ** 2 for i in range(n) for j in range(n) if i != j))
        if off <= tol * max(1.0, abs(a).max()) * 1e-3:
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                if a[i, j] == 0.0:
                    continue
                theta = (a[j, j] - a[i, i]) / (2.0 * a[i, j])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[i, i] = rot[j, j] = c
                rot[i, j], rot[j, i] = s, -s
                a = rot.T @ a @ rot
    return float(np.max(np.diag(a)))


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value: closed form for 2x2, Jacobi sweeps on the Gram matrix otherwise."""
    m = np.asarray(m, dtype=float)
    g = m.T @ m
    if m.shape == (2, 2):
        tr = g[0, 0] + g[1, 1]
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        lam = 0.5 * (tr + math.sqrt(max(tr * tr - 4.0 * det, 0.0)))
    else:
        lam = _jacobi_max_eig(g)
    return math.sqrt(max(lam, 0.0))


def k_min(base: Base, cap: int = K_CAP) -> int:
    """Smallest k with ``||A^k||_2 < 1``."""
    a = companion(base)
    p = np.eye(len(a))
    for k in range(1, cap + 1):
        p = p @ a
        if spectral_norm(p) < 1.0:
            return k
    raise FibSnakeError(f"no contractive power up to k={cap} for |base|={abs(base)}")


@dataclass(frozen=True)
class KBounds:
    first: float
    second_even: float


def k_log_bounds(q: float) -> KBounds:
    """Two logarithmic estimates of k(q); advisory only, see :func:`k_min`."""
    _check_modulus(q)
    denom = 2.0 * (math.log(q) - math.log(PHI))
    first = math.log((q**4 + 3 * q**2 + 1) / (PHI**2 * q**2)) / denom
    second = math.log(1 / (5 * PHI**2) + PHI**2 / 5 + q**2 / 5 + 1 / (5 * q**2)) / denom
    return KBounds(first, second)


@dataclass(frozen=True)
class AffineMap:
    linear: np.ndarray
    translation: np.ndarray
    word: tuple[int, ...] = field(default=())

    @property
    def dim(self) -> int:
        return len(self.translation)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.linear.T + self.translation

    def then(self, other: "AffineMap") -> "AffineMap":
        """``other`` applied after ``self``."""
        return AffineMap(
            other.linear @ self.linear,
            other.linear @ self.translation + other.translation,
            self.word + other.word,
        )


def _unit(dim: int) -> np.ndarray:
    e = np.zeros(dim)
    e[0] = 1.0
    return e


def one_step_map(base: Base, digit: int) -> AffineMap:
    a = companion(base)
    return AffineMap(a, digit * _unit(len(a)), (int(digit),))


def build_maps(base: Base, k: int) -> list[AffineMap]:
    """The ``2^k`` compositions ``F_{w_k} o ... o F_{w_1}``, ordered by word value."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    steps = [one_step_map(base, 0), one_step_map(base, 1)]
    out = []
    for word in itertools.product((0, 1), repeat=k):
        g = steps[word[0]]
        for c in word[1:]:
            g = g.then(steps[c])
        out.append(g)
    return out


def word_translations(a: np.ndarray, length: int) -> np.ndarray:
    """Translation parts of all length-L compositions, first digit as the top bit."""
    e = _unit(len(a))
    v = np.zeros((1, len(a)))
    for _ in range(length):
        av = v @ a.T
        v = np.stack([av, av + e], axis=1).reshape(-1, len(a))
    return v


def state(word: Sequence[int], base: Base) -> np.ndarray:
    """``(x(u), x(shift(u)))`` for a finite word, realified for complex bases."""
    u = as_word(word)
    r = _check_modulus(base)
    t = scaled_terms(r, max(len(u), 1))
    if _is_complex(base):
        rot = complex(base) / r
        w = t[: len(u)] * rot ** -np.arange(len(u))
    else:
        w = t[: len(u)]
    x1 = complex(np.dot(u, w)) if u else 0j
    x2 = complex(np.dot(u[1:], w[: len(u) - 1])) if len(u) > 1 else 0j
    if _is_complex(base):
        return np.array([x1.real, x1.imag, x2.real, x2.imag])
    return np.array([x1.real, x2.real])


@dataclass(frozen=True)
class AttractorCover:
    """Cells of ``G^n(X)``: one translated copy of a common convex shape per word."""

    shape: Polygon2
    offsets: np.ndarray
    depth: int
    word_length: int
    kind: str

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def polygons(self) -> np.ndarray:
        """``(cells, vertices, 2)`` array of polygon vertices."""
        return self.offsets[:, None, :] + self.shape.vertices[None, :, :]

    def projection_intervals(self) -> np.ndarray:
        """Per-cell ``[min, max]`` of the first coordinate."""
        xs = self.shape.vertices[:, 0]
        return self.offsets[:, :1] + np.array([xs.min(), xs.max()])[None, :]


def _check_budget(k: int, n: int) -> int:
    if k < 1 or n < 1:
        raise ValueError(f"need k >= 1 and n >= 1, got k={k}, n={n}")
    if k * n > MAX_CELLS_LOG2:
        raise BudgetError(f"2^(k*n) = 2^{k * n} cells exceeds the 2^{MAX_CELLS_LOG2} budget")
    return k * n


def _check_contractive(base: Base, k: int) -> None:
    km = k_min(base)
    if k < km:
        raise RegimeError(f"k={k} is below k_min={km}; the maps are not contractions")


def iterate_real(
    q: float,
    k: int,
    n: int,
    seed_box: tuple[tuple[float, float], tuple[float, float]] | None = None,
) -> AttractorCover:
    """``n`` rounds of the 2^k-map system applied to a rectangle in the plane."""
    length = _check_budget(k, n)
    _check_contractive(q, k)
    if seed_box is None:
        s = tail_sum(q)
        seed_box = ((0.0, s), (0.0, s))
    (x0, x1), (y0, y1) = seed_box
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
    a = companion(q)
    shape = convex_hull(corners @ matrix_power(a, length).T)
    return AttractorCover(shape, word_translations(a, length), n, k, "real")


def hypercube_vertices(radius: float) -> np.ndarray:
    return radius * np.array(list(itertools.product((-1.0, 1.0), repeat=4)))


def iterate_complex_hull(z: complex, k: int, n: int) -> AttractorCover:
    """Convex-hull approximation of the reachable set for a complex base.

    Each word map sends the 16 vertices of ``[-S(|z|), S(|z|)]^4`` forward;
    the projection to the first complex coordinate of their image is the hull
    of the 16 projected vertices, and all cells share that hull up to
    translation.
    """
    z = complex(z)
    length = _check_budget(k, n)
    _check_contractive(z, k)
    a = companion(z)
    cube = hypercube_vertices(tail_sum(abs(z)))
    shape = convex_hull((cube @ matrix_power(a, length).T)[:, :2])
    offsets = word_translations(a, length)[:, :2]
    return AttractorCover(shape, offsets, n, k, "complex")


def chaos_game(
    base: Base, count: int, seed: int, k: int | None = None, burn_in: int = BURN_IN
) -> np.ndarray:
    """Random-iteration sample of the attractor.

    Real base: ``(count, 2)`` state pairs ``(x(u), x(shift u))``. Complex base:
    the first coordinate ``x(u)`` as ``(Re, Im)`` rows.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    k = k_min(base) if k is None else k
    a = companion(base)
    ak = matrix_power(a, k)
    offsets = word_translations(a, k)
    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.integers(0, len(offsets), size=burn_in + count)
    x = np.zeros(len(a))
    out = np.empty((count, len(a)))
    for i, j in enumerate(picks):
        x = ak @ x + offsets[j]
        if i >= burn_in:
            out[i - burn_in] = x
    return out[:, :2].copy()
