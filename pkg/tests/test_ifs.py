import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fibsnake.errors import BudgetError, DivergentBaseError, RegimeError
from fibsnake.expansion import evaluate, shift, subset_sums
from fibsnake.geometry import hausdorff, is_interior, points_in_polygon, reachable_polygon
from fibsnake.ifs import (
    AffineMap,
    build_maps,
    chaos_game,
    companion,
    hypercube_vertices,
    iterate_complex_hull,
    iterate_real,
    k_log_bounds,
    k_min,
    matrix_power,
    matrix_power_closed,
    one_step_map,
    spectral_norm,
    state,
    word_translations,
)
from fibsnake.manipulator import ManipulatorParams
from fibsnake.numbers import PHI, fib
from fibsnake.series import q_crit, tail_remainder, tail_sum


def test_companion_real():
    np.testing.assert_array_equal(companion(2.0), [[0.5, 0.25], [1, 0]])
    assert np.linalg.det(companion(2.0)) == pytest.approx(-0.25)
    assert max(abs(np.linalg.eigvals(companion(2.0)))) == pytest.approx(PHI / 2, rel=1e-12)


def test_companion_complex_realification():
    z = 1.9 * np.exp(0.7j)
    m = companion(z)
    x = np.array([0.3 - 0.2j, -1.1 + 0.5j])
    y = np.array([x[0] / z + x[1] / z**2, x[0]])
    out = m @ np.array([x[0].real, x[0].imag, x[1].real, x[1].imag])
    np.testing.assert_allclose(out, [y[0].real, y[0].imag, y[1].real, y[1].imag], atol=1e-15)


def test_companion_rejects_small_modulus():
    with pytest.raises(DivergentBaseError):
        companion(1.5)
    with pytest.raises(DivergentBaseError):
        companion(1.5j)


@pytest.mark.parametrize("q", [1.7, 2.0, 3.0])
def test_closed_power_matches_multiplication(q):
    a = companion(q)
    for k in range(1, 31):
        np.testing.assert_allclose(matrix_power_closed(q, k), matrix_power(a, k), rtol=1e-12, atol=0)


def test_closed_power_examples():
    np.testing.assert_array_equal(matrix_power_closed(2.0, 1), companion(2.0))
    np.testing.assert_allclose(matrix_power_closed(2.0, 2), [[0.5, 0.125], [0.5, 0.25]], rtol=1e-15)


def test_index_shifted_power_formula_fails_at_k1():
    # shifted indices: q^-(k+1) [[f_{k+1} q, f_k], [f_k q^2, f_{k-1} q]] gives 2/q in the corner
    q, k = 2.0, 1
    shifted = np.array([[fib(k + 1) * q, fib(k)], [fib(k) * q * q, fib(k - 1) * q]]) / q ** (k + 1)
    assert shifted[0, 0] == pytest.approx(2 / q)
    assert not np.allclose(shifted, companion(q))


@given(st.floats(1.65, 5.0), st.integers(1, 30))
def test_power_determinant(q, k):
    assert np.linalg.det(matrix_power_closed(q, k)) == pytest.approx((-1) ** k * q ** (-2 * k), rel=1e-9)


def test_closed_power_deep_index():
    q = 1.7
    np.testing.assert_allclose(matrix_power_closed(q, 120), matrix_power(companion(q), 120), rtol=1e-11)


def test_closed_power_rejects_k0():
    with pytest.raises(ValueError):
        matrix_power_closed(2.0, 0)


@pytest.mark.parametrize("m,expected", [(np.eye(2), 1.0), (np.diag([3.0, 2.0]), 3.0), (np.eye(4), 1.0)])
def test_spectral_norm_examples(m, expected):
    assert spectral_norm(m) == pytest.approx(expected, rel=1e-14)


def test_spectral_norm_companion_two():
    assert spectral_norm(companion(2.0)) == pytest.approx(1.1238, abs=1e-4)


def power_iteration_norm(m, iters=2000):
    g = m.T @ m
    x = np.ones(len(m)) / math.sqrt(len(m))
    for _ in range(iters):
        x = g @ x
        x /= np.linalg.norm(x)
    return math.sqrt(x @ g @ x)


@given(st.lists(st.floats(-3, 3), min_size=16, max_size=16))
def test_spectral_norm_4x4_against_numpy(entries):
    m = np.array(entries).reshape(4, 4)
    assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-10, abs=1e-12)


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_spectral_norm_2x2_against_numpy(entries):
    m = np.array(entries).reshape(2, 2)
    assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-10, abs=1e-12)


def test_spectral_norm_power_iteration_oracle():
    for q in (1.7, 2.0, 2.6):
        for k in (1, 2, 5):
            m = matrix_power(companion(q), k)
            assert spectral_norm(m) == pytest.approx(power_iteration_norm(m), rel=1e-9)


@pytest.mark.parametrize("q,expected", [(2.0, 2), (10.0, 2), (3.0, 2)])
def test_k_min_values(q, expected):
    assert k_min(q) == expected


@pytest.mark.parametrize("q", [1.62, 1.7, 1.8, 2.0, 2.5, 3.0, 10.0])
def test_k_min_certificate(q):
    k = k_min(q)
    a = companion(q)
    assert spectral_norm(matrix_power(a, k)) < 1 <= spectral_norm(matrix_power(a, k - 1))


def test_companion_norm_never_below_one():
    # the second row (1, 0) alone has norm 1
    for q in (1.7, 2.0, 10.0, 1e6):
        assert spectral_norm(companion(q)) >= 1.0


def test_k_min_near_phi_large_but_finite():
    assert 20 < k_min(1.62) < 200


def test_k_min_complex_bases():
    for p in (3, 4, 8):
        z = ManipulatorParams(q_crit(p).value, 1, p).z
        assert k_min(z) == 2


def test_k_min_complex_power_matches_complex_matrix():
    z = 1.85 * np.exp(0.4j)
    ac = np.array([[1 / z, 1 / z**2], [1, 0]])
    for k in (1, 2, 3):
        real_norm = spectral_norm(matrix_power(companion(z), k))
        assert real_norm == pytest.approx(np.linalg.norm(np.linalg.matrix_power(ac, k), 2), rel=1e-10)


def test_k_log_bounds_value():
    kb = k_log_bounds(2.0)
    assert kb.first == pytest.approx(math.log(29 / (PHI**2 * 4)) / (2 * (math.log(2) - math.log(PHI))))
    assert kb.first == pytest.approx(2.403, abs=1e-3)


def test_k_log_bounds_decreasing():
    vals = [k_log_bounds(q).first for q in (1.8, 2.0, 2.5, 3.0, 5.0, 10.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("q", [1.8, 2.0, 2.5, 3.0])
def test_k_bound_first_covers_k_min(q):
    assert math.ceil(k_log_bounds(q).first) >= k_min(q)


def test_k_bound_second_violated_at_two():
    # reported, not relied on: ceil(0.877) = 1 < k_min(2) = 2
    assert math.ceil(k_log_bounds(2.0).second_even) < k_min(2.0)


def test_a2_rational_norm_formula_is_frobenius():
    for q in (1.7, 2.0, 3.0):
        a2 = matrix_power(companion(q), 2)
        frob2 = (q**4 + 5 * q**2 + 1) / q**6
        assert np.sum(a2**2) == pytest.approx(frob2, rel=1e-12)
        # so it bounds the squared spectral norm: its q-threshold is sufficient but not sharp
        assert spectral_norm(a2) ** 2 <= frob2
    assert spectral_norm(matrix_power(companion(2.0), 2)) == pytest.approx(0.7558, abs=1e-4)
    assert (16 + 20 + 1) / 64 != pytest.approx(0.7558, abs=1e-2)


def test_build_maps_one_step():
    maps = build_maps(2.0, 1)
    np.testing.assert_array_equal(maps[1](np.zeros(2)), [1, 0])
    np.testing.assert_array_equal(maps[0].linear, companion(2.0))
    np.testing.assert_array_equal(maps[0].translation, [0, 0])


def test_build_maps_composition_order(rng):
    q = 2.0
    f = [one_step_map(q, 0), one_step_map(q, 1)]
    maps = build_maps(q, 3)
    assert [m.word for m in maps] == [tuple(int(b) for b in f"{i:03b}") for i in range(8)]
    for m in maps:
        for x in rng.normal(size=(5, 2)):
            y = x
            for c in m.word:
                y = f[c](y)
            np.testing.assert_allclose(m(x), y, atol=1e-12)


def test_build_maps_linear_part_is_power():
    for m in build_maps(2.0, 3):
        np.testing.assert_allclose(m.linear, matrix_power(companion(2.0), 3), atol=1e-15)


def test_build_maps_rejects_k0():
    with pytest.raises(ValueError):
        build_maps(2.0, 0)


def test_word_translations_match_maps():
    a = companion(2.3)
    maps = build_maps(2.3, 4)
    np.testing.assert_allclose(word_translations(a, 4), [m.translation for m in maps], atol=1e-15)


def test_affine_then():
    f = AffineMap(np.diag([2.0, 3.0]), np.array([1.0, 0.0]), (1,))
    g = AffineMap(np.eye(2), np.array([0.0, 1.0]), (0,))
    fg = f.then(g)
    np.testing.assert_array_equal(fg(np.array([1.0, 1.0])), g(f(np.array([1.0, 1.0]))))
    assert fg.word == (1, 0) and fg.dim == 2


@given(st.lists(st.integers(0, 1), min_size=2, max_size=30), st.floats(1.65, 3.0))
def test_shift_compatibility(word, q):
    # F_{u0}(x(shift u), x(shift^2 u)) = (x(u), x(shift u))
    s1 = state(shift(word), q)
    out = one_step_map(q, word[0])(s1)
    np.testing.assert_allclose(out, state(word, q), atol=1e-12)


def test_state_values():
    np.testing.assert_allclose(state((1, 0, 1), 2.0), [evaluate((1, 0, 1), 2.0), evaluate((0, 1), 2.0)])
    np.testing.assert_array_equal(state((), 2.0), [0, 0])


def test_state_complex_matches_complex_sum():
    z = 1.9 * np.exp(1j * math.pi / 2)
    word = (1, 1, 0, 1, 1)
    x1 = sum(u * fib(k) / z**k for k, u in enumerate(word))
    x2 = sum(u * fib(k) / z**k for k, u in enumerate(word[1:]))
    np.testing.assert_allclose(state(word, z), [x1.real, x1.imag, x2.real, x2.imag], atol=1e-12)


def test_iterate_real_one_round():
    cover = iterate_real(2.0, 2, 1)
    assert len(cover) == 4 and cover.polygons.shape == (4, 4, 2)
    s = tail_sum(2.0)
    assert np.all(cover.polygons >= -1e-12) and np.all(cover.polygons <= s + 1e-12)


def test_iterate_real_cover_matches_maps_on_box():
    q, k = 2.0, 2
    cover = iterate_real(q, k, 1)
    s = tail_sum(q)
    corners = np.array([[0, 0], [s, 0], [s, s], [0, s]])
    for m, cell in zip(build_maps(q, k), cover.polygons):
        img = m(corners)
        assert {tuple(np.round(p, 12)) for p in img} == {tuple(np.round(p, 12)) for p in cell}


def test_iterate_real_projection_tracks_enumeration():
    q = 2.0
    cover = iterate_real(q, 2, 4)
    assert len(cover) == 256
    enum = np.sort(subset_sums(np.array([fib(k) / q**k for k in range(16)])))
    tol = 2 * tail_remainder(q, 16)
    lo, hi = cover.projection_intervals().T
    # every enumeration point lies in some cell projection, and every cell meets the enumeration
    covered = np.zeros(len(enum), dtype=bool)
    for a, b in zip(lo, hi):
        i, j = np.searchsorted(enum, [a - tol, b + tol])
        assert j > i
        covered[np.searchsorted(enum, a - 1e-12) : np.searchsorted(enum, b + 1e-12, side="right")] = True
    assert covered.all()


def test_iterate_real_seed_invariance():
    q = 2.0
    a = iterate_real(q, 2, 3)
    b = iterate_real(q, 2, 3, seed_box=((1.0, 2.0), (0.5, 3.0)))
    c = iterate_real(q, 2, 5, seed_box=((1.0, 2.0), (0.5, 3.0)))
    d = iterate_real(q, 2, 5)
    h3 = hausdorff(a.polygons.reshape(-1, 2), b.polygons.reshape(-1, 2))
    h5 = hausdorff(c.polygons.reshape(-1, 2), d.polygons.reshape(-1, 2))
    assert h5 < h3 * 0.6


def test_iterate_budget_and_regime():
    with pytest.raises(BudgetError):
        iterate_real(2.0, 5, 5)
    with pytest.raises(RegimeError):
        iterate_real(2.0, 1, 3)
    with pytest.raises(ValueError):
        iterate_real(2.0, 2, 0)


def test_hypercube_vertices():
    v = hypercube_vertices(2.0)
    assert v.shape == (16, 4) and set(np.abs(v).ravel()) == {2.0}


def test_complex_hull_cells():
    params = ManipulatorParams(q_crit(4).value, 1, 4)
    cover = iterate_complex_hull(params.z, 2, 3)
    assert len(cover) == 64
    assert len(cover.shape) <= 16


def test_complex_hull_single_map_real_base():
    q = 2.0
    cover = iterate_complex_hull(complex(q), 2, 1)
    a2 = matrix_power(companion(complex(q)), 2)
    cube = hypercube_vertices(tail_sum(q))
    expected = {tuple(np.round(p, 12)) for p in (cube @ a2.T)[:, :2]}
    assert {tuple(np.round(p, 12)) for p in cover.shape.vertices} <= expected


def test_complex_hull_cells_contain_their_word_points():
    params = ManipulatorParams(1.8, 1, 4)
    z = params.z
    cover = iterate_complex_hull(z, 2, 2)
    for idx in range(len(cover)):
        word = tuple(int(b) for b in f"{idx:04b}")
        # x(w u) for random tails u lands in the cell of w
        for tail in ((0,) * 8, (1,) * 8, (1, 0) * 4):
            x = state(word + tail, z)[:2]
            from fibsnake.geometry import Polygon2

            cell = Polygon2(cover.shape.vertices + cover.offsets[idx])
            assert points_in_polygon(x[None, :], cell, slack=1e-9)[0]


def test_complex_hull_cover_inside_reachable_polygon():
    params = ManipulatorParams(q_crit(4).value, 1, 4)
    cover = iterate_complex_hull(params.z, 2, 3)
    poly = reachable_polygon(params)
    v = cover.shape.vertices
    diameter = max(np.hypot(*(a - b)) for a in v for b in v)
    pts = cover.polygons.reshape(-1, 2)
    assert np.all(points_in_polygon(pts, poly, slack=diameter + 1e-9))
    # the cell anchors themselves (finite words) are inside with no slack
    assert np.all(points_in_polygon(cover.offsets, poly, slack=1e-9))


def test_chaos_game_bounds_and_determinism():
    pts = chaos_game(2.0, 1000, 42)
    assert pts.shape == (1000, 2)
    s = tail_sum(2.0)
    assert np.all(pts >= 0) and np.all(pts <= s)
    np.testing.assert_array_equal(pts, chaos_game(2.0, 1000, 42))
    assert not np.array_equal(pts, chaos_game(2.0, 1000, 43))


def test_chaos_game_complex_bounded():
    z = ManipulatorParams(1.8, 1, 4).z
    pts = chaos_game(z, 2000, 7)
    assert np.all(np.abs(pts) <= tail_sum(abs(z)))
    poly = reachable_polygon(ManipulatorParams(1.8, 1, 4))
    assert np.all(points_in_polygon(pts, poly, slack=1e-9))


def test_chaos_game_rejects_zero_count():
    with pytest.raises(ValueError):
        chaos_game(2.0, 0, 1)


def test_chaos_game_points_are_shift_pairs():
    # real case: second coordinate lies in [0, S] and the pair lies in the cover of the box
    pts = chaos_game(2.0, 500, 3)
    cover = iterate_real(2.0, 2, 3)
    lo, hi = cover.projection_intervals().T
    assert all(np.any((lo - 1e-9 <= x) & (x <= hi + 1e-9)) for x in pts[:, 0])


def test_self_affinity(rng):
    q = 2.0
    p = chaos_game(q, 4000, 11)
    images = np.vstack([m(p) for m in build_maps(q, k_min(q))])
    # resolution: the largest nearest-neighbour gap inside the sample
    d = np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    resolution = d.min(1).max()
    sub = images[rng.choice(len(images), 4000, replace=False)]
    assert hausdorff(sub, p) <= 3 * resolution
