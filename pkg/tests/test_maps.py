from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from plisskit.errors import NonInvertibleParameters
from plisskit.maps import (
    Direction,
    MapBounds,
    MapDescriptor,
    apply,
    apply_points,
    arnold_cat,
    check_invertible,
    estimate_bounds,
    frac,
    frac_array,
    jacobian,
    jacobians,
    orbit,
    perturbed_cat,
    singular_values,
    spectral_norm,
    standard_map,
    torus_distance,
)

unit = st.floats(0.0, 1.0, exclude_max=True)
points = st.tuples(unit, unit)
MAPS = [arnold_cat(), perturbed_cat(0.05), perturbed_cat(0.7), standard_map(0.0), standard_map(1.5)]
maps = st.sampled_from(MAPS)


def test_cat_apply_example():
    assert apply(arnold_cat(), (0.25, 0.5)) == (0.0, 0.75)


def test_frac_always_in_unit_interval():
    assert frac(-1e-18) == 0.0
    assert frac(-0.25) == 0.75
    assert frac(3.0) == 0.0
    out = frac_array(np.array([-1e-18, -2.5, 1.0, 0.999]))
    assert np.all((out >= 0) & (out < 1))


@given(maps, points)
def test_forward_matches_formula(fmap, p):
    ref = oracles.forward(fmap.family.value, fmap.param, *p)
    assert torus_distance(apply(fmap, p), ref) < 1e-12


@settings(max_examples=200)
@given(maps, points, st.integers(1, 3))
def test_inverse_undoes_forward(fmap, p, N):
    f = MapDescriptor(fmap.family, fmap.param, N)
    back = apply(f, apply(f, p), Direction.BACKWARD)
    assert torus_distance(back, p) < 1e-10


@given(maps, points)
def test_jacobian_matches_chain_rule_and_finite_differences(fmap, p):
    J = jacobian(fmap, p)
    fam = fmap.family.value
    np.testing.assert_allclose(J, oracles.forward_jacobian(fam, fmap.param, *p), atol=1e-12)
    np.testing.assert_allclose(J, oracles.finite_difference_jacobian(fam, fmap.param, *p), atol=1e-6)


@given(maps, points, st.integers(1, 4))
def test_area_preserving(fmap, p, N):
    f = MapDescriptor(fmap.family, fmap.param, N)
    for d in Direction:
        assert abs(np.linalg.det(jacobian(f, p, d)) - 1.0) < 1e-10


@given(maps, points, st.integers(1, 3))
def test_backward_jacobian_inverts_forward(fmap, p, N):
    f = MapDescriptor(fmap.family, fmap.param, N)
    q = apply(f, p)
    prod = jacobian(f, q, Direction.BACKWARD) @ jacobian(f, p)
    np.testing.assert_allclose(prod, np.eye(2), atol=1e-8)


@given(maps, points, st.integers(1, 4))
def test_iterate_jacobian_is_product_along_orbit(fmap, p, N):
    f = MapDescriptor(fmap.family, fmap.param, N)
    fam = fmap.family.value
    x, y = p
    M = np.eye(2)
    for _ in range(N):
        M = oracles.forward_jacobian(fam, fmap.param, x, y) @ M
        x, y = oracles.forward(fam, fmap.param, x, y)
    np.testing.assert_allclose(jacobian(f, p), M, rtol=1e-10, atol=1e-10)
    assert torus_distance(apply(f, p), (x, y)) < 1e-9


def test_cat_squared_jacobian():
    np.testing.assert_array_equal(jacobian(arnold_cat(2), (0.3, 0.1)), [[5, 3], [3, 2]])


def test_vectorised_agrees_with_scalar():
    rng = np.random.default_rng(3)
    pts = rng.random((50, 2))
    for fmap in MAPS:
        for d in Direction:
            batch = apply_points(fmap, pts, d)
            J = jacobians(fmap, pts, d)
            for i, p in enumerate(pts):
                assert torus_distance(batch[i], apply(fmap, p, d)) < 1e-12
                np.testing.assert_allclose(J[i], jacobian(fmap, p, d), atol=1e-12)


def test_orbit_shape_and_consistency():
    fmap = perturbed_cat(0.05)
    o = orbit(fmap, (0.1, 0.2), 20)
    assert o.shape == (21, 2)
    assert np.all((o >= 0) & (o < 1))
    for k in range(20):
        assert torus_distance(apply(fmap, o[k]), o[k + 1]) < 1e-12
    # rounding grows like e^{0.96 k}, so only a short round trip is exact to 1e-9
    back = orbit(fmap, o[8], 8, Direction.BACKWARD)
    assert torus_distance(back[-1], o[0]) < 1e-9


@given(st.lists(st.floats(-50, 50), min_size=4, max_size=4))
def test_singular_values_against_svd(entries):
    m = np.array(entries).reshape(2, 2)
    s1, s2 = singular_values(m)
    ref = np.linalg.svd(m, compute_uv=False)
    scale = max(1.0, ref[0])
    assert abs(s1 - ref[0]) <= 1e-9 * scale
    assert abs(s2 - ref[1]) <= 1e-9 * scale
    assert abs(spectral_norm(m) - ref[0]) <= 1e-9 * scale


def test_invertibility_gate():
    with pytest.raises(NonInvertibleParameters):
        check_invertible(perturbed_cat(1.0))
    with pytest.raises(NonInvertibleParameters):
        apply(perturbed_cat(-1.5), (0.1, 0.1))
    check_invertible(perturbed_cat(0.99))


def test_descriptor_roundtrip_and_validation():
    for fmap in MAPS + [arnold_cat(3)]:
        assert MapDescriptor.from_dict(fmap.to_dict()) == fmap
    with pytest.raises(ValueError):
        MapDescriptor(arnold_cat().family, 0.0, 0)


@pytest.mark.parametrize(
    "fmap, alpha, beta",
    [
        (arnold_cat(1), 0.3819660113, 2.6180339887),
        (arnold_cat(2), 1 / 6.8541019662, 6.8541019662),
        (standard_map(0.0), 1 / 1.6180339887, 1.6180339887),
    ],
)
def test_bounds_examples(fmap, alpha, beta):
    b = estimate_bounds(fmap, 64)
    assert b.alpha == pytest.approx(alpha, abs=1e-9)
    assert b.beta == pytest.approx(beta, abs=1e-9)
    assert b.grid_density == 64


def test_bounds_against_svd_oracle():
    fmap = perturbed_cat(0.3)
    g = 16
    b = estimate_bounds(fmap, g)
    beta = alpha_inv = 0.0
    for i in range(g):
        for j in range(g):
            p = (i / g, j / g)
            beta = max(beta, np.linalg.svd(oracles.forward_jacobian("perturbed-cat", 0.3, *p), compute_uv=False)[0])
            alpha_inv = max(alpha_inv, np.linalg.norm(jacobian(fmap, p, Direction.BACKWARD), 2))
    assert b.beta == pytest.approx(beta, rel=1e-12)
    assert b.alpha == pytest.approx(1 / alpha_inv, rel=1e-12)


@pytest.mark.parametrize("fmap", [perturbed_cat(0.4), standard_map(1.5), standard_map(0.3, 2)])
def test_bounds_invariants_and_nested_monotonicity(fmap):
    prev = None
    for g in (8, 16, 32, 64):
        b = estimate_bounds(fmap, g)
        assert 0 < b.alpha <= 1 <= b.beta
        assert b.r_estimate <= max(-math.log(b.alpha), math.log(b.beta)) / fmap.N + 1e-15
        if prev is not None:
            assert b.beta >= prev.beta
            assert b.alpha <= prev.alpha
        prev = b


def test_bounds_roundtrip():
    b = estimate_bounds(perturbed_cat(0.05), 32)
    assert MapBounds.from_dict(b.to_dict()) == b


@given(points, points)
def test_torus_distance_against_brute_force(p, q):
    d = torus_distance(p, q)
    assert d == pytest.approx(oracles.torus_distance(p, q), abs=1e-15)
    assert d == torus_distance(q, p)
    assert d <= math.sqrt(2) / 2 + 1e-15
