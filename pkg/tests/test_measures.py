import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from dualmink.errors import NonConvexData
from dualmink.geometry import DiscreteMeasure, random_polytope, regular_polygon
from dualmink.measures import (dual_curvature, dual_volume, ellipse_support, family_is_regular,
                               normalized_dual_volume, phi_functional, smooth_density,
                               variational_check)
from dualmink.quadrature import build_rule, default_rule

SQ2 = math.sqrt(2.0)


def test_square_dual_volumes(sq):
    assert dual_volume(sq, -1) == pytest.approx(2 * SQ2, abs=1e-12)
    assert dual_volume(sq, -2) == pytest.approx((math.pi + 2) / 2, abs=1e-12)


def test_square_normalized(sq):
    assert normalized_dual_volume(sq, -1) == pytest.approx(math.pi / (2 * SQ2), abs=1e-12)


def test_square_normalized_at_zero(sq):
    val, _ = quad(lambda t: math.log(max(abs(math.cos(t)), abs(math.sin(t)))), 0, 2 * math.pi,
                  points=[math.pi / 4 * k for k in range(1, 8)], epsabs=1e-14)
    assert normalized_dual_volume(sq, 0) == pytest.approx(math.exp(-val / (2 * math.pi)), rel=1e-12)


@pytest.mark.parametrize("q", [-0.5, -1, -2, -5])
def test_polygon_ball_limit(q):
    P = regular_polygon(256, h=0.7)
    assert dual_volume(P, q) == pytest.approx(math.pi * 0.7 ** q, rel=2e-4)
    assert normalized_dual_volume(P, q) == pytest.approx(0.7, rel=2e-4)


def test_square_masses(sq):
    dc = dual_curvature(sq, -1)
    np.testing.assert_allclose(dc.masses, SQ2 / 2, atol=1e-12)
    assert dc.total == pytest.approx(2 * SQ2, rel=1e-14)
    assert dc.rule_error == 0.0


@pytest.mark.parametrize("q", [-0.3, -1, -4])
def test_regular_polygon_masses_equal(q):
    dc = dual_curvature(regular_polygon(11), q)
    np.testing.assert_allclose(dc.masses, dc.total / 11, rtol=1e-12)


def test_redundant_facet_has_zero_mass(sq, sq_redundant):
    a = dual_curvature(sq, -1).masses
    b = dual_curvature(sq_redundant, -1).masses
    assert b[4] == 0.0
    np.testing.assert_allclose(b[:4], a, rtol=1e-13)
    mu = dual_curvature(sq_redundant, -1).to_measure()
    assert len(mu) == 4


@pytest.mark.parametrize("lam,q,factor", [(2.0, -2, 0.25), (3.0, -1, 1 / 3)])
def test_square_homogeneity(sq, lam, q, factor):
    a = dual_curvature(sq, q).masses
    b = dual_curvature(sq.scaled(lam), q).masses
    np.testing.assert_allclose(b, factor * a, rtol=1e-14)


@given(st.integers(0, 10 ** 6), st.floats(0.2, 5.0), st.sampled_from([-0.5, -1.0, -2.0, -5.0]))
def test_curvature_homogeneity(seed, lam, q):
    P = random_polytope(2, 10, np.random.default_rng(seed))
    a = dual_curvature(P, q).masses
    b = dual_curvature(P.scaled(lam), q).masses
    np.testing.assert_allclose(b, lam ** q * a, rtol=1e-12)


def test_curvature_homogeneity_3d(rng):
    P = random_polytope(3, 12, rng)
    a = dual_curvature(P, -1.5).masses
    b = dual_curvature(P.scaled(1.7), -1.5).masses
    np.testing.assert_allclose(b, 1.7 ** -1.5 * a, rtol=1e-12)


@pytest.mark.parametrize("dim,m", [(2, 15), (3, 15)])
def test_total_mass_matches_dual_volume(rng, dim, m):
    P = random_polytope(dim, m, rng)
    for q in (-0.5, -2):
        dc = dual_curvature(P, q)
        assert dc.total == pytest.approx(dc.masses.sum(), rel=1e-12)
        assert dc.total == pytest.approx(dual_volume(P, q), rel=1e-12)


def test_3d_mesh_and_facet_rules_agree(rng):
    P = random_polytope(3, 10, rng)
    a = dual_curvature(P, -1, build_rule(3, 3, P)).total
    b = dual_volume(P, -1, build_rule(3, 2, P, method="facet"))
    assert a == pytest.approx(b, rel=1e-3)


def test_disk_density():
    r = 1.7
    for q in (-0.5, -2):
        got = smooth_density(lambda t: np.full_like(t, r), np.linspace(0, 6, 7), q)
        np.testing.assert_allclose(got, r ** q / 2, rtol=1e-12)


def test_ellipse_density_at_zero():
    h, dh, d2h = ellipse_support(2.0, 1.0)
    # h = 2, h' = 0, h'' = -3/2 at theta = 0
    assert smooth_density(h, 0.0, -1, dh, d2h) == pytest.approx(0.5 * 2 * 2.0 ** -3 * 0.5)
    assert smooth_density(h, 0.0, -1) == pytest.approx(0.0625, rel=1e-6)


def test_density_rejects_nonconvex_data():
    with pytest.raises(NonConvexData):
        smooth_density(lambda t: 1 + 0.5 * np.cos(3 * t), 0.0, -1)


def test_ellipse_density_integrates_to_dual_volume():
    h, dh, d2h = ellipse_support(2.0, 1.0)
    dens, _ = quad(lambda t: smooth_density(h, t, -1, dh, d2h), 0, 2 * math.pi, epsabs=1e-13,
                   epsrel=1e-13, limit=200)
    # radial function of the ellipse, integrated independently
    vol, _ = quad(lambda t: math.sqrt((math.cos(t) / 2) ** 2 + math.sin(t) ** 2), 0, 2 * math.pi,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    assert dens == pytest.approx(vol / 2, rel=1e-10)


def test_phi_examples(sq, square_measure):
    expected = math.log(math.pi / (2 * SQ2))
    assert phi_functional(square_measure, sq, -1) == pytest.approx(expected, abs=1e-12)
    assert phi_functional(square_measure, sq.scaled(2), -1) == pytest.approx(expected, abs=1e-12)


@given(st.integers(0, 10 ** 6), st.floats(0.1, 10.0))
def test_phi_is_dilation_invariant(seed, c):
    r = np.random.default_rng(seed)
    P = random_polytope(2, 7, r)
    mu = DiscreteMeasure(P.normals, r.uniform(0.1, 1, 7))
    a = phi_functional(mu, P, -1.3)
    b = phi_functional(mu, P.scaled(c), -1.3)
    assert b == pytest.approx(a, rel=1e-12, abs=1e-13)


def test_variational_scaling_direction(rng):
    P = random_polytope(2, 9, rng)
    lhs, rhs, gap = variational_check(P, -2, np.ones(9))
    assert lhs == pytest.approx(1, abs=1e-8)
    assert rhs == pytest.approx(1, abs=1e-12)


def test_variational_square(sq):
    lhs, rhs, gap = variational_check(sq, -1, [1, 0, 0, 0])
    assert rhs == pytest.approx(0.25, abs=1e-14)
    assert gap <= 1e-5


@pytest.mark.parametrize("dim,m", [(2, 8), (3, 10)])
def test_variational_random(rng, dim, m):
    P = random_polytope(dim, m, rng)
    _, _, gap = variational_check(P, -2, rng.standard_normal(m))
    assert gap <= 1e-4


def test_curvature_serialization(sq):
    d = dual_curvature(sq, -1).to_dict()
    assert set(d) == {"q", "masses", "total", "rule_error"}


def test_family_regularity(sq_redundant, sq):
    # the redundant fifth facet (support 2 at the corner direction, where h = sqrt 2)
    # appears once it is pushed in by a factor exp(s) < 1/sqrt 2
    g = np.array([0, 0, 0, 0, 1.0])
    assert family_is_regular(sq_redundant, g, 1e-2)
    assert not family_is_regular(sq_redundant, -g, 0.05)
    assert family_is_regular(sq, np.ones(4), 0.1)
