"""Tests for the ball / half-space geometry."""

import numpy as np
import pytest

from compdiff import geometry as geo
from compdiff.errors import GeometryDomainError, PoleError
from compdiff.linfrac import apply, random_automorphism


def random_ball_point(rng, n, radius=0.95):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z * (radius * rng.uniform() / np.linalg.norm(z))


def test_rho_identity_and_origin():
    rng = np.random.default_rng(0)
    for n in (1, 2, 3):
        z = random_ball_point(rng, n)
        # the radicand is a difference of independently rounded squares,
        # so coincident points come out at sqrt(eps) rather than exactly 0
        assert geo.pseudo_hyperbolic_distance(z, z) == pytest.approx(0.0, abs=1e-7)
        w = random_ball_point(rng, n)
        assert geo.pseudo_hyperbolic_distance(np.zeros(n), w) == pytest.approx(
            np.linalg.norm(w), abs=1e-14
        )


def test_rho_disk_formula():
    # the two defining expressions agree in one variable
    rng = np.random.default_rng(1)
    for _ in range(200):
        z = random_ball_point(rng, 1)
        w = random_ball_point(rng, 1)
        disk = abs((z[0] - w[0]) / (1 - np.conj(z[0]) * w[0]))
        assert geo.pseudo_hyperbolic_distance(z, w) == pytest.approx(disk, abs=1e-13)
    assert geo.pseudo_hyperbolic_distance([0.5], [-0.5]) == pytest.approx(0.8, abs=1e-15)


def test_rho_symmetry():
    rng = np.random.default_rng(2)
    for _ in range(100):
        z = random_ball_point(rng, 2)
        w = random_ball_point(rng, 2)
        assert geo.pseudo_hyperbolic_distance(z, w) == pytest.approx(
            geo.pseudo_hyperbolic_distance(w, z), abs=1e-14
        )


def test_rho_degenerate_boundary_pair():
    with pytest.raises(GeometryDomainError):
        geo.pseudo_hyperbolic_distance([1.0, 0.0], [1.0, 0.0])


def test_rho_automorphism_invariance():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        aut = random_automorphism(n, rng)
        for _ in range(50):
            z = random_ball_point(rng, n)
            w = random_ball_point(rng, n)
            d0 = geo.pseudo_hyperbolic_distance(z, w)
            d1 = geo.pseudo_hyperbolic_distance(apply(aut, z), apply(aut, w))
            assert abs(d0 - d1) < 1e-10


def test_ball_point_constructor_rejects_boundary():
    geo.ball_point([0.5, 0.5])
    with pytest.raises(GeometryDomainError):
        geo.ball_point([1.0, 0.0])
    with pytest.raises(GeometryDomainError):
        geo.ball_point([1.0 - 1e-13, 0.0])


def test_cayley_basics():
    w = geo.cayley([0.0, 0.0])
    np.testing.assert_allclose(w, [1j, 0.0], atol=1e-15)
    assert geo.cayley_inverse([1j, 0.0]) == pytest.approx([0.0, 0.0], abs=1e-15)
    with pytest.raises(PoleError):
        geo.cayley([1.0, 0.0])
    with pytest.raises(PoleError):
        geo.cayley_inverse([-1j])


def test_cayley_roundtrip():
    rng = np.random.default_rng(4)
    for n in (1, 2, 3):
        for _ in range(100):
            z = random_ball_point(rng, n)
            back = geo.cayley_inverse(geo.cayley(z))
            assert np.linalg.norm(back - z) < 1e-12


def test_cayley_interior_to_interior():
    rng = np.random.default_rng(5)
    for _ in range(100):
        z = random_ball_point(rng, 2)
        assert geo.siegel_height(geo.cayley(z)) > 0.0


def test_siegel_height_and_translations():
    assert geo.siegel_height([1j]) == pytest.approx(1.0)
    assert geo.siegel_height([1j, 0.0]) == pytest.approx(1.0)
    rng = np.random.default_rng(6)
    for _ in range(50):
        b1 = complex(rng.standard_normal(), rng.uniform(0.5, 2.0))
        bp = 0.3 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        if b1.imag < np.linalg.norm(bp) ** 2:
            b1 += 1j * np.linalg.norm(bp) ** 2
        h = geo.HTranslation(b1, bp)
        w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        # exact height shift Im b1 - |b'|^2 for every w
        shift = geo.siegel_height(geo.h_translate(h, w)) - geo.siegel_height(w)
        assert shift == pytest.approx(h.defect, abs=1e-12)


def test_h_translation_zero_is_identity():
    h = geo.HTranslation(0.0, np.zeros(2))
    w = np.array([2 + 3j, 0.1, -0.2j])
    np.testing.assert_allclose(geo.h_translate(h, w), w)
    assert h.is_automorphism


def test_h_translation_gamma_shift():
    # b = (i, 0'): height-1 lift, Gamma_k into Gamma_{k+1}
    h = geo.HTranslation(1j, np.zeros(1))
    w = np.array([0.7 + 1j * (2.0 + 0.09), 0.3])  # on Gamma_2
    assert geo.siegel_height(w) == pytest.approx(2.0)
    assert geo.siegel_height(geo.h_translate(h, w)) == pytest.approx(3.0)


def test_h_translation_selfmap_condition():
    with pytest.raises(GeometryDomainError):
        geo.HTranslation(0.0, np.array([0.5]))


def test_automorphic_translation_preserves_siegel_metric():
    rng = np.random.default_rng(7)
    for _ in range(20):
        bp = 0.4 * (rng.standard_normal(1) + 1j * rng.standard_normal(1))
        h = geo.HTranslation(
            complex(rng.standard_normal(), np.linalg.norm(bp) ** 2), bp
        )
        assert h.is_automorphism
        u = geo.cayley(random_ball_point(rng, 2))
        v = geo.cayley(random_ball_point(rng, 2))
        d0 = geo.pseudo_hyperbolic_distance_siegel(u, v)
        d1 = geo.pseudo_hyperbolic_distance_siegel(
            geo.h_translate(h, u), geo.h_translate(h, v)
        )
        assert abs(d0 - d1) < 1e-10


def test_siegel_metric_matches_pullback():
    rng = np.random.default_rng(8)
    for n in (1, 2, 3):
        for _ in range(30):
            u = geo.cayley(random_ball_point(rng, n))
            v = geo.cayley(random_ball_point(rng, n))
            pulled = geo.pseudo_hyperbolic_distance(
                geo.cayley_inverse(u), geo.cayley_inverse(v)
            )
            assert geo.pseudo_hyperbolic_distance_siegel(u, v) == pytest.approx(
                pulled, abs=1e-12
            )


def test_siegel_metric_halfplane_formula():
    # one variable: rho_H(u, v) = |u - v| / |u - conj(v)|
    rng = np.random.default_rng(9)
    for _ in range(100):
        u = np.array([complex(rng.standard_normal(), rng.uniform(0.1, 3))])
        v = np.array([complex(rng.standard_normal(), rng.uniform(0.1, 3))])
        expected = abs(u[0] - v[0]) / abs(u[0] - np.conj(v[0]))
        assert geo.pseudo_hyperbolic_distance_siegel(u, v) == pytest.approx(
            expected, abs=1e-13
        )


def test_ellipsoid_membership_tangency_and_vertex():
    for k in (0.1, 1.0, 10.0):
        spec = geo.EllipsoidSpec(k)
        assert geo.ellipsoid_membership(spec, [1.0, 0.0]) == pytest.approx(0.0, abs=1e-14)
        vertex = np.array([(k - 1) / (k + 1), 0.0])
        assert geo.ellipsoid_membership(spec, vertex) == pytest.approx(0.0, abs=1e-14)


def test_ellipsoid_two_forms_agree():
    # membership = k/(1+k) * alternative residual, identically
    rng = np.random.default_rng(10)
    for _ in range(200):
        k = float(rng.uniform(0.05, 20))
        spec = geo.EllipsoidSpec(k)
        z = random_ball_point(rng, 3)
        lhs = geo.ellipsoid_membership(spec, z)
        rhs = geo.ellipsoid_membership_alt(spec, z) * k / (1 + k)
        assert lhs == pytest.approx(rhs, abs=1e-12)


def test_gamma_k_pullback_lands_on_ellipsoid():
    rng = np.random.default_rng(11)
    for k in (0.1, 1.0, 10.0):
        spec = geo.EllipsoidSpec(k)
        for _ in range(200):
            t = float(rng.uniform(-100, 100))
            wp = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            z = geo.ellipsoid_point(k, t, wp)
            assert abs(geo.ellipsoid_membership(spec, z)) < 1e-10
            w = geo.cayley(z)
            assert geo.siegel_height(w) == pytest.approx(k, abs=1e-9)


def test_pullback_points_tend_to_e1():
    c = np.array([0.4 - 0.1j])
    k = 1.0
    last = np.inf
    for t in (10.0, 100.0, 1e3, 1e4, 1e5, 1e6):
        z = geo.ellipsoid_point(k, t, c)
        dist = np.linalg.norm(z - geo.e1(2))
        assert dist < last
        last = dist
    assert last < 1e-3


def test_siegel_point_validation():
    geo.siegel_point([1j, 0.2])
    with pytest.raises(GeometryDomainError):
        geo.siegel_point([0.5, 0.2])
