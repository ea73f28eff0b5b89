"""Tests for the weighted Hardy space machinery.

The norm formulas are checked against measure-theoretic oracles that
never touch the Gamma-function code path: Monte-Carlo integration over
the sphere for Hardy norms, and the same sphere integrals combined with
one-dimensional radial quadrature for the Bergman weights.
"""

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gammaln

from compdiff import spaces as sp
from compdiff.errors import GeometryDomainError


def mc_hardy_norm_sq(alpha, dim, samples):
    """Monte-Carlo value of the sphere integral of |z^alpha|^2."""
    mods = np.abs(samples) ** 2
    vals = np.ones(samples.shape[0])
    for j, a in enumerate(alpha):
        if a:
            vals = vals * mods[:, j] ** a
    return float(np.mean(vals))


def quad_bergman_factor(dim, s, gamma):
    """Radial quadrature factor converting a sphere integral of a
    degree-s monomial into the weighted ball integral."""
    wconst = np.exp(gammaln(dim + gamma + 1) - gammaln(dim + 1) - gammaln(gamma + 1))
    integrand = lambda r: r ** (2 * dim + 2 * s - 1) * (1 - r * r) ** gamma
    val, _ = quad(integrand, 0.0, 1.0)
    return 2 * dim * wconst * val


def test_monomial_norms_against_integration_oracles():
    rng = np.random.default_rng(100)
    for dim in (1, 2, 3):
        samples = sp.sphere_samples(dim, 200_000, rng)
        for alpha in sp.multi_indices(dim, 3):
            mc = mc_hardy_norm_sq(alpha, dim, samples)
            closed = sp.monomial_norm_sq(alpha, sp.SpaceSpec.hardy(dim))
            assert closed == pytest.approx(mc, rel=2e-2)
            for gamma in (0.0, 1.0):
                closed_b = sp.monomial_norm_sq(alpha, sp.SpaceSpec.bergman(dim, gamma))
                oracle = mc * quad_bergman_factor(dim, sum(alpha), gamma)
                assert closed_b == pytest.approx(oracle, rel=2e-2)


def test_specific_norm_values():
    assert sp.monomial_norm_sq((1, 0), sp.SpaceSpec.hardy(2)) == pytest.approx(0.5)
    assert sp.monomial_norm_sq((2,), sp.SpaceSpec.bergman(1, 0.0)) == pytest.approx(1 / 3)
    for space in (
        sp.SpaceSpec.hardy(3),
        sp.SpaceSpec.bergman(3, 0.5),
        sp.SpaceSpec.weighted_hardy(3, sp.equivalent_weight(0.5, 3).weights),
    ):
        assert sp.monomial_norm_sq((0, 0, 0), space) == pytest.approx(1.0)


def test_monomial_orthogonality_monte_carlo():
    # the Gram matrix of low-degree monomials is diagonal: distinct
    # multi-indices integrate to 0 against each other on the sphere
    rng = np.random.default_rng(101)
    dim = 2
    samples = sp.sphere_samples(dim, 100_000, rng)
    idx = sp.multi_indices(dim, 2)
    monos = np.stack(
        [np.prod(samples ** np.array(a), axis=1) for a in idx], axis=1
    )
    gram = monos.conj().T @ monos / samples.shape[0]
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() < 5e-3


def test_no_overflow_at_high_degree():
    val = sp.monomial_norm_sq((300, 0), sp.SpaceSpec.hardy(2))
    assert 0.0 < val < 1.0
    val_b = sp.monomial_norm_sq((300,), sp.SpaceSpec.bergman(1, 2.0))
    assert 0.0 < val_b < 1.0


def test_equivalent_weight_hardy_limit():
    eq = sp.equivalent_weight(-1.0, 3)
    for s in range(0, 50, 7):
        assert eq.weights.beta_sq(s) == pytest.approx(1.0)
    assert eq.lower == eq.upper == 1.0


def test_equivalent_weight_ratio_bounded():
    # K = N: the H^2(beta) and Bergman monomial norms differ by a ratio
    # (independent of the multi-index) that stays within the bounds
    for dim in (1, 2, 3):
        for gamma in (0.0, 0.5, 2.0):
            eq = sp.equivalent_weight(gamma, dim)
            wspace = sp.SpaceSpec.weighted_hardy(dim, eq.weights)
            bspace = sp.SpaceSpec.bergman(dim, gamma)
            for s in range(0, 201, 10):
                alpha = (s,) + (0,) * (dim - 1)
                ratio = sp.monomial_norm_sq(alpha, wspace) / sp.monomial_norm_sq(
                    alpha, bspace
                )
                assert eq.lower - 1e-12 <= ratio <= eq.upper + 1e-12
            assert eq.lower > 0


def test_equivalent_weight_small_dim_sandwich():
    # K < N: the factorial ratio times (s+1)^(N-K) sits between the
    # stated constants for all s up to 200
    for (N, K) in ((2, 1), (3, 1), (3, 2)):
        eq = sp.equivalent_weight(0.0, N, K)
        hi = np.exp(gammaln(N) - gammaln(K))
        lo = hi * (N + 1.0) ** (-(N - K))
        assert eq.upper == pytest.approx(hi)
        assert eq.lower == pytest.approx(lo)
        for s in range(201):
            q = np.exp(sp._log_factorial_ratio(N, K, s)) * (s + 1.0) ** (N - K)
            assert lo - 1e-12 <= q <= hi + 1e-12


def test_equivalent_weight_k_less_n_is_bergman_shift():
    # H^2(tilde-beta, B_K) matches A^2_{N-K+gamma}(B_K) up to bounded ratio
    N, K, gamma = 3, 2, 0.5
    eq = sp.equivalent_weight(gamma, N, K)
    wspace = sp.SpaceSpec.weighted_hardy(K, eq.weights)
    bspace = sp.SpaceSpec.bergman(K, N - K + gamma)
    ratios = []
    for s in range(0, 120, 5):
        alpha = (s, 0)
        ratios.append(
            sp.monomial_norm_sq(alpha, wspace) / sp.monomial_norm_sq(alpha, bspace)
        )
    assert max(ratios) / min(ratios) < 50


def test_equivalent_weight_domain_errors():
    with pytest.raises(GeometryDomainError):
        sp.equivalent_weight(-1.5, 2)
    with pytest.raises(GeometryDomainError):
        sp.equivalent_weight(0.0, 2, 3)


def random_coefficients(rng, dim, degree, count=None):
    idx = sp.multi_indices(dim, degree)
    coeffs = {
        a: complex(rng.standard_normal(), rng.standard_normal()) for a in idx
    }
    return sp.CoefficientVector(coeffs, dim, degree)


def test_extension_isometry_exact():
    rng = np.random.default_rng(102)
    for N, K in ((2, 1), (3, 1), (3, 2)):
        beta = sp.equivalent_weight(0.7, N).weights
        tilde = sp.tilde_weight(beta, N, K)
        big = sp.SpaceSpec.weighted_hardy(N, beta)
        small = sp.SpaceSpec.weighted_hardy(K, tilde)
        for _ in range(25):
            f = random_coefficients(rng, K, 10)
            F = sp.extend(f, N)
            assert F.norm_sq(big) == pytest.approx(f.norm_sq(small), rel=1e-12)
            got = sp.restrict(F, K)
            assert got.coeffs == f.coeffs


def test_restriction_contraction():
    rng = np.random.default_rng(103)
    N, K = 3, 2
    beta = sp.WeightSequence(rule=lambda s: 1.0 / (1.0 + s), label="test")
    tilde = sp.tilde_weight(beta, N, K)
    big = sp.SpaceSpec.weighted_hardy(N, beta)
    small = sp.SpaceSpec.weighted_hardy(K, tilde)
    for _ in range(25):
        F = random_coefficients(rng, N, 8)
        R = sp.restrict(F, K)
        assert R.norm_sq(small) <= F.norm_sq(big) + 1e-12
    # equality exactly when the support is already padded
    f = random_coefficients(rng, K, 8)
    F = sp.extend(f, N)
    assert sp.restrict(F, K).norm_sq(small) == pytest.approx(F.norm_sq(big), rel=1e-12)


def test_restriction_kills_transverse_support():
    F = sp.CoefficientVector({(1, 0, 1): 2.0, (0, 2, 0): 1.0}, 3, 4)
    R = sp.restrict(F, 2)
    assert R.coeffs == {(0, 2): 1.0}
    G = sp.CoefficientVector({(0, 0, 1): 1.0, (1, 1, 2): -2.0}, 3, 4)
    assert sp.restrict(G, 2).coeffs == {}


def test_kernel_values():
    space = sp.SpaceSpec.hardy(2)
    w = np.array([0.3 + 0.2j, -0.4j])
    assert sp.kernel_eval(space, np.zeros(2), np.array([0.5, 0.5])) == pytest.approx(1.0)
    assert sp.kernel_norm_sq(space, w) == pytest.approx(
        (1 - np.linalg.norm(w) ** 2) ** -2.0
    )
    bspace = sp.SpaceSpec.bergman(2, 1.0)
    assert sp.kernel_norm_sq(bspace, w) == pytest.approx(
        (1 - np.linalg.norm(w) ** 2) ** -4.0
    )


def test_kernel_reproducing_property():
    rng = np.random.default_rng(104)
    for space in (sp.SpaceSpec.hardy(2), sp.SpaceSpec.bergman(2, 0.0)):
        for _ in range(10):
            f = random_coefficients(rng, 2, 8)
            w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            w *= rng.uniform(0.1, 0.6) / np.linalg.norm(w)
            kc = sp.kernel_coefficients(space, w, 8)
            inner = sum(
                c * np.conj(kc[a]) * sp.monomial_norm_sq(a, space)
                for a, c in f.items()
            )
            assert inner == pytest.approx(f.evaluate(w), abs=1e-8)


def test_kernel_expansion_tail():
    # truncation error of the kernel expansion stays within a small
    # multiple of the geometric tail bound
    space = sp.SpaceSpec.hardy(2)
    rng = np.random.default_rng(105)
    c = sp.kernel_exponent(space)
    for _ in range(20):
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        z *= 0.5 / np.linalg.norm(z)
        w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        w *= 0.6 / np.linalg.norm(w)
        D = 12
        approx = sp.kernel_coefficients(space, w, D).evaluate(z)
        exact = sp.kernel_eval(space, w, z)
        r = np.linalg.norm(z) * np.linalg.norm(w)
        # binomial growth factor (D+2)^(c-1) covers the polynomial part
        tail = r ** (D + 1) * (1 - r) ** (-c) * (D + 2) ** (c - 1)
        assert abs(approx - exact) <= 10 * tail


def test_weighted_hardy_kernel_closed_form_rejected():
    w = sp.equivalent_weight(0.0, 2).weights
    with pytest.raises(GeometryDomainError):
        sp.kernel_exponent(sp.SpaceSpec.weighted_hardy(2, w))


def test_sphere_samples_moments():
    rng = np.random.default_rng(106)
    pts = sp.sphere_samples(3, 100_000, rng)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    # E|z_1|^2 = 1/3 on the sphere of C^3
    assert np.mean(np.abs(pts[:, 0]) ** 2) == pytest.approx(1 / 3, rel=2e-2)


def test_graded_lex_order():
    idx = sp.multi_indices(2, 2)
    assert idx == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))
    idx3 = sp.multi_indices(3, 1)
    assert idx3 == ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1))
