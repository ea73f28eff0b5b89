"""Tests for truncated composition-operator matrices."""

import numpy as np
import pytest

from compdiff import linfrac as lf
from compdiff import operators as op
from compdiff import spaces as sp
from compdiff.errors import SeriesDivergenceError


def random_ball_point(rng, n, radius=0.5):
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z * (radius * rng.uniform() / np.linalg.norm(z))


def geometric_map():
    # z / (2 - z): Taylor coefficients 2^-m for m >= 1
    return lf.LinFracMap([[1.0]], [0.0], [-1.0], 2.0)


def test_taylor_linear_map_exact():
    A = np.array([[0.3, 0.1j], [0.0, -0.2]])
    phi = lf.LinFracMap(A, [0.05, 0.0], np.zeros(2), 1.0)
    coords = op.taylor_expand(phi, 1)
    rng = np.random.default_rng(0)
    for _ in range(20):
        z = random_ball_point(rng, 2, radius=0.9)
        out = np.array([c.evaluate(z) for c in coords])
        np.testing.assert_allclose(out, lf.apply(phi, z), atol=1e-14)


def test_taylor_geometric_series():
    coords = op.taylor_expand(geometric_map(), 10)
    vec = coords[0].vec.real
    assert vec[0] == pytest.approx(0.0, abs=1e-15)
    for m in range(1, 11):
        assert vec[m] == pytest.approx(2.0**-m, abs=1e-14)


def test_taylor_divergent_rejected():
    bad = lf.LinFracMap([[0.5]], [0.0], [2.0], 1.0)
    with pytest.raises(SeriesDivergenceError):
        op.taylor_expand(bad, 5)


def test_taylor_evaluation_within_tail_bound():
    rng = np.random.default_rng(1)
    for phi in (geometric_map(),):
        for D in (6, 10):
            coords = op.taylor_expand(phi, D)
            bound = op.taylor_tail_bound(phi, D, 0.5)
            for _ in range(200):
                z = random_ball_point(rng, 1, radius=0.5)
                err = abs(coords[0].evaluate(z) - lf.apply(phi, z)[0])
                assert err < bound


def test_pushforward_trivial_cases():
    coords = op.taylor_expand(lf.LinFracMap.identity(2), 4)
    one = op.monomial_pushforward((0, 0), coords, 4)
    assert one.vec[0] == pytest.approx(1.0)
    assert np.abs(one.vec[1:]).max() == 0.0
    z1 = op.monomial_pushforward((1, 0), coords, 4)
    assert z1.as_coefficient_vector().coeffs == {(1, 0): 1.0 + 0.0j}


def test_pushforward_matches_pointwise_power():
    rng = np.random.default_rng(2)
    phi = lf.random_automorphism(2, rng, radius=0.4)
    D = 10
    coords = op.taylor_expand(phi, D)
    alpha = (2, 1)
    poly = op.monomial_pushforward(alpha, coords, D)
    for _ in range(30):
        z = random_ball_point(rng, 2, radius=0.4)
        target = np.prod(lf.apply(phi, z) ** np.array(alpha))
        assert poly.evaluate(z) == pytest.approx(target, abs=1e-6)


def test_composition_matrix_identity():
    top = op.composition_matrix(lf.LinFracMap.identity(2), sp.SpaceSpec.hardy(2), 5)
    np.testing.assert_allclose(top.matrix, np.eye(top.size), atol=1e-14)


def test_composition_matrix_dilation_diagonal():
    top = op.composition_matrix(
        lf.LinFracMap.linear([[0.5]]), sp.SpaceSpec.hardy(1), 8
    )
    np.testing.assert_allclose(top.matrix, np.diag(0.5 ** np.arange(9)), atol=1e-14)


def test_composition_matrix_unitary_blocks():
    rng = np.random.default_rng(3)
    Z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    U = np.linalg.qr(Z)[0]
    top = op.composition_matrix(lf.LinFracMap.unitary(U), sp.SpaceSpec.hardy(2), 6)
    gram = top.matrix.conj().T @ top.matrix
    assert np.abs(gram - np.eye(top.size)).max() < 1e-10


def test_composition_matrix_parallel_matches_serial():
    rng = np.random.default_rng(4)
    phi = lf.random_automorphism(2, rng, radius=0.5)
    space = sp.SpaceSpec.hardy(2)
    a = op.composition_matrix(phi, space, 7).matrix
    b = op.composition_matrix(phi, space, 7, parallel=True).matrix
    assert np.abs(a - b).max() < 1e-13


def test_adjoint_kernel_residual_decreases():
    rng = np.random.default_rng(5)
    for space in (sp.SpaceSpec.hardy(2), sp.SpaceSpec.bergman(2, 1.0)):
        for _ in range(4):
            phi = lf.random_automorphism(2, rng, radius=0.5)
            z = random_ball_point(rng, 2, radius=0.7)
            errs = []
            for D in (6, 10, 14):
                top = op.composition_matrix(phi, space, D)
                errs.append(op.adjoint_kernel_residual(top, phi, z))
            assert errs[0] > errs[1] > errs[2]


def test_composition_matrix_functoriality_on_leading_block():
    # C_{phi o psi} = C_psi C_phi up to truncation on the leading block
    rng = np.random.default_rng(6)
    space = sp.SpaceSpec.hardy(2)
    phi = lf.random_automorphism(2, rng, radius=0.4)
    psi = lf.random_automorphism(2, rng, radius=0.4)
    D = 10
    M_comp = op.composition_matrix(lf.compose(phi, psi), space, D).matrix
    M_prod = (
        op.composition_matrix(psi, space, D).matrix
        @ op.composition_matrix(phi, space, D).matrix
    )
    nb = len(sp.multi_indices(2, D // 2))
    assert np.abs((M_comp - M_prod)[:nb, :nb]).max() < 1e-5


def test_kernel_difference_norm_basics():
    space = sp.SpaceSpec.hardy(2)
    rng = np.random.default_rng(7)
    phi = lf.random_automorphism(2, rng, radius=0.5)
    z = random_ball_point(rng, 2, radius=0.6)
    assert op.kernel_difference_norm(phi, phi, z, space) == pytest.approx(0.0, abs=1e-12)


def test_kernel_difference_lower_bound_identity():
    # the closed form minus the stated lower bound is exactly ratio2^beta
    space = sp.SpaceSpec.bergman(2, 0.5)
    beta = sp.kernel_exponent(space)
    rng = np.random.default_rng(8)
    for _ in range(20):
        phi = lf.random_automorphism(2, rng, radius=0.6)
        psi = lf.random_automorphism(2, rng, radius=0.6)
        z = random_ball_point(rng, 2, radius=0.8)
        fz, gz = lf.apply(phi, z), lf.apply(psi, z)
        one_minus = 1 - np.linalg.norm(z) ** 2
        r1 = one_minus / (1 - np.linalg.norm(fz) ** 2)
        r2 = one_minus / (1 - np.linalg.norm(gz) ** 2)
        q = one_minus / (1 - np.vdot(fz, gz))
        bound = r1**beta - 2 * np.real(np.exp(beta * np.log(q)))
        val = op.kernel_difference_norm(phi, psi, z, space)
        assert val - bound == pytest.approx(r2**beta, rel=1e-10)


def test_kernel_consistency_with_matrices():
    # the closed-form difference quantity is reproduced by the truncated
    # matrices acting on truncated kernel vectors as D grows
    space = sp.SpaceSpec.hardy(2)
    rng = np.random.default_rng(9)
    phi = lf.random_automorphism(2, rng, radius=0.45)
    psi = lf.random_automorphism(2, rng, radius=0.45)
    z = random_ball_point(rng, 2, radius=0.5)
    target = op.kernel_difference_norm(phi, psi, z, space)
    errs = []
    for D in (6, 10, 14):
        Mp = op.composition_matrix(phi, space, D).matrix
        Mq = op.composition_matrix(psi, space, D).matrix
        kz = op.normalized_kernel_vector(space, z, D)
        errs.append(abs(np.linalg.norm((Mp - Mq).conj().T @ kz) ** 2 - target))
    assert errs[2] < errs[0]
    assert errs[2] < 1e-6


def test_difference_singular_values_diagonal():
    space = sp.SpaceSpec.hardy(1)
    svals = op.difference_singular_values(
        lf.LinFracMap.linear([[0.5]]), lf.LinFracMap.linear([[1 / 3]]), space, 14, 12
    )
    expected = np.sort(np.abs(0.5 ** np.arange(15) - (1 / 3) ** np.arange(15)))[::-1]
    np.testing.assert_allclose(svals, expected[:12], atol=1e-14)


def test_difference_singular_values_equal_maps():
    space = sp.SpaceSpec.hardy(2)
    rng = np.random.default_rng(10)
    phi = lf.random_automorphism(2, rng, radius=0.5)
    svals = op.difference_singular_values(phi, phi, space, 8, 5)
    assert np.all(svals == 0.0)


def test_singular_value_geometric_decay():
    # contractive maps produce at least geometric singular-value decay
    space = sp.SpaceSpec.hardy(1)
    phi = lf.LinFracMap.linear([[0.5]])
    psi = lf.LinFracMap.linear([[1 / 3]])
    svals = op.difference_singular_values(phi, psi, space, 14, 14)
    rate = 0.5 + 0.05
    for k in range(2, 14):
        assert svals[k] <= svals[1] * rate ** (k - 1) + 1e-12
