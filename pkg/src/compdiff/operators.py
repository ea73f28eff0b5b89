"""Truncated-operator machinery for composition operators.

Multivariate Taylor expansion of linear-fractional maps, matrices of
C_phi on the orthonormalized monomial basis up to a total degree cap,
closed-form adjoint-kernel quantities, and singular values of truncated
differences.

Representation: a truncated polynomial is a dense complex vector over the
graded-lexicographic multi-index list of ``spaces.multi_indices``.  The
degree-capped product is a precomputed sparse convolution; it is the hot
spot of matrix assembly (quadratic in the basis size) but entirely
adequate at desk scale (N <= 3, D <= 16).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GeometryDomainError, SeriesDivergenceError
from .geometry import as_cvector, herm
from .linfrac import LinFracMap, apply
from .spaces import (
    CoefficientVector,
    SpaceSpec,
    index_order,
    kernel_exponent,
    monomial_norm_sq,
    multi_indices,
)


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    """Graded-lex multi-index basis with its degree-capped product table."""

    dim: int
    degree: int
    indices: tuple
    positions: dict
    mul_i: np.ndarray
    mul_j: np.ndarray
    mul_k: np.ndarray

    @property
    def size(self) -> int:
        return len(self.indices)


@lru_cache(maxsize=None)
def monomial_basis(dim: int, degree: int) -> MonomialBasis:
    indices = multi_indices(dim, degree)
    positions = {a: i for i, a in enumerate(indices)}
    mi, mj, mk = [], [], []
    for i, a in enumerate(indices):
        da = index_order(a)
        for j, b in enumerate(indices):
            if da + index_order(b) > degree:
                continue
            mi.append(i)
            mj.append(j)
            mk.append(positions[tuple(x + y for x, y in zip(a, b))])
    return MonomialBasis(
        dim=dim,
        degree=degree,
        indices=indices,
        positions=positions,
        mul_i=np.array(mi, dtype=np.intp),
        mul_j=np.array(mj, dtype=np.intp),
        mul_k=np.array(mk, dtype=np.intp),
    )


@dataclass(frozen=True, eq=False)
class TruncatedPolynomial:
    """Dense coefficient vector over a MonomialBasis."""

    basis: MonomialBasis
    vec: np.ndarray

    @classmethod
    def zero(cls, basis: MonomialBasis) -> "TruncatedPolynomial":
        return cls(basis, np.zeros(basis.size, dtype=complex))

    @classmethod
    def constant(cls, basis: MonomialBasis, value: complex) -> "TruncatedPolynomial":
        v = np.zeros(basis.size, dtype=complex)
        v[0] = value
        return cls(basis, v)

    @classmethod
    def from_dict(cls, basis: MonomialBasis, coeffs: dict) -> "TruncatedPolynomial":
        v = np.zeros(basis.size, dtype=complex)
        for a, c in coeffs.items():
            v[basis.positions[tuple(a)]] = c
        return cls(basis, v)

    def __add__(self, other: "TruncatedPolynomial") -> "TruncatedPolynomial":
        return TruncatedPolynomial(self.basis, self.vec + other.vec)

    def __mul__(self, other):
        if isinstance(other, TruncatedPolynomial):
            return poly_mul(self, other)
        return TruncatedPolynomial(self.basis, self.vec * other)

    __rmul__ = __mul__

    def evaluate(self, z) -> complex:
        z = as_cvector(z)
        total = 0.0 + 0.0j
        for a, c in zip(self.basis.indices, self.vec):
            if c != 0:
                total += c * np.prod([zj**e for zj, e in zip(z, a)])
        return complex(total)

    def as_coefficient_vector(self) -> CoefficientVector:
        coeffs = {
            a: c for a, c in zip(self.basis.indices, self.vec) if c != 0
        }
        return CoefficientVector(coeffs, self.basis.dim, self.basis.degree)


def poly_mul(p: TruncatedPolynomial, q: TruncatedPolynomial) -> TruncatedPolynomial:
    """Degree-capped product via the precomputed convolution table."""
    if p.basis is not q.basis:
        raise GeometryDomainError("polynomials live on different bases")
    b = p.basis
    out = np.zeros(b.size, dtype=complex)
    np.add.at(out, b.mul_k, p.vec[b.mul_i] * q.vec[b.mul_j])
    return TruncatedPolynomial(b, out)


# ---------------------------------------------------------------------------
# Taylor expansion of a linear-fractional map


def taylor_expand(phi: LinFracMap, degree: int) -> list:
    """Taylor coefficients of each coordinate of phi to total degree D.

    Expands 1/(<z,C> + d) = (1/d) sum_m (-<z,C>/d)^m (maps are stored
    with d = 1) and multiplies into the affine numerator.  Requires
    |d| > |C| so the series converges past the closed ball.
    """
    c_norm = float(np.linalg.norm(phi.C))
    if c_norm >= abs(phi.d):
        raise SeriesDivergenceError(
            f"|C| = {c_norm} >= |d| = {abs(phi.d)}: series diverges on the closed ball"
        )
    b = monomial_basis(phi.dim, degree)
    n = phi.dim
    if degree == 0:
        return [TruncatedPolynomial.constant(b, phi.B[j]) for j in range(n)]
    units = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    # linear form <z, C> as a polynomial
    ell = TruncatedPolynomial.from_dict(
        b, {units[j]: np.conj(phi.C[j]) for j in range(n)}
    )
    recip = TruncatedPolynomial.constant(b, 1.0)
    term = TruncatedPolynomial.constant(b, 1.0)
    if c_norm > 0:
        for _ in range(degree):
            term = poly_mul(term, ell) * (-1.0)
            if not np.any(term.vec):
                break
            recip = recip + term
    out = []
    for j in range(n):
        num = TruncatedPolynomial.from_dict(
            b,
            {
                **{units[k]: phi.A[j, k] for k in range(n)},
                (0,) * n: phi.B[j],
            },
        )
        out.append(poly_mul(num, recip))
    return out


def taylor_tail_bound(phi: LinFracMap, degree: int, r: float) -> float:
    """Cauchy-estimate bound on the truncation error of taylor_expand on |z| <= r.

    Uses an intermediate radius between r and the convergence radius
    1/|C|; crude but honest, and tight enough to test against.
    """
    c_norm = float(np.linalg.norm(phi.C))
    radius = np.inf if c_norm == 0 else 1.0 / c_norm
    if r >= radius:
        raise SeriesDivergenceError("evaluation radius beyond series convergence")
    r_mid = min(0.5 * (r + radius), r + max(1.0, r)) if np.isfinite(radius) else 2.0 * max(r, 1.0)
    sup = (np.linalg.norm(phi.A, 2) * r_mid + np.linalg.norm(phi.B)) / (
        1.0 - c_norm * r_mid if c_norm * r_mid < 1.0 else np.inf
    )
    ratio = r / r_mid
    return float(sup * ratio ** (degree + 1) / (1.0 - ratio))


def monomial_pushforward(alpha, coords: list, degree: int) -> TruncatedPolynomial:
    """Truncated product phi^alpha = prod_j phi_j^(alpha_j).

    ``coords`` is the taylor_expand output; the product is truncated to
    the basis cap after every multiplication.
    """
    alpha = tuple(int(a) for a in alpha)
    b = coords[0].basis if coords else None
    if b is None or b.degree < degree:
        raise GeometryDomainError("coordinate expansions too short for requested degree")
    out = TruncatedPolynomial.constant(b, 1.0)
    for j, a in enumerate(alpha):
        for _ in range(a):
            out = poly_mul(out, coords[j])
    return out


# ---------------------------------------------------------------------------
# composition-operator matrices


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Matrix of C_phi on the orthonormal monomials e_alpha = z^alpha/|z^alpha|,
    compressed to total degree <= degree (entries (beta, alpha))."""

    matrix: np.ndarray
    space: SpaceSpec
    degree: int
    indices: tuple

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


def composition_matrix(
    phi: LinFracMap, space: SpaceSpec, degree: int, parallel: bool = False
) -> TruncatedOperator:
    """Assemble the compressed matrix of C_phi.

    Entry (beta, alpha) is the z^beta coefficient of phi^alpha times
    |z^beta| / |z^alpha|.  The default path shares pushforward prefixes
    along the index lattice; ``parallel=True`` instead builds columns
    independently (each column is a standalone pushforward) on a thread
    pool, with the main thread as single writer.
    """
    if space.dim != phi.dim:
        raise GeometryDomainError("space/map dimension mismatch")
    b = monomial_basis(phi.dim, degree)
    coords = taylor_expand(phi, degree)
    norms = np.array([np.sqrt(monomial_norm_sq(a, space)) for a in b.indices])
    M = np.zeros((b.size, b.size), dtype=complex)
    if parallel:
        with ThreadPoolExecutor() as pool:
            cols = pool.map(
                lambda a: monomial_pushforward(a, coords, degree).vec, b.indices
            )
            for col_idx, vec in enumerate(cols):
                M[:, col_idx] = vec
    else:
        cache = {(0,) * phi.dim: TruncatedPolynomial.constant(b, 1.0)}
        for a in b.indices:
            if index_order(a) == 0:
                continue
            j = next(i for i, e in enumerate(a) if e)
            parent = tuple(e - int(i == j) for i, e in enumerate(a))
            cache[a] = poly_mul(cache[parent], coords[j])
        for col_idx, a in enumerate(b.indices):
            M[:, col_idx] = cache[a].vec
    M *= norms[:, None] / norms[None, :]
    return TruncatedOperator(matrix=M, space=space, degree=degree, indices=b.indices)


def normalized_kernel_vector(space: SpaceSpec, z, degree: int) -> np.ndarray:
    """Coordinates of K_z / |K_z| on the orthonormal basis, truncated.

    Component at alpha: conj(z^alpha) / (|z^alpha| |K_z|), with the full
    closed-form kernel norm in the denominator.
    """
    z = as_cvector(z)
    b = monomial_basis(space.dim, degree)
    c = kernel_exponent(space)
    knorm = (1.0 - np.linalg.norm(z) ** 2) ** (-c / 2.0)
    out = np.empty(b.size, dtype=complex)
    for i, a in enumerate(b.indices):
        mono = np.prod([zj**e for zj, e in zip(z, a)])
        out[i] = np.conj(mono) / np.sqrt(monomial_norm_sq(a, space)) / knorm
    return out


def adjoint_kernel_residual(top: TruncatedOperator, phi: LinFracMap, z) -> float:
    """|M* k - k'| where k, k' truncate K_z/|K_z| and K_phi(z)/|K_z|.

    Both sides carry the same normalization |K_z|, matching the exact
    identity C_phi^*(K_z) = K_phi(z); the residual is pure truncation
    error and shrinks geometrically as the degree cap grows.
    """
    z = as_cvector(z)
    space = top.space
    fz = apply(phi, z)
    c = kernel_exponent(space)
    scale = ((1.0 - np.linalg.norm(fz) ** 2) / (1.0 - np.linalg.norm(z) ** 2)) ** (-c / 2.0)
    kz = normalized_kernel_vector(space, z, top.degree)
    kfz = normalized_kernel_vector(space, fz, top.degree) * scale
    return float(np.linalg.norm(top.matrix.conj().T @ kz - kfz))


def kernel_difference_norm(
    phi: LinFracMap, psi: LinFracMap, z, space: SpaceSpec
) -> float:
    """|(C_phi - C_psi)^* (K_z / |K_z|)|^2 in closed form.

    Equals r1^beta + r2^beta - 2 Re q^beta where r1, r2 are the ratios
    (1-|z|^2)/(1-|phi(z)|^2), (1-|z|^2)/(1-|psi(z)|^2), q is the complex
    ratio (1-|z|^2)/(1-<psi(z), phi(z)>), and beta is the kernel
    exponent of the space.  No truncation is involved.
    """
    z = as_cvector(z)
    beta = kernel_exponent(space)
    fz = apply(phi, z)
    gz = apply(psi, z)
    one_minus = 1.0 - np.linalg.norm(z) ** 2
    r1 = one_minus / (1.0 - np.linalg.norm(fz) ** 2)
    r2 = one_minus / (1.0 - np.linalg.norm(gz) ** 2)
    q = one_minus / (1.0 - herm(gz, fz))
    cross = np.exp(beta * np.log(q))
    return float(r1**beta + r2**beta - 2.0 * np.real(cross))


def difference_singular_values(
    phi: LinFracMap, psi: LinFracMap, space: SpaceSpec, degree: int, m: int
) -> np.ndarray:
    """The m largest singular values of the truncated C_phi - C_psi.

    Values below 1e-12 of the largest are reported as zero.
    """
    M1 = composition_matrix(phi, space, degree).matrix
    M2 = composition_matrix(psi, space, degree).matrix
    s = np.linalg.svd(M1 - M2, compute_uv=False)
    if s.size and s[0] > 0:
        s[s < 1e-12 * s[0]] = 0.0
    return s[:m]
