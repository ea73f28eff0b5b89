"""Linear-fractional maps of the unit ball B_N.

A map z -> (A z + B) / (<z, C> + d) is stored projectively through the
(N+1) x (N+1) block matrix [[A, B], [C*, d]] acting on homogeneous
coordinates [z; 1].  Maps are kept in canonical scaling d = 1, so that
equality of maps is entrywise equality of the data.

Self-maps of the ball necessarily satisfy |d| > |C|; in particular they
are analytic in a neighborhood of the closed ball, which the truncated
Taylor machinery in :mod:`compdiff.operators` relies on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize
from scipy.special import ndtri

from .errors import (
    ClassificationError,
    GeometryDomainError,
    NotSelfMapError,
    PoleError,
    SliceReductionError,
)
from .geometry import as_cvector, ball_point, e1, herm

MAP_EQ_TOL = 1e-10
_RANK_TOL = 1e-9
_CIRCLE_TOL = 1e-10


def _read_only(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LinFracMap:
    """Projective representation (A, B, C, d) of a linear-fractional map.

    The constructor rescales so that d = 1; a vanishing d is rejected
    (ball self-maps always have |d| > |C| >= 0).
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    d: complex = 1.0

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        B = np.asarray(self.B, dtype=complex).reshape(-1)
        C = np.asarray(self.C, dtype=complex).reshape(-1)
        d = complex(self.d)
        n = A.shape[0]
        if A.shape != (n, n) or B.shape != (n,) or C.shape != (n,):
            raise GeometryDomainError(
                f"inconsistent shapes A{A.shape} B{B.shape} C{C.shape}"
            )
        if d == 0:
            raise GeometryDomainError("projective representative has d = 0")
        object.__setattr__(self, "A", _read_only(A / d))
        object.__setattr__(self, "B", _read_only(B / d))
        object.__setattr__(self, "C", _read_only(C / np.conj(d)))
        object.__setattr__(self, "d", 1.0 + 0.0j)

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def __call__(self, z) -> np.ndarray:
        return apply(self, z)

    @classmethod
    def identity(cls, n: int) -> "LinFracMap":
        return cls(np.eye(n), np.zeros(n), np.zeros(n), 1.0)

    @classmethod
    def unitary(cls, U) -> "LinFracMap":
        U = np.atleast_2d(np.asarray(U, dtype=complex))
        if np.linalg.norm(U @ U.conj().T - np.eye(U.shape[0])) > 1e-10:
            raise GeometryDomainError("matrix is not unitary")
        return cls(U, np.zeros(U.shape[0]), np.zeros(U.shape[0]), 1.0)

    @classmethod
    def linear(cls, A) -> "LinFracMap":
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        return cls(A, np.zeros(A.shape[0]), np.zeros(A.shape[0]), 1.0)


def projective_matrix(phi: LinFracMap) -> np.ndarray:
    """The (N+1) x (N+1) block matrix [[A, B], [C*, d]]."""
    n = phi.dim
    T = np.zeros((n + 1, n + 1), dtype=complex)
    T[:n, :n] = phi.A
    T[:n, n] = phi.B
    T[n, :n] = np.conj(phi.C)
    T[n, n] = phi.d
    return T


def from_projective_matrix(T) -> LinFracMap:
    T = np.asarray(T, dtype=complex)
    n = T.shape[0] - 1
    return LinFracMap(T[:n, :n], T[:n, n], np.conj(T[n, :n]), T[n, n])


def apply(phi: LinFracMap, z) -> np.ndarray:
    """Evaluate (A z + B) / (<z, C> + d)."""
    z = as_cvector(z)
    if z.size != phi.dim:
        raise GeometryDomainError(f"point dim {z.size} != map dim {phi.dim}")
    q = herm(z, phi.C) + phi.d
    scale = np.linalg.norm(z) * np.linalg.norm(phi.C) + abs(phi.d)
    if abs(q) <= 1e-14 * max(scale, 1.0):
        raise PoleError(f"denominator vanishes at z = {z}")
    return (phi.A @ z + phi.B) / q


def compose(phi: LinFracMap, psi: LinFracMap) -> LinFracMap:
    """The map phi o psi, via the projective matrix product."""
    if phi.dim != psi.dim:
        raise GeometryDomainError("dimension mismatch")
    return from_projective_matrix(projective_matrix(phi) @ projective_matrix(psi))


def maps_equal(phi: LinFracMap, psi: LinFracMap, tol: float = MAP_EQ_TOL) -> bool:
    """Entrywise equality after canonical scaling."""
    return map_distance(phi, psi) <= tol


def map_distance(phi: LinFracMap, psi: LinFracMap) -> float:
    """Max-abs entrywise distance of the canonical representatives."""
    if phi.dim != psi.dim:
        raise GeometryDomainError("dimension mismatch")
    return float(
        np.abs(projective_matrix(phi) - projective_matrix(psi)).max()
    )


def krein_adjoint(phi: LinFracMap) -> LinFracMap:
    """The Krein adjoint sigma(z) = (A* z - C) / (<z, -B> + conj(d)).

    A self-map of the ball whenever phi is.  For an automorphism the
    adjoint is the inverse map, and in general phi and its adjoint share
    their boundary fixed points.
    """
    return LinFracMap(phi.A.conj().T, -phi.C, -phi.B, np.conj(phi.d))


def jacobian(phi: LinFracMap, z) -> np.ndarray:
    """Complex Jacobian matrix of phi at z."""
    z = as_cvector(z)
    q = herm(z, phi.C) + phi.d
    if abs(q) <= 1e-14:
        raise PoleError("jacobian at a pole")
    num = phi.A @ z + phi.B
    return phi.A / q - np.outer(num, np.conj(phi.C)) / q**2


def directional_derivative(phi: LinFracMap, z, eta, zeta) -> complex:
    """D_eta phi_zeta(z) = <phi'(z) eta, zeta>."""
    return herm(jacobian(phi, z) @ as_cvector(eta), as_cvector(zeta))


def boundary_derivative(phi: LinFracMap, zeta) -> complex:
    """D_zeta phi_zeta(zeta) = <phi'(zeta) zeta, zeta> at a boundary point."""
    zeta = as_cvector(zeta)
    return directional_derivative(phi, zeta, zeta, zeta)


# ---------------------------------------------------------------------------
# sup-norm over the sphere


class SupNormResult(NamedTuple):
    value: float
    maximizer: np.ndarray


def _kronecker_sphere_lattice(n: int, count: int) -> np.ndarray:
    """Deterministic low-discrepancy sample of the unit sphere in C^n.

    A rank-1 Kronecker lattice in [0,1)^{2n} (generalized golden ratio
    generator) pushed to the sphere through the inverse normal CDF.
    """
    if n == 1:
        angles = 2.0 * np.pi * np.arange(count) / count
        return np.exp(1j * angles)[:, None]
    d = 2 * n
    # generalized golden ratio: unique positive root of x**(d+1) = x + 1
    g = 1.5
    for _ in range(60):
        g = (1.0 + g) ** (1.0 / (d + 1))
    alphas = np.mod(1.0 / g ** np.arange(1, d + 1), 1.0)
    idx = np.arange(1, count + 1)[:, None]
    u = np.mod(0.5 + idx * alphas[None, :], 1.0)
    gauss = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    pts = gauss[:, :n] + 1j * gauss[:, n:]
    norms = np.linalg.norm(pts, axis=1)
    norms[norms == 0] = 1.0
    return pts / norms[:, None]


def _modulus_sq_on_sphere(phi: LinFracMap, pts: np.ndarray) -> np.ndarray:
    q = pts @ np.conj(phi.C) + phi.d
    num = pts @ phi.A.T + phi.B
    return np.sum(np.abs(num) ** 2, axis=1) / np.abs(q) ** 2


def _polish_maximizer(phi: LinFracMap, zeta0: np.ndarray) -> tuple[float, np.ndarray]:
    n = phi.dim

    def neg_and_grad(x):
        zc = x[:n] + 1j * x[n:]
        r = np.linalg.norm(zc)
        zeta = zc / r
        val = apply(phi, zeta)
        J = jacobian(phi, zeta)
        g = J.T @ np.conj(val)  # dF = 2 Re <g, dz>
        grad_sphere = np.concatenate([2.0 * np.real(g), -2.0 * np.imag(g)])
        xhat = np.concatenate([np.real(zeta), np.imag(zeta)])
        grad = (grad_sphere - xhat * (xhat @ grad_sphere)) / r
        return -float(np.sum(np.abs(val) ** 2)), -grad

    x0 = np.concatenate([np.real(zeta0), np.imag(zeta0)])
    res = minimize(
        neg_and_grad,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": 300, "ftol": 1e-18, "gtol": 1e-14},
    )
    zc = res.x[:n] + 1j * res.x[n:]
    zeta = zc / np.linalg.norm(zc)
    return float(np.linalg.norm(apply(phi, zeta))), zeta


def sup_norm(phi: LinFracMap, lattice_factor: int = 2000) -> SupNormResult:
    """Maximum of |phi| over the unit sphere, with the maximizing point.

    Coarse Kronecker-lattice sampling (lattice_factor * N points) followed
    by a projected-gradient polish of the best candidates.  A refined
    maximum above 1 - 1e-9 is reported as exactly 1; above 1 + 1e-9 the
    map is rejected as not a self-map.
    """
    if np.linalg.norm(phi.C) >= abs(phi.d):
        raise NotSelfMapError("|d| <= |C|: map is not analytic on the closed ball")
    pts = _kronecker_sphere_lattice(phi.dim, lattice_factor * phi.dim)
    vals = _modulus_sq_on_sphere(phi, pts)
    order = np.argsort(vals)[::-1]
    best_val, best_zeta = -np.inf, pts[order[0]]
    for i in order[:3]:
        v, zeta = _polish_maximizer(phi, pts[i])
        if v > best_val:
            best_val, best_zeta = v, zeta
    if best_val > 1.0 + 1e-9:
        raise NotSelfMapError(f"sup |phi| = {best_val} > 1: not a self-map")
    if best_val > 1.0 - 1e-9:
        best_val = 1.0
    return SupNormResult(best_val, best_zeta)


def is_self_map(phi: LinFracMap) -> bool:
    """True iff |d| > |C| and the refined sup-norm is at most 1 + 1e-9."""
    if np.linalg.norm(phi.C) >= abs(phi.d):
        return False
    try:
        sup_norm(phi)
    except NotSelfMapError:
        return False
    return True


# ---------------------------------------------------------------------------
# automorphisms and unitaries


def automorphism_point_swap(p) -> LinFracMap:
    """The involutive automorphism exchanging p and 0."""
    p = ball_point(p)
    n = p.size
    if np.linalg.norm(p) == 0.0:
        return LinFracMap(-np.eye(n), np.zeros(n), np.zeros(n), 1.0)
    P = np.outer(p, np.conj(p)) / np.linalg.norm(p) ** 2
    s = np.sqrt(1.0 - np.linalg.norm(p) ** 2)
    A = -(P + s * (np.eye(n) - P))
    return LinFracMap(A, p, -p, 1.0)


def unitary_to_e1(a) -> np.ndarray:
    """Householder-style unitary matrix U with U a = e1, for unit a."""
    a = as_cvector(a)
    a = a / np.linalg.norm(a)
    n = a.size
    mu = a[0] / abs(a[0]) if abs(a[0]) > 1e-14 else 1.0
    v = a + mu * e1(n)
    H = np.eye(n) - 2.0 * np.outer(v, np.conj(v)) / herm(v, v)
    D = np.eye(n, dtype=complex)
    D[0, 0] = -np.conj(mu)
    return D @ H


def unitary_sending(a, b) -> np.ndarray:
    """Unitary matrix carrying unit vector a to unit vector b."""
    return unitary_to_e1(b).conj().T @ unitary_to_e1(a)


def random_automorphism(n: int, rng: np.random.Generator, radius: float = 0.8) -> LinFracMap:
    """Random ball automorphism: unitary composed with a point swap."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    p = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    p = p * (radius * rng.uniform() / np.linalg.norm(p))
    return compose(LinFracMap.unitary(Q), automorphism_point_swap(p))


def automorphism_residual(phi: LinFracMap) -> float:
    """Distance of phi o krein_adjoint(phi) from the identity map."""
    return map_distance(compose(phi, krein_adjoint(phi)), LinFracMap.identity(phi.dim))


def is_automorphism(phi: LinFracMap, tol: float = 1e-8) -> bool:
    return automorphism_residual(phi) <= tol


# ---------------------------------------------------------------------------
# fixed points and classification


@dataclass(frozen=True, eq=False)
class BoundaryFixedPoints:
    """Boundary fixed points of a self-map.

    ``whole_sphere`` flags the identity map; ``has_continuum`` flags a
    positive-dimensional family of fixed points meeting the sphere (the
    isolated representatives found are still listed in ``points``).
    """

    points: tuple
    whole_sphere: bool = False
    has_continuum: bool = False

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _eigen_fixed_points(phi: LinFracMap):
    """Candidate fixed points from the projective eigenstructure.

    Returns (isolated, families): finite fixed points from eigenvectors,
    plus (z0, D) parametrizations z0 + D y of affine fixed-point families
    coming from eigenvalue nullspaces of dimension >= 2.
    """
    T = projective_matrix(phi)
    n = phi.dim
    evals, evecs = np.linalg.eig(T)
    isolated = []
    for i in range(n + 1):
        v = evecs[:, i]
        if abs(v[n]) > 1e-12 * np.linalg.norm(v):
            isolated.append(v[:n] / v[n])
    families = []
    scale = np.linalg.norm(T)
    done = []
    for lam in evals:
        if any(abs(lam - mu) < 1e-8 * max(scale, 1.0) for mu in done):
            continue
        done.append(lam)
        _, s, Vh = np.linalg.svd(T - lam * np.eye(n + 1))
        nullity = int(np.sum(s < 1e-9 * max(scale, 1.0)))
        if nullity < 2:
            continue
        V = Vh[n + 1 - nullity:].conj().T  # (n+1) x nullity null-space basis
        last = V[n, :]
        if np.linalg.norm(last) < 1e-12:
            continue  # the whole family sits at infinity
        c0, *_ = np.linalg.lstsq(last[None, :], np.ones(1), rcond=None)
        z0 = V[:n, :] @ c0
        U = _nullspace(last[None, :])
        D = V[:n, :] @ U if U.shape[1] else np.zeros((n, 0))
        families.append((z0, D))
    return isolated, families


def _nullspace(M: np.ndarray) -> np.ndarray:
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > 1e-12 * max(1.0, s[0] if s.size else 0.0)))
    return Vh[rank:].conj().T


def _family_min_norm_point(z0: np.ndarray, D: np.ndarray) -> np.ndarray:
    if D.shape[1] == 0:
        return z0
    y, *_ = np.linalg.lstsq(D, -z0, rcond=None)
    return z0 + D @ y


def boundary_fixed_points(phi: LinFracMap, residual_tol: float = 1e-9) -> BoundaryFixedPoints:
    """All boundary fixed points, from the projective eigenstructure.

    Eigenvectors of [[A, B], [C*, d]] with nonzero last coordinate
    normalize to candidate fixed points; those landing on the sphere with
    |phi(zeta) - zeta| below ``residual_tol`` are kept.
    """
    n = phi.dim
    if maps_equal(phi, LinFracMap.identity(n)):
        return BoundaryFixedPoints(points=(), whole_sphere=True, has_continuum=True)
    isolated, families = _eigen_fixed_points(phi)
    points = []
    for z in isolated:
        if abs(np.linalg.norm(z) - 1.0) > 1e-6:
            continue
        zeta = z / np.linalg.norm(z)
        if np.linalg.norm(apply(phi, zeta) - zeta) < residual_tol:
            if all(np.linalg.norm(zeta - p) > 1e-6 for p in points):
                points.append(zeta)
    has_continuum = False
    for z0, D in families:
        if D.shape[1] == 0:
            continue
        if np.linalg.norm(_family_min_norm_point(z0, D)) <= 1.0 + 1e-9:
            has_continuum = True
    return BoundaryFixedPoints(points=tuple(points), has_continuum=has_continuum)


class E1Class(enum.Enum):
    """Fixed-point classification of a self-map relative to e1."""

    PARABOLIC = "parabolic"
    OTHER_FIXED_POINT = "has-interior-or-other-fixed-point"
    NOT_FIXING_E1 = "not-fixing-e1"


def classify_fixing_e1(phi: LinFracMap, tol: float = 1e-8) -> E1Class:
    """Classify phi against the parabolic normal form at e1.

    PARABOLIC means phi(e1) = e1, D_1 phi_1(e1) = 1 and no other fixed
    point in the closed ball.  OTHER_FIXED_POINT covers every other map
    fixing e1 (a unit derivative with an extra fixed point, or a
    non-unit first derivative).
    """
    n = phi.dim
    one = e1(n)
    if np.linalg.norm(apply(phi, one) - one) > tol:
        return E1Class.NOT_FIXING_E1
    if abs(directional_derivative(phi, one, one, one) - 1.0) > tol:
        return E1Class.OTHER_FIXED_POINT
    isolated, families = _eigen_fixed_points(phi)
    for z in isolated:
        if np.linalg.norm(z - one) <= 1e-5:
            continue
        if np.linalg.norm(z) <= 1.0 + _RANK_TOL:
            zeta = z if np.linalg.norm(z) < 1.0 else z / np.linalg.norm(z)
            if np.linalg.norm(apply(phi, zeta) - zeta) < 1e-7:
                return E1Class.OTHER_FIXED_POINT
    for z0, D in families:
        if D.shape[1] == 0:
            continue
        if np.linalg.norm(_family_min_norm_point(z0, D)) <= 1.0 + _RANK_TOL:
            return E1Class.OTHER_FIXED_POINT
    return E1Class.PARABOLIC


def interior_fixed_points(phi: LinFracMap, margin: float = 1e-6) -> list:
    """Fixed points with |z| <= 1 - margin, including family representatives."""
    isolated, families = _eigen_fixed_points(phi)
    out = []
    for z in isolated:
        if np.linalg.norm(z) <= 1.0 - margin and np.linalg.norm(apply(phi, z) - z) < 1e-8:
            if all(np.linalg.norm(z - p) > 1e-8 for p in out):
                out.append(z)
    for z0, D in families:
        z = _family_min_norm_point(z0, D)
        if np.linalg.norm(z) <= 1.0 - margin and np.linalg.norm(apply(phi, z) - z) < 1e-8:
            if all(np.linalg.norm(z - p) > 1e-8 for p in out):
                out.append(z)
    return out


# ---------------------------------------------------------------------------
# Siegel generalized-translation form of parabolic maps


@dataclass(frozen=True, eq=False)
class SiegelParabolicForm:
    """Data (delta, b, Amat, gamma) of the half-space conjugate

        Phi(w1, w') = (w1 + 2i <w', delta> + b, Amat w' + gamma).

    For N = 1 all of delta, Amat, gamma are empty and only the
    translation scalar b survives.
    """

    delta: np.ndarray
    b: complex
    Amat: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "delta", _read_only(np.asarray(self.delta, dtype=complex).reshape(-1)))
        object.__setattr__(self, "gamma", _read_only(np.asarray(self.gamma, dtype=complex).reshape(-1)))
        m = self.delta.size
        object.__setattr__(self, "Amat", _read_only(np.asarray(self.Amat, dtype=complex).reshape(m, m)))
        object.__setattr__(self, "b", complex(self.b))

    @property
    def dim(self) -> int:
        return self.delta.size + 1

    def translate(self, w) -> np.ndarray:
        w = as_cvector(w)
        out = np.empty_like(w)
        out[0] = w[0] + 2j * herm(w[1:], self.delta) + self.b
        out[1:] = self.Amat @ w[1:] + self.gamma
        return out

    def image_height_on_slice(self, k: float, c) -> float:
        """Height of Phi(w) for w = (t + i(k + |c|^2), c); independent of t."""
        c = np.asarray(c, dtype=complex).reshape(-1)
        w = np.concatenate([[1j * (k + np.linalg.norm(c) ** 2)], c])
        img = self.translate(w)
        return float(np.imag(img[0]) - np.linalg.norm(img[1:]) ** 2)


def cayley_map(n: int) -> LinFracMap:
    """The Cayley transform of B_n onto H_n as a linear-fractional map."""
    A = 1j * np.eye(n)
    B = 1j * e1(n)
    C = -e1(n)
    return LinFracMap(A, B, C, 1.0)


def cayley_inverse_map(n: int) -> LinFracMap:
    A = 2.0 * np.eye(n, dtype=complex)
    A[0, 0] = 1.0
    B = np.zeros(n, dtype=complex)
    B[0] = -1j
    C = e1(n)
    return LinFracMap(A, B, C, 1j)


def _siegel_conjugate_matrix(phi: LinFracMap) -> np.ndarray:
    """Projective matrix of C o phi o C^{-1}, scaled to unit corner."""
    n = phi.dim
    T = (
        projective_matrix(cayley_map(n))
        @ projective_matrix(phi)
        @ projective_matrix(cayley_inverse_map(n))
    )
    if abs(T[n, n]) < 1e-13 * np.linalg.norm(T):
        raise ClassificationError("half-space conjugate is not affine")
    return T / T[n, n]


def siegel_affine_form(phi: LinFracMap, tol: float = 1e-8) -> SiegelParabolicForm:
    """Extract the generalized-translation data of C o phi o C^{-1}.

    Requires the half-space conjugate to be an affine map of the
    translation shape; no fixed-point classification is enforced here.
    """
    n = phi.dim
    T = _siegel_conjugate_matrix(phi)
    scale = max(1.0, float(np.abs(T).max()))
    resid = max(
        float(np.abs(T[n, :n]).max(initial=0.0)),
        float(np.abs(T[:n, :n][1:, 0]).max(initial=0.0)),
        abs(T[0, 0] - 1.0),
    )
    if resid > tol * scale:
        raise ClassificationError(
            f"half-space conjugate deviates from translation form by {resid}"
        )
    delta = np.conj(T[0, 1:n] / 2j)
    return SiegelParabolicForm(delta=delta, b=T[0, n], Amat=T[1:n, 1:n], gamma=T[1:n, n])


def to_siegel_parabolic(phi: LinFracMap) -> SiegelParabolicForm:
    """Siegel translation data of a parabolic map fixing e1.

    Raises ClassificationError unless classify_fixing_e1(phi) is PARABOLIC.
    """
    if classify_fixing_e1(phi) is not E1Class.PARABOLIC:
        raise ClassificationError("map is not parabolic fixing e1")
    return siegel_affine_form(phi)


def from_siegel_parabolic(form: SiegelParabolicForm) -> LinFracMap:
    """The ball self-map C^{-1} o Phi o C for translation data Phi."""
    n = form.dim
    T = np.zeros((n + 1, n + 1), dtype=complex)
    T[0, 0] = 1.0
    T[0, 1:n] = 2j * np.conj(form.delta)
    T[0, n] = form.b
    T[1:n, 1:n] = form.Amat
    T[1:n, n] = form.gamma
    T[n, n] = 1.0
    M = (
        projective_matrix(cayley_inverse_map(n))
        @ T
        @ projective_matrix(cayley_map(n))
    )
    return from_projective_matrix(M)


def parabolic_first_coordinate(form: SiegelParabolicForm, z) -> complex:
    """First coordinate of the ball conjugate, in closed form.

    ((2i - b) z1 - 2 <z', delta> + b) / (-b z1 - 2 <z', delta> + 2i + b).
    """
    z = as_cvector(z)
    b = form.b
    inner = herm(z[1:], form.delta)
    num = (2j - b) * z[0] - 2.0 * inner + b
    den = -b * z[0] - 2.0 * inner + 2j + b
    if abs(den) < 1e-15:
        raise PoleError("pole in parabolic first-coordinate formula")
    return complex(num / den)


# ---------------------------------------------------------------------------
# affine rank, Krein reduction, slice restriction


def affine_range_dimension(phi: LinFracMap) -> int:
    """Dimension of the smallest affine set containing phi(B_N).

    Recenters by the point swap at phi(0); the image then spans the range
    of the recentered linear part, whose numerical rank (relative
    threshold 1e-9) is returned.
    """
    p = apply(phi, np.zeros(phi.dim))
    psi = compose(automorphism_point_swap(p), phi)
    s = np.linalg.svd(psi.A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > _RANK_TOL * s[0]))


def krein_reduction(phi: LinFracMap, psi: LinFracMap) -> tuple[LinFracMap, LinFracMap]:
    """The pair (tau, xi) = (phi o sigma_phi, psi o sigma_phi).

    When phi fixes e1 the reduced map tau fixes e1 with first derivative
    exactly 1, which the routine asserts numerically.
    """
    sigma = krein_adjoint(phi)
    tau = compose(phi, sigma)
    xi = compose(psi, sigma)
    one = e1(phi.dim)
    if np.linalg.norm(apply(phi, one) - one) <= 1e-8:
        if np.linalg.norm(apply(tau, one) - one) > 1e-7:
            raise ClassificationError("krein reduction lost the boundary fixed point")
        der = directional_derivative(tau, one, one, one)
        if abs(der - 1.0) > 1e-6:
            raise ClassificationError(f"D_1 tau_1(e1) = {der}, expected 1")
    return tau, xi


def restriction_to_slice(
    phi: LinFracMap, rho1: LinFracMap, rho2: LinFracMap, K: int
) -> LinFracMap:
    """The compressed map mu(z') = proj_K(rho2 o phi o rho1(z', 0'')) on B_K.

    Requires rho2 o phi o rho1 to send the embedded slice {(z', 0'')}
    into itself, which is checked on sample points.
    """
    n = phi.dim
    if not (1 <= K < n):
        raise SliceReductionError(f"need 1 <= K < {n}, got K = {K}")
    g = compose(rho2, compose(phi, rho1))
    rng = np.random.default_rng(7)
    for _ in range(24):
        zp = rng.standard_normal(K) + 1j * rng.standard_normal(K)
        zp *= rng.uniform(0.0, 0.97) / max(np.linalg.norm(zp), 1e-12)
        img = apply(g, np.concatenate([zp, np.zeros(n - K)]))
        if np.linalg.norm(img[K:]) > 1e-9:
            raise SliceReductionError(
                f"slice not preserved: residual {np.linalg.norm(img[K:])}"
            )
    return LinFracMap(g.A[:K, :K], g.B[:K], g.C[:K], g.d)


# ---------------------------------------------------------------------------
# rigidity on the distinguished boundary circle


def is_identity_on_e1_circle(phi: LinFracMap, tol: float = _CIRCLE_TOL) -> bool:
    """Check phi = id on [e1]-circle via 8 sampled circle points."""
    n = phi.dim
    for theta in 2.0 * np.pi * np.arange(8) / 8.0:
        zeta = np.zeros(n, dtype=complex)
        zeta[0] = np.exp(1j * theta)
        if np.linalg.norm(apply(phi, zeta) - zeta) > tol:
            return False
    return True


def rigid_normal_form(phi: LinFracMap, tol: float = 1e-8) -> np.ndarray:
    """The matrix A' of the rigid form phi(z1, z') = (z1, A' z').

    A self-map that is the identity on the circle [e1] on the sphere has
    this shape; the routine validates the projective data (B = C = 0,
    first row and column of A trivial) and returns the transverse block.
    """
    if not is_identity_on_e1_circle(phi):
        raise ClassificationError("map is not the identity on the [e1] circle")
    n = phi.dim
    resid = max(
        float(np.abs(phi.B).max(initial=0.0)),
        float(np.abs(phi.C).max(initial=0.0)),
        abs(phi.A[0, 0] - 1.0),
        float(np.abs(phi.A[0, 1:]).max(initial=0.0)),
        float(np.abs(phi.A[1:, 0]).max(initial=0.0)),
    )
    if resid > tol:
        raise ClassificationError(f"rigid-form residual {resid} exceeds {tol}")
    return np.array(phi.A[1:, 1:])
