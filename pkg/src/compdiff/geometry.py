"""Geometry of the unit ball B_N in C^N and its Siegel half-space model.

Provides the pseudohyperbolic metric, the Cayley transform between the
ball and the half-space H_N = {Im w_1 > |w'|^2}, generalized translations
of H_N, the height level sets Gamma_k, and the internally tangent
ellipsoids E(k, e1) they correspond to in the ball.

Points are plain 1-D complex numpy arrays.  All operations are pure; the
validating constructors return read-only arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryDomainError, PoleError

# Constructor rejects |v| >= 1 - BALL_OPEN_TOL; boundary points are
# separate CVectors with | |v| - 1 | <= BOUNDARY_TOL.
BALL_OPEN_TOL = 1e-12
BOUNDARY_TOL = 1e-9


def as_cvector(v) -> np.ndarray:
    """Coerce to a finite 1-D complex vector of dimension >= 1."""
    arr = np.atleast_1d(np.asarray(v, dtype=complex))
    if arr.ndim != 1 or arr.size < 1:
        raise GeometryDomainError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GeometryDomainError("vector has non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    out.setflags(write=False)
    return out


def ball_point(v) -> np.ndarray:
    """Validated point of the open ball; rejects |v| >= 1 - 1e-12."""
    arr = as_cvector(v)
    if np.linalg.norm(arr) >= 1.0 - BALL_OPEN_TOL:
        raise GeometryDomainError(f"|v| = {np.linalg.norm(arr)} is not < 1 - {BALL_OPEN_TOL}")
    return _frozen(arr)


def boundary_point(v) -> np.ndarray:
    """Validated point of the unit sphere, within tolerance 1e-9."""
    arr = as_cvector(v)
    if abs(np.linalg.norm(arr) - 1.0) > BOUNDARY_TOL:
        raise GeometryDomainError(f"|v| = {np.linalg.norm(arr)} is not 1 within {BOUNDARY_TOL}")
    return _frozen(arr)


def siegel_point(v) -> np.ndarray:
    """Validated point of H_N: Im v_1 > |v'|^2."""
    arr = as_cvector(v)
    if siegel_height(arr) <= 0.0:
        raise GeometryDomainError("point does not satisfy Im v1 > |v'|^2")
    return _frozen(arr)


def herm(z: np.ndarray, w: np.ndarray) -> complex:
    """Hermitian inner product <z, w> = sum z_j conj(w_j)."""
    return complex(np.vdot(w, z))


def e1(n: int) -> np.ndarray:
    """The distinguished boundary point (1, 0, ..., 0) in C^n."""
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    return _frozen(v)


# ---------------------------------------------------------------------------
# pseudohyperbolic metric


def pseudo_hyperbolic_distance(z, w) -> float:
    """Pseudohyperbolic distance rho(z, w) on the closed ball.

    Defined by 1 - rho^2 = (1 - |z|^2)(1 - |w|^2) / |1 - <z, w>|^2.
    For N = 1 this reduces to |z - w| / |1 - conj(z) w|.

    Raises GeometryDomainError when both points sit on the boundary with
    <z, w> = 1 (the expression degenerates) or when a point lies outside
    the closed ball far enough to make the radicand negative.
    """
    z = as_cvector(z)
    w = as_cvector(w)
    if z.shape != w.shape:
        raise GeometryDomainError("dimension mismatch")
    nz = np.linalg.norm(z)
    nw = np.linalg.norm(w)
    denom = abs(1.0 - herm(z, w))
    if denom == 0.0:
        if abs(nz - 1.0) <= BOUNDARY_TOL and abs(nw - 1.0) <= BOUNDARY_TOL:
            raise GeometryDomainError("rho undefined: boundary points with <z,w> = 1")
        raise GeometryDomainError("rho undefined: 1 - <z,w> = 0")
    val = (1.0 - nz**2) * (1.0 - nw**2) / denom**2
    radicand = 1.0 - val
    if radicand < -BALL_OPEN_TOL:
        raise GeometryDomainError(f"negative radicand {radicand}: points outside closed ball")
    return min(1.0, np.sqrt(max(radicand, 0.0)))


def siegel_form(u, v) -> complex:
    """The sesquilinear form r(u, v) = (u1 - conj(v1)) / 2i - <u', v'>.

    r(u, u) is the Siegel height of u; the pseudohyperbolic metric on H_N
    is 1 - rho^2 = r(u,u) r(v,v) / |r(u,v)|^2.
    """
    u = as_cvector(u)
    v = as_cvector(v)
    return (u[0] - np.conj(v[0])) / 2j - herm(u[1:], v[1:])


def siegel_height(w) -> float:
    """Height Im w_1 - |w'|^2; membership in Gamma_k means height = k."""
    w = as_cvector(w)
    return float(np.imag(w[0]) - np.linalg.norm(w[1:]) ** 2)


def pseudo_hyperbolic_distance_siegel(u, v) -> float:
    """rho_H(u, v) = rho(C^{-1} u, C^{-1} v), computed without pulling back.

    Uses the closed form 1 - rho^2 = h(u) h(v) / |r(u, v)|^2, which stays
    accurate for points far out in the half-space where the ball-side
    formula loses all precision to cancellation.
    """
    u = as_cvector(u)
    v = as_cvector(v)
    hu = siegel_height(u)
    hv = siegel_height(v)
    if hu < 0.0 or hv < 0.0:
        raise GeometryDomainError("points must lie in the closed half-space")
    r = siegel_form(u, v)
    if r == 0:
        raise GeometryDomainError("rho_H undefined: r(u,v) = 0")
    radicand = 1.0 - hu * hv / abs(r) ** 2
    if radicand < -BALL_OPEN_TOL:
        raise GeometryDomainError(f"negative radicand {radicand}")
    return min(1.0, np.sqrt(max(radicand, 0.0)))


# ---------------------------------------------------------------------------
# Cayley transform


def cayley(z) -> np.ndarray:
    """Biholomorphism of B_N onto H_N: z -> i (e1 + z) / (1 - z_1)."""
    z = as_cvector(z)
    if z[0] == 1.0:
        raise PoleError("cayley has a pole at z1 = 1")
    w = 1j * (e1(z.size) + z) / (1.0 - z[0])
    return w


def cayley_inverse(w) -> np.ndarray:
    """Inverse Cayley map: w -> ((w1 - i)/(w1 + i), 2 w' / (w1 + i))."""
    w = as_cvector(w)
    if w[0] == -1j:
        raise PoleError("cayley_inverse has a pole at w1 = -i")
    out = np.empty_like(w)
    out[0] = (w[0] - 1j) / (w[0] + 1j)
    out[1:] = 2.0 * w[1:] / (w[0] + 1j)
    return out


# ---------------------------------------------------------------------------
# H-translations


@dataclass(frozen=True, eq=False)
class HTranslation:
    """Generalized translation h_b(w1, w') = (w1 + 2i<w', b'> + b1, w' + b').

    Maps H_N into itself when Im b1 >= |b'|^2, and is an automorphism of
    H_N exactly when equality holds.
    """

    b1: complex
    bprime: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        object.__setattr__(self, "b1", complex(self.b1))
        bp = np.asarray(self.bprime, dtype=complex).reshape(-1)
        object.__setattr__(self, "bprime", _frozen(bp))
        if self.defect < -1e-12:
            raise GeometryDomainError(
                f"Im b1 = {self.b1.imag} < |b'|^2 = {np.linalg.norm(self.bprime)**2}: "
                "not a self-map of H_N"
            )

    @property
    def defect(self) -> float:
        """Im b1 - |b'|^2; the amount by which the translation lifts heights."""
        return self.b1.imag - float(np.linalg.norm(self.bprime) ** 2)

    @property
    def is_automorphism(self) -> bool:
        return abs(self.defect) <= 1e-12

    @property
    def dim(self) -> int:
        return self.bprime.size + 1


def h_translate(h: HTranslation, w) -> np.ndarray:
    """Apply the translation h to a point of C^N (N = h.dim)."""
    w = as_cvector(w)
    if w.size != h.dim:
        raise GeometryDomainError(f"dimension mismatch: point has dim {w.size}, map {h.dim}")
    out = np.empty_like(w)
    out[0] = w[0] + 2j * herm(w[1:], h.bprime) + h.b1
    out[1:] = w[1:] + h.bprime
    return out


# ---------------------------------------------------------------------------
# ellipsoids E(k, e1)


@dataclass(frozen=True)
class EllipsoidSpec:
    """The internally tangent ellipsoid E(k, e1) = C^{-1}(Gamma_k), k > 0.

    Consists of the points with |z1 - k/(1+k)|^2 + |z'|^2/(1+k) = 1/(1+k)^2,
    equivalently |1 - z1|^2 = (1/k)(1 - |z|^2).  Center k/(1+k) e1, first
    semiaxis 1/(1+k), transverse semiaxes 1/sqrt(1+k).
    """

    k: float

    def __post_init__(self):
        if not (self.k > 0):
            raise GeometryDomainError(f"ellipsoid parameter k = {self.k} must be > 0")

    @property
    def center_coordinate(self) -> float:
        return self.k / (1.0 + self.k)

    @property
    def axis_semilength(self) -> float:
        return 1.0 / (1.0 + self.k)

    @property
    def transverse_semilength(self) -> float:
        return 1.0 / np.sqrt(1.0 + self.k)


def ellipsoid_membership(spec: EllipsoidSpec, z) -> float:
    """Residual |z1 - k/(1+k)|^2 + |z'|^2/(1+k) - 1/(1+k)^2; zero on E(k, e1)."""
    z = as_cvector(z)
    k = spec.k
    return float(
        abs(z[0] - k / (1 + k)) ** 2
        + np.linalg.norm(z[1:]) ** 2 / (1 + k)
        - 1.0 / (1 + k) ** 2
    )


def ellipsoid_membership_alt(spec: EllipsoidSpec, z) -> float:
    """Residual of the equivalent defining form |1 - z1|^2 - (1/k)(1 - |z|^2).

    Algebraically ellipsoid_membership(spec, z) = k/(1+k) times this value
    at every z, so both residuals vanish on exactly the same set.
    """
    z = as_cvector(z)
    return float(abs(1.0 - z[0]) ** 2 - (1.0 - np.linalg.norm(z) ** 2) / spec.k)


def ellipsoid_point(k: float, t: float, wprime) -> np.ndarray:
    """Point of E(k, e1) as the pull-back of (t + i(k + |w'|^2), w').

    This parametrization follows the half-space picture: the argument is a
    point of Gamma_k with real part t and transverse part w', and the
    result is its image under the inverse Cayley transform.  For fixed w'
    the points tend to e1 as t -> infinity.
    """
    wprime = np.asarray(wprime, dtype=complex).reshape(-1)
    w = np.concatenate(
        [[t + 1j * (k + np.linalg.norm(wprime) ** 2)], wprime]
    )
    return cayley_inverse(w)
