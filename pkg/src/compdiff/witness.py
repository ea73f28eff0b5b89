"""Numerical non-compactness certificates for differences C_phi - C_psi.

For distinct linear-fractional self-maps that are not both strict
contractions of the ball, the difference of composition operators is
never compact; this module turns the constructions behind that fact into
explicit boundary-approaching witness sequences:

* value mismatch at a boundary fixed point: radial kernel sequences;
* derivative mismatch: sequences along a wide non-tangential aperture;
* parabolic pairs: constant-separation sequences along an ellipsoid
  E(k, e1), built in half-space coordinates where they are exactly
  computable;
* rigid pairs (z1, A z') vs (z1, M z'): slice paths with a closed-form
  pseudohyperbolic limit per matrix column;
* non-univalent deep pairs: affine-rank reduction to a smaller ball and
  recursion, with the reduction chain recorded.

``compactness_verdict`` orchestrates the cascade and returns either
``equal``, ``compact-both-small``, or ``not-compact`` with a certificate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    ClassificationError,
    InconclusiveError,
    NotSelfMapError,
    SliceReductionError,
    WitnessHypothesisError,
)
from .geometry import (
    as_cvector,
    boundary_point,
    cayley_inverse,
    e1,
    herm,
    pseudo_hyperbolic_distance,
)
from .linfrac import (
    E1Class,
    LinFracMap,
    SiegelParabolicForm,
    affine_range_dimension,
    apply,
    automorphism_point_swap,
    boundary_derivative,
    classify_fixing_e1,
    compose,
    interior_fixed_points,
    is_identity_on_e1_circle,
    krein_reduction,
    maps_equal,
    restriction_to_slice,
    rigid_normal_form,
    siegel_affine_form,
    sup_norm,
    unitary_sending,
)
from .operators import kernel_difference_norm
from .spaces import SpaceSpec, kernel_exponent

DEFAULT_T_GRID = tuple(float(2.0**n) for n in range(4, 25))
BOUNDARY_CAP = 1.0 - 1e-12


@dataclass(frozen=True, eq=False)
class WitnessConfig:
    """Tunable data of the witness constructions.

    k is the ellipsoid height parameter; c an optional transverse slice
    offset in C^(N-1) (searched over a small grid when omitted);
    aperture the non-tangential opening M for derivative-mismatch
    sequences (chosen from the derivative gap when omitted).
    """

    k: float = 1.0
    c: tuple | None = None
    aperture: float | None = None
    t_grid: tuple = DEFAULT_T_GRID
    rho_positive_tol: float = 1e-6
    match_tol: float = 1e-8

    def __post_init__(self):
        if not (self.k > 0):
            raise WitnessHypothesisError(f"ellipsoid parameter k = {self.k} must be > 0")
        if self.aperture is not None and not (self.aperture >= 1):
            raise WitnessHypothesisError(f"aperture M = {self.aperture} must be >= 1")


@dataclass(frozen=True, eq=False)
class WitnessRecord:
    """Quantities evaluated at one sequence point."""

    point: np.ndarray
    abs_z: float
    rho: float
    ratio1: float
    ratio2: float
    eq1_value: float
    kernel_diff_sq: float | None = None


@dataclass(frozen=True, eq=False)
class WitnessCertificate:
    """A boundary-approaching sequence certifying non-compactness.

    ``pair`` is the pair of maps the per-point records refer to; when
    the verdict cascade reduces the original pair (Krein adjoint, slice
    restriction, conjugation), ``chain`` lists the steps connecting the
    two, and the certificate quantities bound the reduced difference,
    which bounds the original by operator composition.
    """

    kind: str
    points: tuple
    records: tuple
    claimed_inf: float
    pair: tuple
    chain: tuple = ()
    details: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.kind == "none":
            return
        if len(self.records) < 3:
            raise WitnessHypothesisError("certificate has too few points")
        mags = [r.abs_z for r in self.records]
        if any(b <= a for a, b in zip(mags, mags[1:])):
            raise WitnessHypothesisError("|z^(n)| is not increasing")
        if mags[-1] < 1.0 - 1e-6:
            raise WitnessHypothesisError("sequence does not approach the boundary")
        for r in self.records:
            if abs(r.eq1_value - r.rho * (r.ratio1 + r.ratio2)) > 1e-9 * max(1.0, r.eq1_value):
                raise WitnessHypothesisError("inconsistent eq1 record")
        if self.witnessed_inf() < self.claimed_inf - 1e-12:
            raise WitnessHypothesisError("claimed_inf exceeds the recorded infimum")

    def witnessed_inf(self) -> float:
        """Infimum over records of the quantity this certificate bounds."""
        if self.kind in ("boundary-mismatch", "derivative-mismatch"):
            return min(r.kernel_diff_sq for r in self.records)
        return min(r.eq1_value for r in self.records)


def eq1_quantity(
    phi: LinFracMap, psi: LinFracMap, z, space: SpaceSpec | None = None
) -> WitnessRecord:
    """The distance-times-ratio quantity whose non-vanishing along a
    boundary sequence rules out compactness of C_phi - C_psi.

    Returns rho(phi(z), psi(z)), both ratios (1-|z|^2)/(1-|phi(z)|^2)
    and (1-|z|^2)/(1-|psi(z)|^2), and their combination
    rho * (ratio1 + ratio2); with a space given, also the closed-form
    adjoint kernel difference.
    """
    z = as_cvector(z)
    fz = apply(phi, z)
    gz = apply(psi, z)
    rho = pseudo_hyperbolic_distance(fz, gz)
    one_minus = 1.0 - float(np.linalg.norm(z) ** 2)
    r1 = one_minus / (1.0 - float(np.linalg.norm(fz) ** 2))
    r2 = one_minus / (1.0 - float(np.linalg.norm(gz) ** 2))
    kd = kernel_difference_norm(phi, psi, z, space) if space is not None else None
    return WitnessRecord(
        point=z,
        abs_z=float(np.linalg.norm(z)),
        rho=rho,
        ratio1=r1,
        ratio2=r2,
        eq1_value=rho * (r1 + r2),
        kernel_diff_sq=kd,
    )


# ---------------------------------------------------------------------------
# parabolic (ellipsoid) witnesses


def _c_grid(m: int) -> list:
    """Search grid for the transverse slice offset: {0, +-0.3, +-0.3i}^m."""
    if m == 0:
        return [np.zeros(0, dtype=complex)]
    choices = [0.0, 0.3, -0.3, 0.3j, -0.3j]
    return [np.array(t, dtype=complex) for t in itertools.product(choices, repeat=m)]


def _translation_images(form: SiegelParabolicForm, k: float, c: np.ndarray):
    """t-free data of the image of (t + i(k+|c|^2), c) under the form.

    Returns (a, trans): the image point is (t + a, trans), with a the
    constant first-coordinate offset and trans the transverse part.
    """
    a = 1j * (k + np.linalg.norm(c) ** 2) + 2j * herm(c, form.delta) + form.b
    trans = form.Amat @ c + form.gamma
    return a, trans


def _siegel_pair_separation(a1, t1, a2, t2) -> tuple[float, float, float, complex]:
    """rho and heights for image points (t + a1, t1), (t + a2, t2).

    All quantities are independent of t; computing them without t avoids
    every cancellation for sequence points far out in the half-space.
    """
    h1 = float(np.imag(a1) - np.linalg.norm(t1) ** 2)
    h2 = float(np.imag(a2) - np.linalg.norm(t2) ** 2)
    r12 = (a1 - np.conj(a2)) / 2j - herm(t1, t2)
    if abs(r12) == 0.0:
        raise WitnessHypothesisError("degenerate image pair")
    rho = float(np.sqrt(max(0.0, 1.0 - h1 * h2 / abs(r12) ** 2)))
    return rho, h1, h2, r12


def _siegel_translation_witness(
    phi: LinFracMap,
    psi: LinFracMap,
    cfg: WitnessConfig,
    space: SpaceSpec | None,
    chain: tuple = (),
) -> WitnessCertificate:
    """Shared engine behind parabolic_witness; only requires both maps to
    conjugate to the half-space generalized-translation form."""
    if maps_equal(phi, psi):
        raise WitnessHypothesisError("maps are equal; nothing to witness")
    form1 = siegel_affine_form(phi)
    form2 = siegel_affine_form(psi)
    n = phi.dim
    k = cfg.k
    candidates = (
        [np.asarray(cfg.c, dtype=complex).reshape(-1)]
        if cfg.c is not None
        else _c_grid(n - 1)
    )
    chosen = None
    for c in candidates:
        a1, t1 = _translation_images(form1, k, c)
        a2, t2 = _translation_images(form2, k, c)
        rho, h1, h2, r12 = _siegel_pair_separation(a1, t1, a2, t2)
        if rho > cfg.rho_positive_tol:
            chosen = (c, a1, t1, a2, t2, rho, h1, h2, r12)
            break
    if chosen is None:
        raise WitnessHypothesisError(
            "no slice offset separated the images; the pair needs a further reduction"
        )
    c, a1, t1, a2, t2, rho, h1, h2, r12 = chosen
    if h1 <= 0 or h2 <= 0:
        raise WitnessHypothesisError("image heights are not positive")

    beta = kernel_exponent(space) if space is not None else None
    height = k + float(np.linalg.norm(c) ** 2)
    points, records = [], []
    for t in cfg.t_grid:
        w1 = t + 1j * height
        one_minus_sq = 4.0 * k / abs(w1 + 1j) ** 2  # 1 - |z|^2 exactly
        if one_minus_sq < 2.0 * (1.0 - BOUNDARY_CAP):
            continue
        z = cayley_inverse(np.concatenate([[w1], c]))
        abs_z = float(np.sqrt(max(0.0, 1.0 - one_minus_sq)))
        ratio1 = (k / h1) * abs(t + a1 + 1j) ** 2 / abs(w1 + 1j) ** 2
        ratio2 = (k / h2) * abs(t + a2 + 1j) ** 2 / abs(w1 + 1j) ** 2
        kd = None
        if beta is not None:
            # r((t+a2,t2),(t+a1,t1)) = conj(r12); cross ratio in stable form
            q = k * (t + a2 + 1j) * np.conj(t + a1 + 1j) / (abs(w1 + 1j) ** 2 * np.conj(r12))
            cross = np.exp(beta * np.log(q))
            kd = float(ratio1**beta + ratio2**beta - 2.0 * np.real(cross))
        points.append(z)
        records.append(
            WitnessRecord(
                point=z,
                abs_z=abs_z,
                rho=rho,
                ratio1=ratio1,
                ratio2=ratio2,
                eq1_value=rho * (ratio1 + ratio2),
                kernel_diff_sq=kd,
            )
        )
    if len(records) < 3:
        raise WitnessHypothesisError("t-grid produced too few usable points")
    cert = WitnessCertificate(
        kind="parabolic-ellipsoid",
        points=tuple(points),
        records=tuple(records),
        claimed_inf=min(r.eq1_value for r in records),
        pair=(phi, psi),
        chain=chain,
        details={
            "k": k,
            "c": c.tolist(),
            "rho_constant": rho,
            "image_height_phi": h1,
            "image_height_psi": h2,
            "ratio_limit_phi": h1 / k,
            "ratio_limit_psi": h2 / k,
        },
    )
    cert.validate()
    return cert


def parabolic_witness(
    phi: LinFracMap,
    psi: LinFracMap,
    cfg: WitnessConfig | None = None,
    space: SpaceSpec | None = None,
) -> WitnessCertificate:
    """Witness sequence for two distinct parabolic maps fixing e1.

    Builds points z^(n) pulled back from the half-space slice
    (t_n + i(k + |c|^2), c); along it the separation
    rho(phi(z^(n)), psi(z^(n))) is a strictly positive constant and the
    ratios converge to the finite height quotients k'/k, so the
    eq1 quantity stays bounded below.
    """
    cfg = cfg or WitnessConfig()
    for name, m in (("phi", phi), ("psi", psi)):
        if classify_fixing_e1(m) is not E1Class.PARABOLIC:
            raise WitnessHypothesisError(f"{name} is not parabolic fixing e1")
    return _siegel_translation_witness(phi, psi, cfg, space)


# ---------------------------------------------------------------------------
# boundary kernel witnesses


def _aperture_for(d_phi: complex, d_psi: complex) -> float:
    """Smallest power of two M >= 1 with |d_psi - d_phi| M > 4 |d_phi|."""
    gap = abs(d_psi - d_phi)
    target = 4.0 * abs(d_phi) / gap
    M = 1.0
    while M <= target:
        M *= 2.0
    return M


def _aperture_point(M: float, delta: float) -> complex:
    """Point z1 = 1 - delta e^{i theta} on the curve |1-z1|/(1-|z1|^2) = M.

    cos(theta) = (1/M + delta)/2 makes the curve condition exact, with
    1 - |z1|^2 = delta / M.
    """
    cos_t = (1.0 / M + delta) / 2.0
    if cos_t > 1.0:
        raise WitnessHypothesisError("delta too large for this aperture")
    theta = np.arccos(cos_t)
    return 1.0 - delta * np.exp(1j * theta)


def boundary_witness(
    phi: LinFracMap,
    psi: LinFracMap,
    zeta,
    space: SpaceSpec,
    cfg: WitnessConfig | None = None,
) -> WitnessCertificate:
    """Kernel witness at a boundary point zeta fixed by phi.

    Value mismatch (psi(zeta) != zeta): radial sequence z = r_n zeta; the
    normalized adjoint kernel difference tends to at least
    (D_zeta phi_zeta(zeta))^(-beta).  Derivative mismatch: sequence along
    the aperture-M curve in the slice [zeta], with M large enough that
    the derivative gap dominates the cross-kernel term.

    All recorded quantities are invariant under the unitary moving zeta
    to e1, so the sequences are built directly along zeta.
    """
    cfg = cfg or WitnessConfig()
    zeta = boundary_point(zeta)
    if np.linalg.norm(apply(phi, zeta) - zeta) > cfg.match_tol:
        raise WitnessHypothesisError("phi does not fix zeta")
    beta = kernel_exponent(space)
    d_phi = boundary_derivative(phi, zeta)
    value_mismatch = np.linalg.norm(apply(psi, zeta) - zeta) > cfg.match_tol

    if value_mismatch:
        kind = "boundary-mismatch"
        radii = [1.0 - 2.0 ** (-p) for p in range(6, 27)]
        seq = [r * zeta for r in radii]
        details = {
            "zeta": zeta.tolist(),
            "derivative_phi": d_phi,
            "kernel_limit_prediction": float(np.real(d_phi)) ** (-beta),
        }
    else:
        d_psi = boundary_derivative(psi, zeta)
        if abs(d_psi - d_phi) <= cfg.match_tol:
            raise WitnessHypothesisError(
                "value and derivative data agree at zeta; use the Krein reduction"
            )
        M = cfg.aperture if cfg.aperture is not None else _aperture_for(d_phi, d_psi)
        kind = "derivative-mismatch"
        seq = [_aperture_point(M, 2.0 ** (-p)) * zeta for p in range(6, 27)]
        details = {
            "zeta": zeta.tolist(),
            "derivative_phi": d_phi,
            "derivative_psi": d_psi,
            "aperture": M,
        }

    records = []
    cross_terms = []
    for z in seq:
        if np.linalg.norm(z) > BOUNDARY_CAP:
            continue
        rec = eq1_quantity(phi, psi, z, space)
        records.append(rec)
        one_minus = 1.0 - float(np.linalg.norm(z) ** 2)
        q = one_minus / (1.0 - herm(apply(psi, z), apply(phi, z)))
        cross_terms.append(float(np.abs(q) ** beta))
    if len(records) < 3:
        raise WitnessHypothesisError("sequence produced too few usable points")
    details["cross_term_final"] = cross_terms[-1]
    details["cross_term_tail_max"] = max(cross_terms[-5:])
    cert = WitnessCertificate(
        kind=kind,
        points=tuple(r.point for r in records),
        records=tuple(records),
        claimed_inf=min(r.kernel_diff_sq for r in records),
        pair=(phi, psi),
        details=details,
    )
    cert.validate()
    return cert


# ---------------------------------------------------------------------------
# slice-limit formula


@dataclass(frozen=True, eq=False)
class SliceLimitResult:
    """Closed-form limit of 1 - rho^2 along the path omega_t for one
    matrix column, with its direct path-evaluation cross-check.

    lambda and gammacol are the column norms |Z|, |W| (the symbol gamma
    is reused elsewhere for Bergman exponents, hence the name).
    """

    j: int
    Z: np.ndarray
    W: np.ndarray
    lam: float
    gammacol: float
    limit_value: float
    rho_limit: float
    direct_limit: float | None = None


def _rigid_pair_maps(A: np.ndarray, M: np.ndarray) -> tuple[LinFracMap, LinFracMap]:
    m = A.shape[0]
    TA = np.zeros((m + 1, m + 1), dtype=complex)
    TA[0, 0] = 1.0
    TA[1:, 1:] = A
    TM = TA.copy()
    TM[1:, 1:] = M
    return (
        LinFracMap(TA, np.zeros(m + 1), np.zeros(m + 1), 1.0),
        LinFracMap(TM, np.zeros(m + 1), np.zeros(m + 1), 1.0),
    )


def _omega_path_point(n: int, j: int, t: float) -> np.ndarray:
    z = np.zeros(n, dtype=complex)
    z[0] = t
    z[j + 1] = np.sqrt(1.0 - t)
    return z


def _richardson(values: list, factor: float = 2.0) -> float:
    """Limit of v(delta) as delta -> 0 from v at delta_i = delta_0 / factor^i."""
    table = [list(values)]
    for m in range(1, len(values)):
        prev = table[-1]
        fm = factor**m
        table.append([(fm * prev[i + 1] - prev[i]) / (fm - 1.0) for i in range(len(prev) - 1)])
    return float(table[-1][0])


def slice_limit_test(A, M, j: int, cross_validate: bool = True) -> SliceLimitResult:
    """Column-j comparison of the rigid pairs (z1, A z') and (z1, M z').

    Along omega_t = (t, 0', sqrt(1-t) in slot j, 0''), the limit of
    1 - rho^2(tau(omega_t), xi(omega_t)) as t -> 1 is
    (2 - |Z|^2)(2 - |W|^2) / |2 - <Z, W>|^2 for the j-th columns Z, W;
    the limit equals 1 exactly when Z = W.  Cross-validated against the
    direct path evaluation via Richardson extrapolation.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    Z = A[:, j].copy()
    W = M[:, j].copy()
    lam = float(np.linalg.norm(Z))
    gam = float(np.linalg.norm(W))
    if lam > 1.0 + 1e-9 or gam > 1.0 + 1e-9:
        raise WitnessHypothesisError("column norms exceed 1: not self-map data")
    limit = float((2.0 - lam**2) * (2.0 - gam**2) / abs(2.0 - herm(Z, W)) ** 2)
    rho_limit = float(np.sqrt(max(0.0, 1.0 - limit)))
    direct = None
    if cross_validate:
        tau, xi = _rigid_pair_maps(A, M)
        n = A.shape[0] + 1
        vals = []
        for p in range(3, 13):
            w = _omega_path_point(n, j, 1.0 - 2.0**-p)
            if maps_equal(tau, xi):
                vals.append(1.0)
                continue
            rho = pseudo_hyperbolic_distance(apply(tau, w), apply(xi, w))
            vals.append(1.0 - rho**2)
        direct = _richardson(vals)
    return SliceLimitResult(
        j=j, Z=Z, W=W, lam=lam, gammacol=gam,
        limit_value=limit, rho_limit=rho_limit, direct_limit=direct,
    )


def _slice_limit_certificate(
    tau: LinFracMap,
    xi: LinFracMap,
    A: np.ndarray,
    Mmat: np.ndarray,
    space: SpaceSpec | None,
    chain: tuple,
) -> WitnessCertificate:
    """Certificate along the omega_t path of the best-separated column."""
    best = None
    for j in range(A.shape[0]):
        res = slice_limit_test(A, Mmat, j, cross_validate=True)
        if best is None or res.rho_limit > best.rho_limit:
            best = res
    if best is None or best.rho_limit <= 1e-6:
        raise WitnessHypothesisError("no column separates the rigid forms")
    n = tau.dim
    points, records = [], []
    for p in range(4, 21):
        z = _omega_path_point(n, best.j, 1.0 - 2.0**-p)
        if np.linalg.norm(z) > BOUNDARY_CAP:
            continue
        rec = eq1_quantity(tau, xi, z, space)
        points.append(z)
        records.append(rec)
    cert = WitnessCertificate(
        kind="slice-limit",
        points=tuple(points),
        records=tuple(records),
        claimed_inf=min(r.eq1_value for r in records),
        pair=(tau, xi),
        chain=chain,
        details={
            "column": best.j,
            "limit_value": best.limit_value,
            "rho_limit": best.rho_limit,
            "direct_limit": best.direct_limit,
            "ratio_limit": 1.0 / (2.0 - best.lam**2),
        },
    )
    cert.validate()
    return cert


# ---------------------------------------------------------------------------
# the verdict cascade


class VerdictKind(Enum):
    EQUAL = "equal"
    COMPACT_BOTH_SMALL = "compact-both-small"
    NOT_COMPACT = "not-compact"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class Verdict:
    kind: VerdictKind
    sup_norm_phi: float
    sup_norm_psi: float
    certificate: WitnessCertificate | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def chain(self) -> tuple:
        return self.certificate.chain if self.certificate is not None else ()


def _unitary_map(U: np.ndarray) -> LinFracMap:
    return LinFracMap.unitary(U)


def _pull_back_unitary(cert: WitnessCertificate, V: np.ndarray, pair: tuple) -> WitnessCertificate:
    """Re-express a certificate through z -> V z.

    Every recorded quantity (rho, both ratios, kernel differences) is
    invariant under composing the pair with unitaries, so only the points
    move; the records transfer verbatim to the given original pair.
    """
    new_records = tuple(
        WitnessRecord(
            point=V @ r.point,
            abs_z=r.abs_z,
            rho=r.rho,
            ratio1=r.ratio1,
            ratio2=r.ratio2,
            eq1_value=r.eq1_value,
            kernel_diff_sq=r.kernel_diff_sq,
        )
        for r in cert.records
    )
    return WitnessCertificate(
        kind=cert.kind,
        points=tuple(r.point for r in new_records),
        records=new_records,
        claimed_inf=cert.claimed_inf,
        pair=pair,
        chain=cert.chain,
        details=cert.details,
    )


def _certify(
    phi: LinFracMap,
    psi: LinFracMap,
    space: SpaceSpec,
    cfg: WitnessConfig,
    chain: tuple,
    allow_krein: bool,
    depth: int,
) -> WitnessCertificate:
    n = phi.dim
    one = e1(n)

    if np.linalg.norm(apply(phi, one) - one) > cfg.match_tol:
        # normalize so the lead map fixes e1; swap if only psi has contact
        lead, other = phi, psi
        swapped = False
        s = sup_norm(lead)
        if s.value < 1.0:
            lead, other = psi, phi
            swapped = True
            s = sup_norm(lead)
            if s.value < 1.0:
                raise InconclusiveError("neither map attains the boundary")
        zeta = s.maximizer
        eta = apply(lead, zeta)
        eta = eta / np.linalg.norm(eta)
        U = unitary_sending(eta, one)
        V = unitary_sending(one, zeta)
        lead_n = compose(_unitary_map(U), compose(lead, _unitary_map(V)))
        other_n = compose(_unitary_map(U), compose(other, _unitary_map(V)))
        step = ("swap-order",) if swapped else ()
        cert = _certify(
            lead_n, other_n, space, cfg,
            chain + step + ("unitary-normalize",), allow_krein, depth,
        )
        if cert.pair == (lead_n, other_n):
            return _pull_back_unitary(cert, V, (lead, other))
        return cert

    # phi fixes e1
    if np.linalg.norm(apply(psi, one) - one) > cfg.match_tol:
        return boundary_witness(phi, psi, one, space, cfg)
    d1 = boundary_derivative(phi, one)
    d2 = boundary_derivative(psi, one)
    if abs(d1 - d2) > cfg.match_tol:
        return boundary_witness(phi, psi, one, space, cfg)

    if allow_krein:
        tau, xi = krein_reduction(phi, psi)
        krein_chain = chain + ("krein-adjoint-reduction",)
        if maps_equal(tau, xi):
            return _deep_affine_reduction(phi, psi, space, cfg, krein_chain, depth)
        return _certify(tau, xi, space, cfg, krein_chain, False, depth)

    # both fix e1 with matching (unit) derivative; no further Krein steps
    cls1 = classify_fixing_e1(phi)
    cls2 = classify_fixing_e1(psi)
    if cls1 is E1Class.PARABOLIC and cls2 is E1Class.PARABOLIC:
        cert = _siegel_translation_witness(phi, psi, cfg, space, chain)
        return cert

    # a map with an interior fixed point leads the rigidity route
    lead, other = phi, psi
    fixed = interior_fixed_points(lead)
    if not fixed:
        lead, other = psi, phi
        fixed = interior_fixed_points(lead)
    if fixed:
        p = min(fixed, key=np.linalg.norm)
        if np.linalg.norm(p) > 1e-9:
            swap_p = automorphism_point_swap(p)
            Up = unitary_sending(apply(swap_p, one), one)
            conj = compose(_unitary_map(Up), swap_p)
            # the point swap is an involution, so conj^{-1} = swap_p o U*
            conj_inv = compose(swap_p, _unitary_map(Up.conj().T))
            lead = compose(conj, compose(lead, conj_inv))
            other = compose(conj, compose(other, conj_inv))
            chain = chain + ("conjugate-interior-fixed-point",)
        if is_identity_on_e1_circle(lead):
            if is_identity_on_e1_circle(other):
                A = rigid_normal_form(lead)
                Mmat = rigid_normal_form(other)
                return _slice_limit_certificate(lead, other, A, Mmat, space, chain)
            zeta_c = _discriminating_circle_point(lead, other, cfg)
            return boundary_witness(lead, other, zeta_c, space, cfg)

    # fallback: generalized translation data may still separate the pair
    try:
        return _siegel_translation_witness(phi, psi, cfg, space, chain)
    except (WitnessHypothesisError, ClassificationError, NotSelfMapError) as exc:
        raise InconclusiveError(f"certificate cascade exhausted: {exc}") from exc


def _discriminating_circle_point(
    lead: LinFracMap, other: LinFracMap, cfg: WitnessConfig
) -> np.ndarray:
    """A circle point where the maps' value or derivative data differ."""
    n = lead.dim
    best, best_score = None, 0.0
    for theta in 2.0 * np.pi * np.arange(16) / 16.0:
        zeta = np.zeros(n, dtype=complex)
        zeta[0] = np.exp(1j * theta)
        val = float(np.linalg.norm(apply(other, zeta) - zeta))
        score = val
        if val <= cfg.match_tol:
            score = abs(boundary_derivative(other, zeta) - boundary_derivative(lead, zeta))
        if score > best_score:
            best, best_score = zeta, score
    if best is None or best_score <= cfg.match_tol:
        raise InconclusiveError("no circle point separates the rigid pair")
    return best


def _deep_affine_reduction(
    phi: LinFracMap,
    psi: LinFracMap,
    space: SpaceSpec,
    cfg: WitnessConfig,
    chain: tuple,
    depth: int,
) -> WitnessCertificate:
    """Affine-rank reduction: restrict both maps to a slice through their
    common K-dimensional affine range and recurse on the smaller ball."""
    n = phi.dim
    if depth <= 0:
        raise InconclusiveError("affine reduction depth exhausted")
    K1 = affine_range_dimension(phi)
    K2 = affine_range_dimension(psi)
    if K1 != K2 or not (1 <= K1 < n):
        raise InconclusiveError(
            f"reduced maps coincide but affine ranks are {K1}, {K2}: no slice reduction"
        )
    K = K1
    one = e1(n)

    # rho2: automorphism fixing e1 carrying the affine range onto the slice
    q = apply(phi, np.zeros(n))
    swap_q = automorphism_point_swap(q)
    Lmat = compose(swap_q, phi).A
    Usvd, svals, _ = np.linalg.svd(Lmat)
    basis = Usvd[:, :K]
    full = np.linalg.qr(
        np.concatenate([basis, np.eye(n, dtype=complex)], axis=1)
    )[0][:, :n]
    Umat = full.conj().T
    W = compose(_unitary_map(Umat), swap_q)
    eta = apply(W, one)
    if np.linalg.norm(eta[K:]) > 1e-8:
        raise InconclusiveError("range normalization did not keep e1 in the slice")
    G = np.eye(n, dtype=complex)
    G[:K, :K] = unitary_sending(eta[:K] / np.linalg.norm(eta[:K]), e1(K))
    rho2 = compose(_unitary_map(G), W)

    rng = np.random.default_rng(11)
    for _ in range(40):
        zs = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        zs *= rng.uniform(0.1, 0.9) / np.linalg.norm(zs)
        if np.linalg.norm(apply(phi, zs) - apply(psi, zs)) < 1e-7:
            continue
        swap_z = automorphism_point_swap(zs)
        Uz = unitary_sending(apply(swap_z, one), one)
        rho1 = compose(swap_z, _unitary_map(Uz.conj().T))  # fixes e1, 0 -> zs
        try:
            mu = restriction_to_slice(phi, rho1, rho2, K)
            nu = restriction_to_slice(psi, rho1, rho2, K)
        except SliceReductionError:
            continue
        if maps_equal(mu, nu):
            continue
        gamma = -1.0 if space.kind == "hardy" else float(space.alpha)
        space_K = SpaceSpec.bergman(K, n - K + gamma)
        return _certify(
            mu, nu, space_K, cfg,
            chain + (f"affine-slice-reduction K={K}",), True, depth - 1,
        )
    raise InconclusiveError("no slice exhibited the difference of the deep pair")


def compactness_verdict(
    phi: LinFracMap,
    psi: LinFracMap,
    space: SpaceSpec,
    cfg: WitnessConfig | None = None,
) -> Verdict:
    """Decide the compactness trichotomy for C_phi - C_psi.

    Returns EQUAL when the maps coincide, COMPACT_BOTH_SMALL when both
    sup-norms stay below 1 (each operator is then compact on its own),
    and otherwise NOT_COMPACT together with a witness certificate.  An
    INCONCLUSIVE verdict means the certificate search failed, which for
    validated inputs indicates a numerical failure, not a mathematical
    possibility; the diagnostics say so.
    """
    cfg = cfg or WitnessConfig()
    if phi.dim != psi.dim or phi.dim != space.dim:
        raise NotSelfMapError("dimension mismatch between maps and space")
    for name, m in (("phi", phi), ("psi", psi)):
        if not np.linalg.norm(m.C) < abs(m.d):
            raise NotSelfMapError(f"{name} violates |d| > |C|")
    s1 = sup_norm(phi)
    s2 = sup_norm(psi)
    if maps_equal(phi, psi):
        return Verdict(VerdictKind.EQUAL, s1.value, s2.value)
    if s1.value < 1.0 - 1e-6 and s2.value < 1.0 - 1e-6:
        return Verdict(VerdictKind.COMPACT_BOTH_SMALL, s1.value, s2.value)
    try:
        cert = _certify(phi, psi, space, cfg, (), True, phi.dim)
    except InconclusiveError as exc:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            s1.value,
            s2.value,
            diagnostics={
                "reason": str(exc),
                "note": (
                    "distinct self-maps without two small sup-norms are never "
                    "compactly different; this outcome indicates a numerical failure"
                ),
            },
        )
    return Verdict(VerdictKind.NOT_COMPACT, s1.value, s2.value, certificate=cert)
