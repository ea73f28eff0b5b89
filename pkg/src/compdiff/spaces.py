"""Weighted Hardy space machinery on the ball.

Monomial norms for the Hardy space H^2(B_N), the weighted Bergman spaces
A^2_alpha(B_N) and general weighted Hardy spaces H^2(beta, B_N); the
weight sequences realizing Bergman spaces as weighted Hardy spaces;
reproducing kernels; and the coefficient-level extension and restriction
operators between balls of different dimension.

All Gamma-ratio arithmetic is done in the log domain, so norms stay
finite well past degree 170 where the raw factorials overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import GeometryDomainError
from .geometry import as_cvector, herm


@lru_cache(maxsize=None)
def multi_indices(dim: int, degree: int) -> tuple:
    """All multi-indices of length ``dim`` with |alpha| <= degree.

    Graded lexicographic order: by total degree, then by decreasing
    leading exponents, e.g. (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
    This ordering fixes the matrix layout used by the operator module.
    """
    out = []
    for s in range(degree + 1):
        out.extend(_compositions(s, dim))
    return tuple(out)


def _compositions(s: int, parts: int) -> list:
    if parts == 1:
        return [(s,)]
    out = []
    for head in range(s, -1, -1):
        out.extend([(head,) + rest for rest in _compositions(s - head, parts - 1)])
    return out


def index_order(alpha) -> int:
    return int(sum(alpha))


@dataclass(frozen=True)
class WeightSequence:
    """Closed-form weight rule s -> beta(s)^2 > 0."""

    rule: Callable[[int], float]
    label: str = ""

    def beta_sq(self, s: int) -> float:
        v = float(self.rule(int(s)))
        if not v > 0.0:
            raise GeometryDomainError(f"beta({s})^2 = {v} is not positive")
        return v


HARDY_WEIGHT = WeightSequence(rule=lambda s: 1.0, label="hardy")


@dataclass(frozen=True)
class SpaceSpec:
    """Which Hilbert space norms and kernels refer to.

    kind is one of "hardy", "bergman" (with parameter ``alpha`` > -1) or
    "weighted-hardy" (with a WeightSequence).
    """

    kind: str
    dim: int
    alpha: float | None = None
    weights: WeightSequence | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryDomainError("space dimension must be >= 1")
        if self.kind == "bergman":
            if self.alpha is None or not (self.alpha > -1.0):
                raise GeometryDomainError(f"bergman requires alpha > -1, got {self.alpha}")
        elif self.kind == "weighted-hardy":
            if self.weights is None:
                raise GeometryDomainError("weighted-hardy requires a weight sequence")
        elif self.kind != "hardy":
            raise GeometryDomainError(f"unknown space kind {self.kind!r}")

    @classmethod
    def hardy(cls, dim: int) -> "SpaceSpec":
        return cls(kind="hardy", dim=dim)

    @classmethod
    def bergman(cls, dim: int, alpha: float) -> "SpaceSpec":
        return cls(kind="bergman", dim=dim, alpha=float(alpha))

    @classmethod
    def weighted_hardy(cls, dim: int, weights: WeightSequence) -> "SpaceSpec":
        return cls(kind="weighted-hardy", dim=dim, weights=weights)

    def describe(self) -> str:
        if self.kind == "hardy":
            return f"H^2(B_{self.dim})"
        if self.kind == "bergman":
            return f"A^2_{self.alpha}(B_{self.dim})"
        return f"H^2(beta, B_{self.dim})[{self.weights.label}]"


def hardy_monomial_norm_sq(alpha, dim: int) -> float:
    """|z^alpha|^2 in H^2(B_dim): (dim-1)! alpha! / (dim-1+s)!."""
    s = index_order(alpha)
    log_val = (
        gammaln(dim)
        + sum(gammaln(a + 1) for a in alpha)
        - gammaln(dim + s)
    )
    return float(np.exp(log_val))


def bergman_monomial_norm_sq(alpha, dim: int, gamma: float) -> float:
    """|z^alpha|^2 in A^2_gamma(B_dim): alpha! Gamma(N+gamma+1) / Gamma(N+s+gamma+1)."""
    s = index_order(alpha)
    log_val = (
        sum(gammaln(a + 1) for a in alpha)
        + gammaln(dim + gamma + 1)
        - gammaln(dim + s + gamma + 1)
    )
    return float(np.exp(log_val))


def monomial_norm_sq(alpha, space: SpaceSpec) -> float:
    """Squared norm of the monomial z^alpha in the given space."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != space.dim or any(a < 0 for a in alpha):
        raise GeometryDomainError(f"invalid multi-index {alpha} for dim {space.dim}")
    if space.kind == "hardy":
        return hardy_monomial_norm_sq(alpha, space.dim)
    if space.kind == "bergman":
        return bergman_monomial_norm_sq(alpha, space.dim, space.alpha)
    return hardy_monomial_norm_sq(alpha, space.dim) * space.weights.beta_sq(index_order(alpha))


# ---------------------------------------------------------------------------
# weight sequences of the Bergman-as-weighted-Hardy equivalences


def _log_factorial_ratio(N: int, K: int, s: int) -> float:
    # log of (N-1)! (K-1+s)! / ((K-1)! (N-1+s)!)
    return float(gammaln(N) + gammaln(K + s) - gammaln(K) - gammaln(N + s))


def tilde_weight(beta: WeightSequence, N: int, K: int) -> WeightSequence:
    """The companion weight tilde-beta(s)^2 = (N-1)!(K-1+s)!/((K-1)!(N-1+s)!) beta(s)^2.

    This is the weight on B_K for which extension into B_N against
    ``beta`` is an exact isometry.
    """
    if not (1 <= K < N):
        raise GeometryDomainError(f"need 1 <= K < N, got K={K}, N={N}")

    def rule(s: int) -> float:
        return float(np.exp(_log_factorial_ratio(N, K, s))) * beta.beta_sq(s)

    return WeightSequence(rule=rule, label=f"tilde[{beta.label}] N={N} K={K}")


@dataclass(frozen=True)
class EquivalentWeight:
    """A weight sequence plus two-sided equivalence constants.

    ``lower`` and ``upper`` bound the quantity named in ``bounded``:
    for K = N the plain norm ratio H^2(beta) / A^2_gamma, for K < N the
    factorial ratio times (s+1)^(N-K), whose boundedness is what makes
    the norms equivalent.
    """

    weights: WeightSequence
    lower: float
    upper: float
    bounded: str


def equivalent_weight(gamma: float, N: int, K: int | None = None) -> EquivalentWeight:
    """Weight sequence realizing a Bergman space as a weighted Hardy space.

    For K = N (or omitted): beta(s)^2 = (s+1)^(-(gamma+1)) gives
    H^2(beta, B_N) = A^2_gamma(B_N) with equivalent norms; gamma = -1
    degenerates to the Hardy space itself (beta constant).

    For K < N: tilde-beta(s)^2 = (N-1)!(K-1+s)!/((K-1)!(N-1+s)!) times
    (s+1)^(-(gamma+1)) gives H^2(tilde-beta, B_K) = A^2_{N-K+gamma}(B_K).
    """
    if K is None:
        K = N
    if not (1 <= K <= N):
        raise GeometryDomainError(f"need 1 <= K <= N, got K={K}, N={N}")
    if gamma < -1.0:
        raise GeometryDomainError(f"gamma = {gamma} < -1")

    if K == N:
        def rule(s: int) -> float:
            return float((s + 1.0) ** (-(gamma + 1.0)))

        weights = WeightSequence(rule=rule, label=f"(s+1)^-({gamma}+1)")
        if gamma == -1.0:
            return EquivalentWeight(weights, 1.0, 1.0, "hardy norm ratio (exact)")
        # ratio of the H^2(beta) and A^2_gamma monomial norms; independent
        # of the multi-index, Stirling limit Gamma(N)/Gamma(N+gamma+1)
        svals = np.arange(0, 401)
        log_ratio = (
            gammaln(N)
            + gammaln(N + svals + gamma + 1)
            - gammaln(N + svals)
            - (gamma + 1) * np.log(svals + 1.0)
            - gammaln(N + gamma + 1)
        )
        ratios = np.exp(log_ratio)
        limit = float(np.exp(gammaln(N) - gammaln(N + gamma + 1)))
        lo = min(float(ratios.min()), limit)
        hi = max(float(ratios.max()), limit)
        return EquivalentWeight(weights, lo, hi, "norm ratio H^2(beta)/A^2_gamma")

    def rule(s: int) -> float:
        return float(
            np.exp(_log_factorial_ratio(N, K, s)) * (s + 1.0) ** (-(gamma + 1.0))
        )

    weights = WeightSequence(rule=rule, label=f"lemma-b N={N} K={K} gamma={gamma}")
    c_hi = float(np.exp(gammaln(N) - gammaln(K)))
    c_lo = c_hi * (N + 1.0) ** (-(N - K))
    return EquivalentWeight(
        weights, c_lo, c_hi, "factorial ratio times (s+1)^(N-K)"
    )


# ---------------------------------------------------------------------------
# reproducing kernels


def kernel_exponent(space: SpaceSpec) -> float:
    """The exponent in K_w(z) = (1 - <z, w>)^(-exponent).

    N for the Hardy space, N + 1 + alpha for Bergman.  Weighted Hardy
    spaces have no such closed form and are rejected.
    """
    if space.kind == "hardy":
        return float(space.dim)
    if space.kind == "bergman":
        return float(space.dim + 1 + space.alpha)
    raise GeometryDomainError("no closed-form kernel for a general weighted Hardy space")


def kernel_eval(space: SpaceSpec, w, z) -> complex:
    """Evaluate the reproducing kernel K_w(z) = (1 - <z, w>)^(-beta_exp)."""
    w = as_cvector(w)
    z = as_cvector(z)
    c = kernel_exponent(space)
    base = 1.0 - herm(z, w)
    return complex(np.exp(-c * np.log(base)))


def kernel_norm_sq(space: SpaceSpec, w) -> float:
    """|K_w|^2 = K_w(w) = (1 - |w|^2)^(-beta_exp)."""
    w = as_cvector(w)
    c = kernel_exponent(space)
    return float((1.0 - np.linalg.norm(w) ** 2) ** (-c))


# ---------------------------------------------------------------------------
# coefficient vectors


@dataclass(frozen=True)
class CoefficientVector:
    """Finitely supported Taylor coefficients c_alpha, |alpha| <= degree."""

    coeffs: dict
    dim: int
    degree: int

    def __post_init__(self):
        for alpha in self.coeffs:
            if len(alpha) != self.dim or index_order(alpha) > self.degree:
                raise GeometryDomainError(f"index {alpha} outside cap {self.degree}")

    def __getitem__(self, alpha) -> complex:
        return self.coeffs.get(tuple(alpha), 0.0 + 0.0j)

    def items(self):
        return self.coeffs.items()

    def evaluate(self, z) -> complex:
        z = as_cvector(z)
        total = 0.0 + 0.0j
        for alpha, c in self.coeffs.items():
            total += c * np.prod([zj**a for zj, a in zip(z, alpha)])
        return complex(total)

    def norm_sq(self, space: SpaceSpec) -> float:
        if space.dim != self.dim:
            raise GeometryDomainError("space/ef dimension mismatch")
        return float(
            sum(abs(c) ** 2 * monomial_norm_sq(alpha, space) for alpha, c in self.coeffs.items())
        )

    def homogeneous_part(self, s: int) -> "CoefficientVector":
        part = {a: c for a, c in self.coeffs.items() if index_order(a) == s}
        return CoefficientVector(part, self.dim, self.degree)


def kernel_coefficients(space: SpaceSpec, w, degree: int) -> CoefficientVector:
    """Taylor coefficients of K_w to total degree ``degree``.

    c_alpha = conj(w^alpha) / |z^alpha|^2; valid in any of the spaces,
    closed-form kernel or not.
    """
    w = as_cvector(w)
    coeffs = {}
    for alpha in multi_indices(space.dim, degree):
        mono = np.prod([wj**a for wj, a in zip(w, alpha)])
        coeffs[alpha] = np.conj(mono) / monomial_norm_sq(alpha, space)
    return CoefficientVector(coeffs, space.dim, degree)


def extend(f: CoefficientVector, N: int) -> CoefficientVector:
    """Extension: view a coefficient vector on B_K inside B_N, K < N.

    Pads multi-indices with zeros; an exact isometry from H^2(tilde-beta,
    B_K) into H^2(beta, B_N).
    """
    K = f.dim
    if not (K < N):
        raise GeometryDomainError(f"extension requires K < N, got {K} >={N}")
    pad = (0,) * (N - K)
    return CoefficientVector({a + pad: c for a, c in f.coeffs.items()}, N, f.degree)


def restrict(F: CoefficientVector, K: int) -> CoefficientVector:
    """Restriction: keep the coefficients with alpha = (alpha', 0').

    Norm-decreasing from H^2(beta, B_N) onto H^2(tilde-beta, B_K), with
    equality exactly when the support already lies in the padded indices.
    """
    N = F.dim
    if not (1 <= K < N):
        raise GeometryDomainError(f"restriction requires 1 <= K < N, got K={K}, N={N}")
    out = {
        a[:K]: c
        for a, c in F.coeffs.items()
        if all(ai == 0 for ai in a[K:])
    }
    return CoefficientVector(out, K, F.degree)


# ---------------------------------------------------------------------------
# Monte-Carlo sphere sampling (oracle support)


def sphere_samples(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples on the unit sphere of C^dim, via normalized
    complex Gaussians (exact uniform law)."""
    g = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return g / np.linalg.norm(g, axis=1)[:, None]
