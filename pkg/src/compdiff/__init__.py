"""Compactness certificates for differences of linear-fractional
composition operators on the unit ball.

The package decides, for linear-fractional self-maps phi and psi of B_N,
whether C_phi - C_psi can be compact on the Hardy or weighted Bergman
spaces: the maps are equal, both have sup-norm below 1, or the
difference is not compact and an explicit boundary witness sequence
certifies it.
"""

from .errors import (
    ClassificationError,
    CompDiffError,
    GeometryDomainError,
    InconclusiveError,
    NotSelfMapError,
    PoleError,
    SeriesDivergenceError,
    SliceReductionError,
    WitnessHypothesisError,
)
from .geometry import (
    EllipsoidSpec,
    HTranslation,
    ball_point,
    boundary_point,
    cayley,
    cayley_inverse,
    e1,
    ellipsoid_membership,
    ellipsoid_point,
    h_translate,
    pseudo_hyperbolic_distance,
    pseudo_hyperbolic_distance_siegel,
    siegel_height,
    siegel_point,
)
from .linfrac import (
    E1Class,
    LinFracMap,
    SiegelParabolicForm,
    affine_range_dimension,
    apply,
    automorphism_point_swap,
    boundary_fixed_points,
    classify_fixing_e1,
    compose,
    directional_derivative,
    from_siegel_parabolic,
    is_self_map,
    krein_adjoint,
    krein_reduction,
    maps_equal,
    random_automorphism,
    restriction_to_slice,
    sup_norm,
    to_siegel_parabolic,
)
from .operators import (
    TruncatedOperator,
    TruncatedPolynomial,
    composition_matrix,
    difference_singular_values,
    kernel_difference_norm,
    monomial_pushforward,
    taylor_expand,
)
from .spaces import (
    CoefficientVector,
    SpaceSpec,
    WeightSequence,
    equivalent_weight,
    extend,
    kernel_eval,
    kernel_norm_sq,
    monomial_norm_sq,
    restrict,
)
from .witness import (
    SliceLimitResult,
    Verdict,
    VerdictKind,
    WitnessCertificate,
    WitnessConfig,
    WitnessRecord,
    boundary_witness,
    compactness_verdict,
    eq1_quantity,
    parabolic_witness,
    slice_limit_test,
)

__version__ = "0.1.0"
