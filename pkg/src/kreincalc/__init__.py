"""Functional calculus for self-adjoint linear relations on finite
dimensional Krein spaces.

Relations are column spans of stacked graph bases; the definitizing
machinery factors q(A) = T T^+ through a Hilbert space, transports the
relation to a diagonalizable compression, and evaluates jet-valued
functions along the spectrum.
"""

from .errors import (
    InconsistencyError,
    InvarianceError,
    JetAtPoleError,
    JetNotInvertibleError,
    KreinCalcError,
    NotBoundedError,
    NotInCommutantError,
    NotInResolventSetError,
    NotPositiveError,
    NotRealError,
    NotSelfAdjointError,
    PointNotInSpectrumError,
    PoleMeetsSpectrumError,
    PreconditionError,
    SingularMoebiusError,
    ValidationError,
)
from .jetcalc import (
    Decomposition,
    JetFunction,
    apply_calculus,
    decompose,
    decompose_polynomial,
    embed_rational,
    indicator,
    jet_invert,
    jet_multiply,
    jet_one,
    norm_f,
    omega_kernel_check,
    pi1_range,
    q_jets,
    spectral_projection,
)
from .krein import (
    DefinitizablePair,
    Factorization,
    GramSpace,
    SpectralMeasure,
    cayley,
    derive_definitizing,
    gram_factorize,
    map_adjoint,
    spectral_measure,
    symmetrize_definitizing,
    theta_op,
    theta_relation,
    verify_definitizing,
    xi,
)
from .rational import Polynomial, RationalFunction, moebius_scalar, rational_from_scalar
from .relations import (
    INF,
    LinearRelation,
    MoebiusMap,
    Subspace,
    as_point,
    chordal_distance,
    conj_point,
    diagonal_image,
    diagonal_preimage,
    is_inf,
    point_sort_key,
)
from .spectral import (
    SpectrumReport,
    in_resolvent_set,
    rational_apply,
    resolvent_at,
    spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Decomposition",
    "DefinitizablePair",
    "Factorization",
    "GramSpace",
    "InconsistencyError",
    "InvarianceError",
    "JetAtPoleError",
    "JetFunction",
    "JetNotInvertibleError",
    "KreinCalcError",
    "LinearRelation",
    "MoebiusMap",
    "NotBoundedError",
    "NotInCommutantError",
    "NotInResolventSetError",
    "NotPositiveError",
    "NotRealError",
    "NotSelfAdjointError",
    "PointNotInSpectrumError",
    "PoleMeetsSpectrumError",
    "Polynomial",
    "PreconditionError",
    "RationalFunction",
    "SingularMoebiusError",
    "SpectralMeasure",
    "SpectrumReport",
    "Subspace",
    "ValidationError",
    "apply_calculus",
    "cayley",
    "as_point",
    "chordal_distance",
    "conj_point",
    "decompose",
    "decompose_polynomial",
    "derive_definitizing",
    "diagonal_image",
    "diagonal_preimage",
    "embed_rational",
    "gram_factorize",
    "in_resolvent_set",
    "indicator",
    "is_inf",
    "jet_invert",
    "jet_one",
    "jet_multiply",
    "map_adjoint",
    "moebius_scalar",
    "norm_f",
    "omega_kernel_check",
    "pi1_range",
    "q_jets",
    "rational_apply",
    "point_sort_key",
    "rational_from_scalar",
    "resolvent_at",
    "spectral_measure",
    "spectral_projection",
    "spectrum",
    "symmetrize_definitizing",
    "theta_op",
    "theta_relation",
    "verify_definitizing",
    "xi",
]
