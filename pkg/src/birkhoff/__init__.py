"""Structure-preserving one-step schemes and diagnostics for Birkhoffian systems."""

from .core import (
    BirkhoffSystem,
    PhasePoint,
    SystemKind,
    k_from_f,
    regularity,
    vector_field,
    velocity,
)
from .diagnostics import (
    CompareRow,
    ConvergenceReport,
    attach_residuals,
    compare,
    convergence_order,
    rows_to_csv,
    symplectic_residual,
)
from .errors import (
    BirkhoffError,
    EvaluationError,
    InconsistencyError,
    KindError,
    NewtonError,
    RegularityError,
    StepFailure,
    TransversalityError,
    UnsupportedOrderError,
)
from .genscheme import (
    CoefficientSet,
    GeneratingScheme,
    a_functional,
    assemble_psi,
    coefficients,
    hj_rhs,
    identity_generating,
    make_scheme,
)
from .oscillator import (
    DampedOscillator,
    euler_center,
    exact_solution,
    oscillator_alpha,
    oscillator_system,
    scheme_first_order,
    scheme_second_order,
)
from .selfadjoint import (
    RawFirstOrderSystem,
    SelfAdjointReport,
    check_self_adjointness,
    contact_matrix,
    reconstruct_b,
    reconstruct_f,
)
from .stepper import Trajectory, integrate, step, step_jacobian
from .transform import (
    AlphaTransform,
    StructureMatrices,
    alpha_verify,
    canonical_j,
    scaled_canonical_alpha,
    sigma,
    transversality_equivalents,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaTransform",
    "BirkhoffError",
    "BirkhoffSystem",
    "CoefficientSet",
    "CompareRow",
    "ConvergenceReport",
    "DampedOscillator",
    "EvaluationError",
    "GeneratingScheme",
    "InconsistencyError",
    "KindError",
    "NewtonError",
    "PhasePoint",
    "RawFirstOrderSystem",
    "RegularityError",
    "SelfAdjointReport",
    "StepFailure",
    "StructureMatrices",
    "SystemKind",
    "Trajectory",
    "TransversalityError",
    "UnsupportedOrderError",
    "a_functional",
    "alpha_verify",
    "assemble_psi",
    "attach_residuals",
    "canonical_j",
    "check_self_adjointness",
    "coefficients",
    "compare",
    "contact_matrix",
    "convergence_order",
    "euler_center",
    "exact_solution",
    "hj_rhs",
    "identity_generating",
    "integrate",
    "k_from_f",
    "make_scheme",
    "oscillator_alpha",
    "oscillator_system",
    "reconstruct_b",
    "reconstruct_f",
    "regularity",
    "rows_to_csv",
    "scaled_canonical_alpha",
    "scheme_first_order",
    "scheme_second_order",
    "sigma",
    "step",
    "step_jacobian",
    "symplectic_residual",
    "transversality_equivalents",
    "vector_field",
    "velocity",
]
