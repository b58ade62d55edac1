"""Normal cones of the second-order cone complementarity set."""

from .cones import (
    Branch,
    NormalCandidate,
    OmegaSample,
    OriginCertificate,
    distance_to_regular_cone,
    graph_normal_contains,
    limiting_normal_contains,
    normal_contains,
    omega_pair_from,
    proximal_normal_contains,
    regular_normal_contains,
    regular_normal_contains_via_system,
    sample_anchor,
    sample_limiting_normal,
    sample_omega_near,
    sample_regular_normal,
    solve_origin_branch,
)
from .errors import (
    AmbiguousCase,
    DimensionMismatch,
    InvalidGrid,
    NotDifferentiable,
    NotInOmega,
    SocError,
    UnsupportedRegion,
    WrongCase,
)
from .oracles import (
    OracleConfig,
    OracleReport,
    OracleVerdict,
    SweepReport,
    equivalence_sweep,
    limiting_oracle,
    oracle_ratio,
    proximal_oracle,
    regular_oracle,
    variational_inequality_sup,
)
from .proj_calculus import (
    BKind,
    BSubdifElement,
    CalmnessReport,
    ProjJacobian,
    alpha_w_matrix,
    b_subdif_elements_at_zero,
    calmness_report,
    dir_derivative,
    jacobian,
    limiting_coderivative_contains,
)
from .soc_core import (
    DEFAULT_TOL,
    CaseTag,
    ConeKind,
    ConeRegion,
    MembershipVerdict,
    OmegaPair,
    RayMode,
    SocVector,
    SpectralDecomp,
    Tolerances,
    classify_pair,
    classify_point,
    project_polar,
    project_soc,
    ray_membership,
    reflect,
    spectral_decompose,
)

__all__ = [name for name in dir() if not name.startswith("_")]
