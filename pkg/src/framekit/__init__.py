"""Finite frame-theory toolkit: approximately dual frames, perturbation
bound audits, and discrete Gabor systems on cyclic groups."""

from .linalg import TolerancePolicy, operator_norm
from .frames import (
    Frame,
    FrameBounds,
    analysis_matrix,
    canonical_dual,
    excess,
    frame_bounds,
    frame_norm_distance,
    frame_operator,
    is_dual_pair,
    synthesis_matrix,
)
from .approxdual import (
    ApproxDualParams,
    ApproxDualReport,
    bessel_to_theta,
    build_approx_dual,
    canonical_approx_dual,
    minimal_norm_audit,
    validate_params,
)
from .perturbation import (
    BoundAudit,
    ClosenessReport,
    GapReport,
    best_approx_dual,
    closeness,
    deviation_bound_audit,
    dis_identity_residual,
    gamma_inverse,
    gamma_map,
    gap_bound_audit,
    per1200_audit,
    subspace_gap,
    theta_ba,
)
from .gabor import (
    GaborSystem,
    build_gabor_frame,
    correlation_r,
    envelope_audit,
    gabor_approx_dual_window,
    gabor_perturbation_audit,
    walnut_report,
    wiener_norm,
)
from .exam import generate_exam

__version__ = "0.1.0"
