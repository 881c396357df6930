"""Homogenized anisotropic surface tension from periodic double-well cell problems."""

from .cell import (
    CellGrid,
    CellResult,
    CellState,
    SigmaEstimate,
    SolverOptions,
    assemble_energy,
    assemble_gradient,
    estimate_g,
    estimate_sigma,
    minimize_cell,
)
from .gamma import (
    DomainSpec,
    PhaseField,
    RecoveryParams,
    build_recovery,
    diffuse_energy,
    gamma_gap,
    minimize_diffuse,
)
from .lattice import (
    RationalRotation,
    RationalUnitVector,
    check_periodicity,
    lattice_period,
    random_rational_directions,
    rationalize_direction,
    rotation_from_direction,
)
from .potential import (
    GrowthCertificate,
    LowerEnvelope,
    Potential,
    WellPair,
    checkerboard,
    eval_potential,
    eval_potential_dp,
    homogeneous_quartic,
    lower_envelope,
    piecewise_cells,
    smooth_modulated,
    striped,
    validate_hypotheses,
)
from .profile import Mollifier, TransitionProfile, boundary_field, mollified_step, step_field
from .surface import (
    PolyFacet,
    PolyInterface,
    SigmaTable,
    compare_interfaces,
    convexity_check,
    interface_energy,
    polygonal_approximation,
)
from .tiling import build_competitor, plan_tiling, subadditivity_gap

__version__ = "0.1.0"
