"""Exact first and higher Chern classes through Cech-de Rham cocycles
with truncated p-adic coefficients."""

__version__ = "0.1.0"

from .padic import PAdicContext, PAdicElem, inv_one_unit, log_one_unit, vp_factorial
from .charts import (
    ChartedSpace,
    DiffForm,
    LaurentSection,
    SpaceDescriptor,
    UnitWitness,
    build_space,
    d,
    dlog,
    transition,
)
from .cech import (
    TotalCochain,
    class_coeff,
    cup,
    hyperplane_cocycle,
    residue_coeff,
    solve_coboundary,
    solve_in_span,
    total_diff,
    total_ranks,
)
from .chern import (
    GaugeCochain,
    LiftedUnitCocycle,
    apply_gauge,
    c1_class,
    c1_cocycle,
    frobenius_check,
    line_bundle_cocycle,
    perturb,
    zeta_witness,
)
from .bundle import (
    ChernVector,
    chern_classes,
    cohomology_ranks,
    decompose,
    whitney_check,
    xi_cocycle,
)
from .mpd import MpdContext, MpdTerm, compatible_lift_cocycle, level_rescale_check, mpd_reduce, psi_m
from .errors import (
    GaugeMismatch,
    NotAUnit,
    NotClosed,
    NotInSpan,
    PrecisionExhausted,
    RigidChernError,
    UnsupportedSpace,
    ValuationError,
    WindowOverflow,
    WindowTooSmall,
)

__all__ = [
    "ChartedSpace",
    "DiffForm",
    "LaurentSection",
    "SpaceDescriptor",
    "UnitWitness",
    "build_space",
    "d",
    "dlog",
    "transition",
    "TotalCochain",
    "class_coeff",
    "cup",
    "hyperplane_cocycle",
    "residue_coeff",
    "solve_coboundary",
    "solve_in_span",
    "total_diff",
    "total_ranks",
    "GaugeCochain",
    "LiftedUnitCocycle",
    "apply_gauge",
    "c1_class",
    "c1_cocycle",
    "frobenius_check",
    "line_bundle_cocycle",
    "perturb",
    "zeta_witness",
    "ChernVector",
    "chern_classes",
    "cohomology_ranks",
    "decompose",
    "whitney_check",
    "xi_cocycle",
    "GaugeMismatch",
    "NotAUnit",
    "NotClosed",
    "NotInSpan",
    "PrecisionExhausted",
    "RigidChernError",
    "UnsupportedSpace",
    "ValuationError",
    "WindowOverflow",
    "WindowTooSmall",
    "PAdicContext",
    "PAdicElem",
    "inv_one_unit",
    "log_one_unit",
    "vp_factorial",
    "MpdContext",
    "MpdTerm",
    "compatible_lift_cocycle",
    "level_rescale_check",
    "mpd_reduce",
    "psi_m",
]
