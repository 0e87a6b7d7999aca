"""Verification instruments: weighted and fractional norms, snapshot-stack
time derivatives, the scale-matched square norm, the high-order energy,
vorticity transport checks, bootstrap-style run monitors, and discrete
inequality laboratories."""

from .energy import EnergyReport, energy_E, energy_p, energy_report
from .families import (
    HARDY_RATIO_BOUND,
    HODGE_RATIO_BOUND,
    TRACE_RATIO_BOUND,
    hardy_family,
    hodge_family,
    trace_family,
)
from .lemmas import (
    HardyResult,
    HodgeResult,
    HypothesisViolation,
    TraceResult,
    hardy_check,
    hodge_check,
    trace_check,
)
from .monitors import (
    BootstrapMonitor,
    ConditionReport,
    MonitorReport,
    initial_vertical_column_identity,
    vertical_column_quadratic_form,
)
from .norms import (
    boundary_fractional_norm,
    fractional_interior_norm,
    sobolev_norm,
    sobolev_norm_halfstep,
    tangential_multi_indices,
    tangential_partial,
    weighted_h1_norm,
)
from .snorm import (
    GammaNormSlice,
    SNormBlocks,
    absolute_flow_map,
    norm_S,
    norm_S_gamma,
    norm_S_gamma_slice,
    norm_S_slice,
    sobolev_norm_absolute,
    sobolev_norm_absolute_halfstep,
)
from .stack import (
    InsufficientHistoryError,
    TimeDerivativeStack,
    fd_weights,
    time_derivatives,
)
from .vorticity import (
    TransportJet,
    VorticityReport,
    expansion_residual,
    independent_components,
    jet_from_stack,
    two_form_l2,
    vort_transport_two_form,
    vorticity_diagnostics,
)

__all__ = [
    "BootstrapMonitor",
    "HARDY_RATIO_BOUND",
    "HODGE_RATIO_BOUND",
    "TRACE_RATIO_BOUND",
    "ConditionReport",
    "EnergyReport",
    "GammaNormSlice",
    "HardyResult",
    "HodgeResult",
    "HypothesisViolation",
    "InsufficientHistoryError",
    "MonitorReport",
    "SNormBlocks",
    "TimeDerivativeStack",
    "TraceResult",
    "TransportJet",
    "VorticityReport",
    "absolute_flow_map",
    "boundary_fractional_norm",
    "energy_E",
    "energy_p",
    "energy_report",
    "expansion_residual",
    "fd_weights",
    "fractional_interior_norm",
    "hardy_check",
    "hardy_family",
    "hodge_check",
    "hodge_family",
    "independent_components",
    "initial_vertical_column_identity",
    "jet_from_stack",
    "norm_S",
    "norm_S_gamma",
    "norm_S_gamma_slice",
    "norm_S_slice",
    "sobolev_norm",
    "sobolev_norm_absolute",
    "sobolev_norm_absolute_halfstep",
    "sobolev_norm_halfstep",
    "tangential_multi_indices",
    "tangential_partial",
    "time_derivatives",
    "trace_check",
    "trace_family",
    "two_form_l2",
    "vertical_column_quadratic_form",
    "vorticity_diagnostics",
    "vort_transport_two_form",
    "weighted_h1_norm",
]
