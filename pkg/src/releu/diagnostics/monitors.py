"""Run-time monitors: the five bootstrap-style conditions that the
continuation argument keeps open, evaluated as concrete inequalities with
margins.

  1. mass_fraction_small:      f <= 1/8 pointwise.
  2. flow_map_norm:            ||eta||_{H^3.5} <= 2 ||eta(0)||_{H^3.5} + 1.
  3. velocity_derivative_norms: ||dtau^a v||_{H^{3-a/2}} <= initial + 1,
                               for a = 0..alpha_max (aggregated: the
                               reported margin is the worst over a).
  4. jacobian_band:            J within +-1/2 of the initial v^0, pointwise.
  5. vertical_column_band:     the squared Minkowski length of the vertical
                               cofactor column, g^{mu nu} a_mu^3 a_nu^3,
                               within [1/4 + w, 2 + w] pointwise, where
                               w = (initial v^1)^2 + (initial v^2)^2.

All "initial" quantities are frozen at construction from a snapshot stack
centered on the tau = 0 slice (a warm stack is needed because the
velocity-derivative norms require tau-derivatives even at tau = 0).
Margins are (bound - value); a condition holds while its margin is
nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..initial_data import InitialDataBundle
from ..kinematics import FlowMapState, compute_matrices
from ..operators import inner_g
from .norms import sobolev_norm_halfstep
from .snorm import sobolev_norm_absolute_halfstep
from .stack import TimeDerivativeStack


@dataclass(frozen=True)
class ConditionReport:
    name: str
    value: float  # the quantity at its worst point / index
    bound: float  # the active bound there
    margin: float  # distance to the active bound; >= 0 means it holds
    ok: bool
    detail: dict


@dataclass(frozen=True)
class MonitorReport:
    tau: float
    conditions: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.conditions)

    def by_name(self, name: str) -> ConditionReport:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def _one_sided(name, value, bound, detail=None) -> ConditionReport:
    margin = bound - value
    return ConditionReport(
        name=name,
        value=float(value),
        bound=float(bound),
        margin=float(margin),
        ok=bool(margin >= 0.0),
        detail=detail or {},
    )


def _band(name, field, lo, hi) -> ConditionReport:
    """Two-sided pointwise condition lo <= field <= hi (lo, hi may be
    fields). Reports the field value at the node with the smallest margin
    and the bound active there."""
    low = np.asarray(field - lo)
    high = np.asarray(hi - field)
    low_margin = float(np.min(low))
    high_margin = float(np.min(high))
    if low_margin <= high_margin:
        at = np.unravel_index(np.argmin(low), low.shape)
        value = float(np.broadcast_to(field, low.shape)[at])
        bound = float(np.broadcast_to(lo, low.shape)[at])
        margin, worst = low_margin, "lower"
    else:
        at = np.unravel_index(np.argmin(high), high.shape)
        value = float(np.broadcast_to(field, high.shape)[at])
        bound = float(np.broadcast_to(hi, high.shape)[at])
        margin, worst = high_margin, "upper"
    return ConditionReport(
        name=name,
        value=value,
        bound=bound,
        margin=float(margin),
        ok=bool(margin >= 0.0),
        detail={
            "low_margin": low_margin,
            "high_margin": high_margin,
            "worst": worst,
        },
    )


def vertical_column_quadratic_form(mats) -> np.ndarray:
    """g^{mu nu} a_mu^3 a_nu^3 for the cofactor matrix a."""
    a3 = mats.cof[:, 3]
    return inner_g(a3, a3)


def initial_vertical_column_identity(
    grid, data: InitialDataBundle
) -> float:
    """Max deviation of the tau = 0 vertical-column form from its closed
    form 1 + (v^1)^2 + (v^2)^2 (it collapses because the initial flow-map
    gradient is triangular)."""
    state = FlowMapState(0.0, np.zeros((4,) + grid.shape), data.v4)
    mats = compute_matrices(state, grid)
    q = vertical_column_quadratic_form(mats)
    closed = 1.0 + data.v_spatial[0] ** 2 + data.v_spatial[1] ** 2
    return float(np.max(np.abs(q - closed)))


class BootstrapMonitor:
    """Freezes the initial norms/fields the five conditions compare
    against, then evaluates any later slice."""

    def __init__(
        self,
        stack: TimeDerivativeStack,
        data: InitialDataBundle,
        alpha_max: int = 5,
    ):
        if alpha_max < 0 or alpha_max > 6:
            raise ValueError("alpha_max must lie in 0..6 (H^{3-a/2} needs a <= 6)")
        grid = stack.grid
        self.data = data
        self.alpha_max = min(alpha_max, len(stack) - 1)
        self.initial_eta_norm = sobolev_norm_absolute_halfstep(
            grid, stack.center.eta, 7
        )
        v_hist = stack.history("v")
        self.initial_v_norms = {
            alpha: sobolev_norm_halfstep(grid, stack.fd(v_hist, alpha), 6 - alpha)
            for alpha in range(self.alpha_max + 1)
        }
        self.initial_v0 = data.v0.copy()
        self.initial_horizontal_sq = (
            data.v_spatial[0] ** 2 + data.v_spatial[1] ** 2
        )

    def evaluate(self, stack: TimeDerivativeStack) -> MonitorReport:
        grid = stack.grid
        center = stack.center
        mats = compute_matrices(
            FlowMapState(center.tau, center.eta, center.v), grid
        )
        f = self.data.F_ring / mats.J

        conditions = [
            _one_sided("mass_fraction_small", float(np.max(f)), 0.125),
            _one_sided(
                "flow_map_norm",
                sobolev_norm_absolute_halfstep(grid, center.eta, 7),
                2.0 * self.initial_eta_norm + 1.0,
                detail={"initial": self.initial_eta_norm},
            ),
        ]

        v_hist = stack.history("v")
        alpha_cap = min(self.alpha_max, len(stack) - 1)
        per_alpha = {}
        worst = None
        for alpha in range(alpha_cap + 1):
            val = sobolev_norm_halfstep(grid, stack.fd(v_hist, alpha), 6 - alpha)
            bound = self.initial_v_norms[alpha] + 1.0
            per_alpha[alpha] = (val, bound)
            if worst is None or bound - val < worst[1] - worst[0]:
                worst = (val, bound)
        conditions.append(
            _one_sided(
                "velocity_derivative_norms",
                worst[0],
                worst[1],
                detail={"per_alpha": per_alpha, "alpha_cap": alpha_cap},
            )
        )

        conditions.append(
            _band(
                "jacobian_band",
                mats.J,
                self.initial_v0 - 0.5,
                self.initial_v0 + 0.5,
            )
        )
        conditions.append(
            _band(
                "vertical_column_band",
                vertical_column_quadratic_form(mats),
                0.25 + self.initial_horizontal_sq,
                2.0 + self.initial_horizontal_sq,
            )
        )
        return MonitorReport(tau=center.tau, conditions=tuple(conditions))
