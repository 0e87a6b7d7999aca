"""Vorticity transport diagnostics.

On solutions, the flow-map vorticity of d(Sv)/dtau vanishes identically;
its discrete L2 norm is therefore a pure discretization indicator and must
converge to zero under refinement. Independently, the product-rule
expansion of that vorticity into jet pieces,

    vort(d(Sv)/dtau) = S vort(dv/dtau) + dS/dtau vort(v)
                       + G(S) ^ dv/dtau + G(dS/dtau) ^ v,

with G(psi)_mu = A_mu^L partial_L(psi) the material gradient of a scalar
and (a ^ b)_{mu nu} = a_mu b_nu - a_nu b_mu, is an exact identity for any
smooth fields whatsoever (no equation of motion enters); its residual
checks the assembly at rounding level.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..eos import Eos
from ..initial_data import InitialDataBundle
from ..kinematics import FlowMapState, compute_matrices
from ..operators import lower_index
from .stack import TimeDerivativeStack


@dataclass(frozen=True)
class TransportJet:
    """Second-order jet of (v, S) at one slice, with the inverse flow-map
    gradient A. Velocity components are lowered; spatial gradients are
    indexed [axis - 1, ...]."""

    A: np.ndarray
    v: np.ndarray
    dtau_v: np.ndarray
    dtau2_v: np.ndarray
    S: np.ndarray
    dtau_S: np.ndarray
    dtau2_S: np.ndarray
    grad_v: np.ndarray
    grad_dtau_v: np.ndarray
    grad_S: np.ndarray
    grad_dtau_S: np.ndarray


@dataclass(frozen=True)
class VorticityReport:
    vort_Sv_norm: float
    expansion_residual: float


def _spatial_stack(grid, field):
    return np.stack([grid.partial_spatial(field, k) for k in (1, 2, 3)])


def jet_from_stack(
    stack: TimeDerivativeStack, eos: Eos, data: InitialDataBundle
) -> TransportJet:
    """Assemble the jet at the stack's center slice: tau-derivatives by
    centered differences of the stored history, spatial gradients by
    stencils, S per slice from the algebraic mass constraint."""
    grid = stack.grid
    v_hist = [lower_index(v) for v in stack.history("v")]
    S_hist = [eos.enthalpy_S_of_f(data.F_ring / J) for J in stack.history("J")]

    v = stack.fd(v_hist, 0)
    dtau_v = stack.fd(v_hist, 1)
    S = stack.fd(S_hist, 0)
    dtau_S = stack.fd(S_hist, 1)
    center = stack.center
    mats = compute_matrices(FlowMapState(center.tau, center.eta, center.v), grid)
    return TransportJet(
        A=mats.A,
        v=v,
        dtau_v=dtau_v,
        dtau2_v=stack.fd(v_hist, 2),
        S=S,
        dtau_S=dtau_S,
        dtau2_S=stack.fd(S_hist, 2),
        grad_v=_spatial_stack(grid, v),
        grad_dtau_v=_spatial_stack(grid, dtau_v),
        grad_S=_spatial_stack(grid, S),
        grad_dtau_S=_spatial_stack(grid, dtau_S),
    )


def _vort_from_lowered(A, dtau_X, grad_X):
    """Two-form A_mu^L partial_L X_nu - (mu <-> nu) from a lowered field's
    tau-derivative and spatial gradient stack."""
    dX = np.concatenate([dtau_X[None], grad_X], axis=0)
    T = np.einsum("ml...,ln...->mn...", A, dX)
    return T - np.swapaxes(T, 0, 1)


def _material_scalar_gradient(A, dtau_psi, grad_psi):
    """G(psi)_mu = A_mu^L partial_L psi."""
    dpsi = np.concatenate([dtau_psi[None], grad_psi], axis=0)
    return np.einsum("ml...,l...->m...", A, dpsi)


def _wedge(a, b):
    w = a[:, None] * b[None, :]
    return w - np.swapaxes(w, 0, 1)


def two_form_l2(grid, omega) -> float:
    """L2 norm over the six independent components."""
    iu, ju = np.triu_indices(4, k=1)
    return grid.l2_norm(omega[iu, ju])


def independent_components(omega) -> np.ndarray:
    """The six (mu < nu) components of a two-form, stacked first."""
    iu, ju = np.triu_indices(4, k=1)
    return omega[iu, ju]


def vort_transport_two_form(stack, eos, data) -> np.ndarray:
    """vort of d(Sv)/dtau assembled directly from the composite per-slice
    history S*v: tau-derivatives by centered differences, spatial gradient
    by stencils of the differenced field."""
    grid = stack.grid
    Sv_hist = [
        eos.enthalpy_S_of_f(data.F_ring / J) * lower_index(v)
        for J, v in zip(stack.history("J"), stack.history("v"))
    ]
    Z = stack.fd(Sv_hist, 1)
    dtau_Z = stack.fd(Sv_hist, 2)
    center = stack.center
    mats = compute_matrices(FlowMapState(center.tau, center.eta, center.v), grid)
    return _vort_from_lowered(mats.A, dtau_Z, _spatial_stack(grid, Z))


def expansion_residual(jet: TransportJet) -> float:
    """Max-norm of (left minus right) of the product-rule expansion above;
    rounding-level for any jet, regardless of whether it solves anything."""
    # left side: vort of Z = dS v + S dv, with dZ built by the product rule
    dtau_Z = jet.dtau2_S * jet.v + 2.0 * jet.dtau_S * jet.dtau_v + jet.S * jet.dtau2_v
    grad_Z = (
        jet.grad_dtau_S[:, None] * jet.v[None]
        + jet.dtau_S * jet.grad_v
        + jet.grad_S[:, None] * jet.dtau_v[None]
        + jet.S * jet.grad_dtau_v
    )
    lhs = _vort_from_lowered(jet.A, dtau_Z, grad_Z)

    rhs = (
        jet.S * _vort_from_lowered(jet.A, jet.dtau2_v, jet.grad_dtau_v)
        + jet.dtau_S * _vort_from_lowered(jet.A, jet.dtau_v, jet.grad_v)
        + _wedge(
            _material_scalar_gradient(jet.A, jet.dtau_S, jet.grad_S), jet.dtau_v
        )
        + _wedge(
            _material_scalar_gradient(jet.A, jet.dtau2_S, jet.grad_dtau_S), jet.v
        )
    )
    return float(np.max(np.abs(lhs - rhs)))


def vorticity_diagnostics(
    stack: TimeDerivativeStack, eos: Eos, data: InitialDataBundle
) -> VorticityReport:
    omega = vort_transport_two_form(stack, eos, data)
    jet = jet_from_stack(stack, eos, data)
    return VorticityReport(
        vort_Sv_norm=two_form_l2(stack.grid, omega),
        expansion_residual=expansion_residual(jet),
    )
