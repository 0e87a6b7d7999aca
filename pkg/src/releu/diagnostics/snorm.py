"""Scale-matched square norm of the flow-map history.

The controlled quantity is a sum of five blocks, each a running supremum
over the slices seen so far (so the total is nondecreasing in tau and its
tau = 0 value is the single-slice evaluation):

  1. sum_p ||dtau^{2p} eta||^2_{H^{4-p}}           (absolute map at p = 0)
  2. sum_p ||F dtau^{2p} (J^{-2})||^2_{H^{4-p}}
  3. sum_p [ ||F dtau^{2p} tang^{4-p} D eta||^2_{L2}
             + ||sqrt(F) dtau^{2p+1} tang^{4-p} eta||^2_{L2} ]
  4. ||vort_eta v||^2_{H^3}
  5. sum_{|a|=4} ||F tang^a vort_eta v||^2_{L2}

reflecting the two-to-one scaling between time and space derivatives near
the vacuum boundary: each extra p trades one Sobolev order for two
tau-derivatives. Blocks 1-3 cap p at 4, 3, 4 respectively; the truncation
parameter p_max cuts all of them off earlier (high tau-orders need long
snapshot histories and lose finite-difference accuracy).

Odd tau-derivatives of eta are taken from the stored velocity history
(dtau^{2p+1} eta = dtau^{2p} v exactly), halving the finite-difference
order actually needed.

The gamma-generalized variant keeps blocks 1-3 and appends, in place of
the vorticity blocks, F-power-weighted top-order terms

  sum_{p=0..p0} ||F^{(1 + 1/(gamma-1) - p)/2} dtau^{8+p0-p} D eta||^2_{L2},

whose count p0 grows as gamma decreases toward 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..eos import p_zero_index
from ..grid import Grid
from ..kinematics import FlowMapState, compute_matrices
from ..operators import eta_vort, material_gradient
from .norms import (
    _mixed_partial_table,
    _multi_indices,
    sobolev_norm,
    tangential_multi_indices,
    tangential_partial,
)
from .stack import InsufficientHistoryError, TimeDerivativeStack
from .vorticity import independent_components


def absolute_flow_map(grid: Grid, eta_disp: np.ndarray) -> np.ndarray:
    """Reconstruct the absolute map (tau-part unchanged, reference
    embedding added to the spatial parts)."""
    out = eta_disp.copy()
    mesh = grid.mesh()
    for k in (1, 2, 3):
        out[k] += mesh[k - 1]
    return out


def sobolev_norm_absolute(grid: Grid, eta_disp: np.ndarray, k: int) -> float:
    """H^k norm of the absolute flow map.

    The stored displacement is periodic and differentiates cleanly; the
    reference embedding's contribution is added analytically (its value at
    order 0, the identity at order 1, nothing above), avoiding stencils on
    the non-periodic coordinates themselves.
    """
    table = _mixed_partial_table(grid, eta_disp, k)
    mesh = grid.mesh()
    total = 0.0
    for idx in _multi_indices(k):
        d = table[idx]
        order = sum(idx)
        if order == 0:
            d = d.copy()
            for ax in (1, 2, 3):
                d[ax] += mesh[ax - 1]
        elif order == 1:
            ax = idx.index(1) + 1
            d = d.copy()
            d[ax] += 1.0
        total += grid.l2_norm(d) ** 2
    return float(np.sqrt(total))


def sobolev_norm_absolute_halfstep(
    grid: Grid, eta_disp: np.ndarray, two_k: int
) -> float:
    """Half-integer orders by the geometric mean of neighbours, as in
    sobolev_norm_halfstep, but for the absolute map."""
    if two_k % 2 == 0:
        return sobolev_norm_absolute(grid, eta_disp, two_k // 2)
    lo = sobolev_norm_absolute(grid, eta_disp, two_k // 2)
    hi = sobolev_norm_absolute(grid, eta_disp, two_k // 2 + 1)
    return float(np.sqrt(lo * hi))


@dataclass(frozen=True)
class SNormBlocks:
    """Single-slice values of the five blocks (all squared norms)."""

    eta_sobolev: float
    weighted_jacobian: float
    tangential_mixed: float
    vorticity_h3: float
    vorticity_weighted: float

    _FIELDS = (
        "eta_sobolev",
        "weighted_jacobian",
        "tangential_mixed",
        "vorticity_h3",
        "vorticity_weighted",
    )

    @property
    def total(self) -> float:
        return sum(getattr(self, name) for name in self._FIELDS)


def _even_tau_derivative_of_eta(stack: TimeDerivativeStack, p: int) -> np.ndarray:
    """dtau^{2p} eta for p >= 1, via dtau^{2p-1} of the velocity history."""
    return stack.fd(stack.history("v"), 2 * p - 1)


def _material_Deta(stack: TimeDerivativeStack, p: int) -> np.ndarray:
    """dtau^{2p} D eta, shape (4, 4, n1, n2, n3) indexed [K, mu]: tau-entry
    from the velocity history, spatial entries by stencils of dtau^{2p} eta
    (identity part of the reference embedding added at p = 0; it is
    constant, so later tangential stencils annihilate it exactly)."""
    grid = stack.grid
    tau_entry = stack.fd(stack.history("v"), 2 * p)
    base = stack.center.eta if p == 0 else _even_tau_derivative_of_eta(stack, p)
    spatial = [grid.partial_spatial(base, k) for k in (1, 2, 3)]
    if p == 0:
        for k in (1, 2, 3):
            spatial[k - 1][k] += 1.0
    return np.stack([tau_entry] + spatial)


def _center_vorticity(stack: TimeDerivativeStack) -> np.ndarray:
    """The six independent components of vort_eta v at the center slice
    (tau-derivative of v from the history, spatial from stencils)."""
    grid = stack.grid
    center = stack.center
    dtau_v = stack.fd(stack.history("v"), 1)
    dv = material_gradient(grid, center.v, dtau_v)
    mats = compute_matrices(FlowMapState(center.tau, center.eta, center.v), grid)
    return independent_components(eta_vort(mats.A, dv))


def norm_S_slice(stack: TimeDerivativeStack, data, p_max: int = 2) -> SNormBlocks:
    """Evaluate all five blocks on the stack's center slice."""
    grid = stack.grid
    F = data.F_ring
    sqrtF = np.sqrt(F)
    v_hist = stack.history("v")
    jm2_hist = stack.history("jm2")

    b1 = sobolev_norm_absolute(grid, stack.center.eta, 4) ** 2
    for p in range(1, min(p_max, 4) + 1):
        b1 += sobolev_norm(grid, _even_tau_derivative_of_eta(stack, p), 4 - p) ** 2

    b2 = 0.0
    for p in range(0, min(p_max, 3) + 1):
        b2 += sobolev_norm(grid, F * stack.fd(jm2_hist, 2 * p), 4 - p) ** 2

    b3 = 0.0
    for p in range(0, min(p_max, 4) + 1):
        Deta = _material_Deta(stack, p)
        v_even = stack.fd(v_hist, 2 * p)  # dtau^{2p+1} eta, exactly
        for idx in tangential_multi_indices(4 - p):
            b3 += grid.l2_norm(F * tangential_partial(grid, Deta, idx)) ** 2
            b3 += grid.l2_norm(sqrtF * tangential_partial(grid, v_even, idx)) ** 2

    omega = _center_vorticity(stack)
    b4 = sobolev_norm(grid, omega, 3) ** 2
    b5 = 0.0
    for idx in tangential_multi_indices(4):
        b5 += grid.l2_norm(F * tangential_partial(grid, omega, idx)) ** 2

    return SNormBlocks(
        eta_sobolev=b1,
        weighted_jacobian=b2,
        tangential_mixed=b3,
        vorticity_h3=b4,
        vorticity_weighted=b5,
    )


def norm_S(stack: TimeDerivativeStack, data, p_max: int = 2) -> float:
    """Running value: per-block suprema over every slice this stack has
    been evaluated on (tracked in the stack's scratch space), summed."""
    blocks = norm_S_slice(stack, data, p_max)
    sups = stack.running.setdefault(("snorm", p_max), {})
    for name in SNormBlocks._FIELDS:
        sups[name] = max(sups.get(name, 0.0), getattr(blocks, name))
    return float(sum(sups.values()))


@dataclass(frozen=True)
class GammaNormSlice:
    """Single-slice gamma-norm evaluation: the three shared blocks, the
    extra F-power-weighted block (None when the history is too short to
    form it), and their sum."""

    base: float
    extra: float | None
    extra_terms: tuple = ()

    @property
    def total(self) -> float:
        return self.base + (self.extra or 0.0)

    @property
    def extra_skipped(self) -> bool:
        return self.extra is None


def norm_S_gamma_slice(
    stack: TimeDerivativeStack,
    data,
    gamma: float,
    p_max: int = 2,
    require_extra_block: bool = False,
) -> GammaNormSlice:
    """Evaluate the gamma-generalized norm on the center slice.

    The extra block needs tau-derivatives of order up to 8 + p0, i.e. a
    snapshot history of at least 9 + p0 slices; with a shorter stack it is
    skipped (reported as None) unless require_extra_block insists.
    """
    if gamma <= 1.0:
        raise ValueError(f"adiabatic exponent must exceed 1, got {gamma}")
    grid = stack.grid
    blocks = norm_S_slice(stack, data, p_max)
    base = blocks.eta_sobolev + blocks.weighted_jacobian + blocks.tangential_mixed

    p0 = p_zero_index(gamma)
    top_order = 8 + p0
    try:
        stack.require(top_order)
    except InsufficientHistoryError:
        if require_extra_block:
            raise
        return GammaNormSlice(base=base, extra=None)

    v_hist = stack.history("v")
    extra_terms = []
    for p in range(0, p0 + 1):
        q = 8 + p0 - p
        tau_entry = stack.fd(v_hist, q)
        body = stack.fd(v_hist, q - 1)  # dtau^q eta
        Deta = np.stack(
            [tau_entry] + [grid.partial_spatial(body, k) for k in (1, 2, 3)]
        )
        weight = data.F_ring ** ((1.0 + 1.0 / (gamma - 1.0) - p) / 2.0)
        extra_terms.append(grid.l2_norm(weight * Deta) ** 2)
    return GammaNormSlice(base=base, extra=sum(extra_terms), extra_terms=tuple(extra_terms))


def norm_S_gamma(
    stack: TimeDerivativeStack,
    data,
    gamma: float,
    p_max: int = 2,
    require_extra_block: bool = False,
) -> float:
    """Running gamma-norm: per-piece suprema like norm_S. A skipped extra
    block contributes nothing (and cannot lower an earlier supremum)."""
    piece = norm_S_gamma_slice(stack, data, gamma, p_max, require_extra_block)
    sups = stack.running.setdefault(("snorm_gamma", p_max, gamma), {})
    sups["base"] = max(sups.get("base", 0.0), piece.base)
    for p, term in enumerate(piece.extra_terms):
        key = ("extra", p)
        sups[key] = max(sups.get(key, 0.0), term)
    return float(sum(sups.values()))
