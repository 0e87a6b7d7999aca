"""Inequality laboratory: discrete ratio checks for three estimates the
analysis leans on. Each check returns both sides of the inequality; the
caller (or test) compares the ratio against a constant pinned for a fixed
test family — the mathematical content is that *some* constant works, so
the pinned values are empirical, family-specific, and resolution-stable
rather than universal.

  hardy_check:  ||f/d||_{H^{s-1}} vs ||f||_{H^s} for s = 1, 2, for fields
                vanishing on both horizontal boundary faces (d = distance
                to the nearest face).
  hodge_check:  ||Y||_{H^1} vs L2 + divergence + curl + tangential
                boundary data of a slice 3-field.
  trace_check:  tangential boundary data of the horizontal components vs
                curl + tangential derivatives in the bulk.

Boundary terms live in the negative-half-order Fourier norm on each face;
per the two-face geometry both faces are reported individually plus
summed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..grid import Grid
from ..operators import flat_div3, flat_vort3
from .norms import boundary_fractional_norm, sobolev_norm

_TRIU3 = np.triu_indices(3, k=1)


class HypothesisViolation(ValueError):
    """The field handed to a check does not satisfy the inequality's
    hypotheses, so the ratio would be meaningless."""


@dataclass(frozen=True)
class HardyResult:
    ratio_s1: float  # ||f/d||_{L2} / ||f||_{H1}
    ratio_s2: float  # ||f/d||_{H1} / ||f||_{H2}


@dataclass(frozen=True)
class HodgeResult:
    lhs: float  # ||Y||_{H1}
    l2: float
    divergence: float
    curl: float
    boundary: float  # sum over horizontal components and faces
    boundary_per_face: dict  # (component, face) -> value

    @property
    def rhs_total(self) -> float:
        return self.l2 + self.divergence + self.curl + self.boundary

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs_total


@dataclass(frozen=True)
class TraceResult:
    lhs: float  # tangential boundary data, negative-half-order norm
    curl: float
    tangential_l2: float
    boundary_per_face: dict

    @property
    def rhs_total(self) -> float:
        return self.curl + self.tangential_l2

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs_total


def hardy_check(grid: Grid, field: np.ndarray, face_tol: float = 1e-10) -> HardyResult:
    """Ratios of the distance-divided field's norms to the field's own
    norms one order higher.

    Raises:
        HypothesisViolation: if the field does not vanish on both faces
        (relative to its overall size) or is identically zero.
    """
    scale = float(np.max(np.abs(field)))
    if scale == 0.0:
        raise HypothesisViolation("field is identically zero; ratio undefined")
    face_max = max(
        float(np.max(np.abs(field[..., 0]))), float(np.max(np.abs(field[..., -1])))
    )
    if face_max > face_tol * scale:
        raise HypothesisViolation(
            f"field must vanish on both horizontal faces: max face value "
            f"{face_max:.3e} vs interior scale {scale:.3e}"
        )
    ratio = grid.ratio_to_boundary_distance(field)
    return HardyResult(
        ratio_s1=sobolev_norm(grid, ratio, 0) / sobolev_norm(grid, field, 1),
        ratio_s2=sobolev_norm(grid, ratio, 1) / sobolev_norm(grid, field, 2),
    )


def _tangential_boundary_data(grid: Grid, Y: np.ndarray) -> dict:
    """Negative-half-order face norms of the tangential derivatives of the
    horizontal components: (component a, face) ->
    sqrt(sum_b ||d_b Y^a restricted to the face||^2)."""
    out = {}
    for a in (0, 1):  # components Y^1, Y^2
        grads = [grid.partial_horizontal(Y[a], b) for b in (1, 2)]
        for face, sl in (("bottom", 0), ("top", -1)):
            total = sum(
                boundary_fractional_norm(grid, g[:, :, sl]) ** 2 for g in grads
            )
            out[(a + 1, face)] = float(np.sqrt(total))
    return out


def hodge_check(grid: Grid, Y: np.ndarray) -> HodgeResult:
    """First-order norm of a slice 3-field against the elliptic data:
    its size, divergence, curl, and tangential boundary values."""
    vort = flat_vort3(grid, Y)
    per_face = _tangential_boundary_data(grid, Y)
    return HodgeResult(
        lhs=sobolev_norm(grid, Y, 1),
        l2=grid.l2_norm(Y),
        divergence=grid.l2_norm(flat_div3(grid, Y)),
        curl=grid.l2_norm(vort[_TRIU3]),
        boundary=float(sum(per_face.values())),
        boundary_per_face=per_face,
    )


def trace_check(grid: Grid, Y: np.ndarray) -> TraceResult:
    """Tangential boundary data of the horizontal components against the
    curl plus all tangential derivatives in the bulk."""
    vort = flat_vort3(grid, Y)
    per_face = _tangential_boundary_data(grid, Y)
    tangential = np.stack(
        [grid.partial_horizontal(Y, b) for b in (1, 2)]
    )
    return TraceResult(
        lhs=float(sum(per_face.values())),
        curl=grid.l2_norm(vort[_TRIU3]),
        tangential_l2=grid.l2_norm(tangential),
        boundary_per_face=per_face,
    )
