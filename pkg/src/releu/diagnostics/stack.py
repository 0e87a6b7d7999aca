"""Snapshot history and high-order differentiation in tau.

Diagnostics that need tau-derivatives (norms, energies, vorticity
transport) do not differentiate the equations of motion. Instead, evolution
slices are pushed into a ring buffer as they are produced and derivatives
are read back as finite differences centered on the middle stored slice.
Accuracy is set by the snapshot cadence: with n stored slices the k-th
derivative is exact on tau-polynomials of degree <= n - 1.

Stored per slice: tau, the flow-map displacement, the velocity, and the
Jacobian determinant (plus its inverse square, which several norms weight).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..grid import Grid
from ..kinematics import FlowMapState, compute_matrices

_SPACING_RTOL = 1e-9


class InsufficientHistoryError(RuntimeError):
    """Raised when a derivative needs more slices than the buffer holds;
    warm the buffer with more snapshots (or a larger capacity) first."""


@dataclass(frozen=True)
class Slice:
    tau: float
    eta: np.ndarray  # displacement from the resting map
    v: np.ndarray
    J: np.ndarray
    jm2: np.ndarray  # J**-2


def fd_weights(offsets: np.ndarray, k: int) -> np.ndarray:
    """Weights w such that sum_j w[j] f(offsets[j]) approximates the k-th
    derivative of f at 0; exact on polynomials of degree < len(offsets).

    Computed as k-th derivatives of the Lagrange basis at 0.
    """
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.size
    if k >= n:
        raise ValueError(f"{n} nodes support derivatives only up to order {n - 1}")
    w = np.empty(n)
    for j in range(n):
        roots = np.delete(offsets, j)
        basis = npoly.polyfromroots(roots)
        basis /= np.prod(offsets[j] - roots)
        w[j] = npoly.polyval(0.0, npoly.polyder(basis, k))
    return w


class TimeDerivativeStack:
    """Ring buffer of uniformly spaced evolution slices.

    The buffer also carries a small scratch dict (`running`) where norm
    trackers keep their per-block running suprema across emitted slices.
    """

    def __init__(self, grid: Grid, capacity: int = 7):
        if capacity < 3:
            raise ValueError(f"capacity must be >= 3, got {capacity}")
        self.grid = grid
        self.capacity = capacity
        self._slices: deque[Slice] = deque(maxlen=capacity)
        self._dt: float | None = None
        self.running: dict = {}

    def __len__(self) -> int:
        return len(self._slices)

    @property
    def dt(self) -> float:
        if self._dt is None:
            raise InsufficientHistoryError("no spacing yet: push at least two slices")
        return self._dt

    @property
    def center_index(self) -> int:
        return (len(self._slices) - 1) // 2

    @property
    def center(self) -> Slice:
        if not self._slices:
            raise InsufficientHistoryError("empty buffer")
        return self._slices[self.center_index]

    def push(self, flow: FlowMapState) -> None:
        """Append one slice; spacing must match the established cadence."""
        if self._slices:
            step = flow.tau - self._slices[-1].tau
            if step == 0.0:
                raise ValueError("duplicate tau pushed")
            if self._dt is None:
                self._dt = step
            elif abs(step - self._dt) > _SPACING_RTOL * abs(self._dt):
                raise ValueError(
                    f"non-uniform snapshot spacing: expected {self._dt!r}, "
                    f"got {step!r}"
                )
        mats = compute_matrices(flow, self.grid)
        self._slices.append(
            Slice(
                tau=flow.tau,
                eta=flow.eta.copy(),
                v=flow.v.copy(),
                J=mats.J.copy(),
                jm2=1.0 / np.square(mats.J),
            )
        )

    def history(self, field: str) -> list[np.ndarray]:
        """The stored arrays for one field, oldest first."""
        return [getattr(s, field) for s in self._slices]

    def require(self, k: int) -> None:
        if len(self._slices) < k + 1:
            raise InsufficientHistoryError(
                f"a {k}-th tau-derivative needs {k + 1} slices, buffer holds "
                f"{len(self._slices)}; extend the warm-up"
            )

    def fd(self, fields: list[np.ndarray], k: int) -> np.ndarray:
        """Finite difference of an arbitrary per-slice field sequence at the
        center slice. For k >= 1 the center value is subtracted first so
        sequences constant in tau differentiate to exactly zero."""
        if len(fields) != len(self._slices):
            raise ValueError("one field per stored slice required")
        self.require(k)
        c = self.center_index
        if k == 0:
            return fields[c].copy()
        offsets = np.arange(len(fields), dtype=float) - c
        w = fd_weights(offsets, k) / self.dt**k
        pivot = fields[c]
        out = np.zeros_like(pivot)
        for wj, fj in zip(w, fields):
            if fj is not pivot:
                out += wj * (fj - pivot)
        return out

    def derivative(self, field: str, k: int) -> np.ndarray:
        """k-th tau-derivative of a stored field ('eta', 'v', 'J', 'jm2')
        at the center slice."""
        return self.fd(self.history(field), k)


def time_derivatives(stack: TimeDerivativeStack, k: int) -> np.ndarray:
    """k-th tau-derivative of the flow-map displacement at the buffer's
    center slice."""
    return stack.derivative("eta", k)
