"""Discretization of the material slab T^2 x [0, 1].

Horizontal axes (y1, y2) are periodic with unit period; the vertical axis y3
is bounded with vertex-centered nodes that include both boundary surfaces
y3 = 0 and y3 = 1, so boundary traces are grid restrictions rather than
interpolations.

Scalar fields are arrays of shape (n1, n2, n3); 4-component fields carry the
component index first, shape (4, n1, n2, n3).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


def distance_to_boundary(y3):
    """Euclidean distance from a point of the slab to its boundary.

    Args:
        y3: vertical coordinate(s) in [0, 1], scalar or array.

    Returns:
        min(y3, 1 - y3), same shape as the input.

    Raises:
        ValueError: if any coordinate lies outside [0, 1].
    """
    y3 = np.asarray(y3, dtype=float)
    if np.any(y3 < 0.0) or np.any(y3 > 1.0):
        raise ValueError("vertical coordinate outside [0, 1]")
    d = np.minimum(y3, 1.0 - y3)
    return d if d.ndim else float(d)


def _vertical_diff_matrix(n3: int, h3: float) -> np.ndarray:
    """Dense differentiation matrix along the bounded axis.

    4th-order centered in the interior, 4th-order one-sided within two nodes
    of each boundary; exact on polynomials of degree <= 4.
    """
    D = np.zeros((n3, n3))
    # one-sided rows at the bottom boundary
    D[0, :5] = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / (12.0 * h3)
    D[1, :5] = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / (12.0 * h3)
    for i in range(2, n3 - 2):
        D[i, i - 2 : i + 3] = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h3)
    # mirrored one-sided rows at the top boundary (antisymmetric under flip)
    D[n3 - 2, n3 - 5 :] = -D[1, :5][::-1]
    D[n3 - 1, n3 - 5 :] = -D[0, :5][::-1]
    return D


@dataclass(frozen=True)
class Grid:
    """Node counts and spacings for the slab T^2 x [0, 1].

    Attributes:
        n1, n2: node counts on the periodic horizontal axes (spacing 1/n).
        n3: node count on the bounded vertical axis, endpoints included
            (spacing 1/(n3 - 1)).
    """

    n1: int
    n2: int
    n3: int

    periodic = (True, True, False)

    def __post_init__(self):
        if self.n1 < 8 or self.n2 < 8:
            raise ValueError(
                f"horizontal node counts must be >= 8 for 5-point interior "
                f"stencils, got n1={self.n1}, n2={self.n2}"
            )
        if self.n3 < 9:
            raise ValueError(
                f"vertical node count must be >= 9 for 5-point one-sided "
                f"stencils, got n3={self.n3}"
            )

    @property
    def h1(self) -> float:
        return 1.0 / self.n1

    @property
    def h2(self) -> float:
        return 1.0 / self.n2

    @property
    def h3(self) -> float:
        return 1.0 / (self.n3 - 1)

    @property
    def shape(self):
        return (self.n1, self.n2, self.n3)

    @cached_property
    def y1(self) -> np.ndarray:
        return np.arange(self.n1) * self.h1

    @cached_property
    def y2(self) -> np.ndarray:
        return np.arange(self.n2) * self.h2

    @cached_property
    def y3(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n3)

    @cached_property
    def _D3(self) -> np.ndarray:
        return _vertical_diff_matrix(self.n3, self.h3)

    @cached_property
    def _w3(self) -> np.ndarray:
        w = np.full(self.n3, self.h3)
        w[0] = w[-1] = 0.5 * self.h3
        return w

    def mesh(self):
        """Coordinate arrays Y1, Y2, Y3, each of shape (n1, n2, n3)."""
        return np.meshgrid(self.y1, self.y2, self.y3, indexing="ij")

    @cached_property
    def boundary_distance(self) -> np.ndarray:
        """Distance to the boundary as a field, shape (n1, n2, n3)."""
        d = distance_to_boundary(self.y3)
        return np.broadcast_to(d, self.shape).copy()

    def partial_horizontal(self, field: np.ndarray, axis: int) -> np.ndarray:
        """4th-order periodic derivative along a horizontal axis (1 or 2).

        Applies to the trailing grid axes, so component-first stacks of
        fields differentiate in one call.
        """
        if axis not in (1, 2):
            raise ValueError(f"horizontal axis must be 1 or 2, got {axis}")
        ax = field.ndim - 4 + axis  # grid axes are the last three
        h = self.h1 if axis == 1 else self.h2
        # grouped as differences so constants cancel exactly
        return (
            (np.roll(field, 2, axis=ax) - np.roll(field, -2, axis=ax))
            - 8.0 * (np.roll(field, 1, axis=ax) - np.roll(field, -1, axis=ax))
        ) / (12.0 * h)

    def partial_vertical(self, field: np.ndarray) -> np.ndarray:
        """4th-order derivative along the bounded axis; one-sided at edges.

        Exact to rounding on polynomials in y3 of degree <= 4. Each column's
        mid-node value is subtracted before applying the matrix so that
        vertically constant columns differentiate to exactly zero (the rows
        sum to zero analytically, but not after per-entry rounding).
        """
        mid = self.n3 // 2
        pivoted = field - field[..., mid : mid + 1]
        return np.tensordot(pivoted, self._D3, axes=([field.ndim - 1], [1]))

    def partial_spatial(self, field: np.ndarray, axis: int) -> np.ndarray:
        """Derivative along spatial axis 1, 2, or 3."""
        if axis == 3:
            return self.partial_vertical(field)
        return self.partial_horizontal(field, axis)

    def integrate(self, field: np.ndarray) -> float:
        """Quadrature over the slab: rectangle rule on the periodic axes,
        trapezoid on the bounded axis. Exact for constants."""
        return float(
            np.tensordot(field, self._w3, axes=([field.ndim - 1], [0])).sum()
            * self.h1
            * self.h2
        )

    def ratio_to_boundary_distance(self, field: np.ndarray) -> np.ndarray:
        """field / d(y3) with the 0/0 boundary faces filled by one-sided
        cubic extrapolation of the interior ratio (weights 4, -6, 4, -1);
        exact whenever the ratio extends to a cubic in y3."""
        ratio = np.empty_like(field)
        d = distance_to_boundary(self.y3[1:-1])
        ratio[..., 1:-1] = field[..., 1:-1] / d
        w = np.array([4.0, -6.0, 4.0, -1.0])
        ratio[..., 0] = np.tensordot(ratio[..., 1:5], w, axes=([-1], [0]))
        ratio[..., -1] = np.tensordot(ratio[..., -5:-1], w[::-1], axes=([-1], [0]))
        return ratio

    def l2_norm(self, field: np.ndarray) -> float:
        """L2 norm over the slab; leading component axes are summed."""
        sq = np.square(field)
        if field.ndim > 3:
            sq = sq.sum(axis=tuple(range(field.ndim - 3)))
        return float(np.sqrt(max(self.integrate(sq), 0.0)))
