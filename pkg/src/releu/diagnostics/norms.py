"""L2-based Sobolev norms, distance-weighted norms, and the fractional
surrogates used by the verification suite.

Interior fractional norms use the geometric-mean interpolation surrogate
(product of the two neighbouring integer norms, square-rooted), which is
equivalent to the interpolation norm up to constants; boundary fractional
norms are exact discrete Fourier multipliers, the boundary faces being flat
tori where Fourier is canonical. Both choices are deliberate surrogates and
are documented as such wherever a comparison constant is pinned.
"""

from __future__ import annotations

import numpy as np

from ..grid import Grid


def _multi_indices(k: int):
    """All (i1, i2, i3) with i1 + i2 + i3 <= k."""
    for total in range(k + 1):
        for i1 in range(total + 1):
            for i2 in range(total - i1 + 1):
                yield (i1, i2, total - i1 - i2)


def _mixed_partial_table(grid: Grid, field: np.ndarray, k: int) -> dict:
    """Mixed spatial partials of all orders <= k, each multi-index computed
    once by extending a lower-order entry along its first active axis."""
    table = {(0, 0, 0): field}
    for idx in _multi_indices(k):
        if idx in table:
            continue
        axis = next(a for a in range(3) if idx[a] > 0)
        parent = list(idx)
        parent[axis] -= 1
        table[idx] = grid.partial_spatial(table[tuple(parent)], axis + 1)
    return table


def sobolev_norm(grid: Grid, field: np.ndarray, k: int) -> float:
    """H^k norm: square root of the summed L2 squares of all mixed spatial
    partials of order <= k. Component axes (leading) are summed into the
    L2 norm."""
    if not 0 <= k <= 4:
        raise ValueError(f"k must lie in 0..4, got {k}")
    table = _mixed_partial_table(grid, field, k)
    total = sum(grid.l2_norm(table[idx]) ** 2 for idx in _multi_indices(k))
    return float(np.sqrt(total))


def sobolev_norm_halfstep(grid: Grid, field: np.ndarray, two_k: int) -> float:
    """H^{two_k/2} norm; integer orders directly, half-integer orders by the
    geometric mean of the two neighbouring integer norms."""
    if two_k % 2 == 0:
        return sobolev_norm(grid, field, two_k // 2)
    lo = sobolev_norm(grid, field, (two_k - 1) // 2)
    hi = sobolev_norm(grid, field, (two_k + 1) // 2)
    return float(np.sqrt(lo * hi))


def weighted_h1_norm(grid: Grid, field: np.ndarray, k: int) -> float:
    """Distance-weighted first-order norm: sqrt of the quadrature of
    d(y)^k (|f|^2 + |Df|^2), with d the distance to the nearest boundary
    face and Df the spatial gradient."""
    if k not in (1, 2):
        raise ValueError(f"weight exponent must be 1 or 2, got {k}")
    weight = grid.boundary_distance**k
    dens = np.sum(np.square(field.reshape((-1,) + grid.shape)), axis=0)
    for axis in (1, 2, 3):
        df = grid.partial_spatial(field, axis)
        dens = dens + np.sum(np.square(df.reshape((-1,) + grid.shape)), axis=0)
    return float(np.sqrt(max(grid.integrate(weight * dens), 0.0)))


def fractional_interior_norm(grid: Grid, field: np.ndarray) -> float:
    """H^{1/2} surrogate: geometric mean of the L2 and H^1 norms."""
    return float(np.sqrt(sobolev_norm(grid, field, 0) * sobolev_norm(grid, field, 1)))


def boundary_fractional_norm(grid: Grid, trace: np.ndarray) -> float:
    """H^{-1/2} norm of a scalar trace on one periodic boundary face, by
    exact discrete Fourier multipliers:

        sqrt( sum_k (1 + |2 pi k|^2)^{-1/2} |f_hat_k|^2 ),

    with f_hat the normalized FFT coefficients (f_hat_0 = mean)."""
    if trace.shape != (grid.n1, grid.n2):
        raise ValueError(
            f"trace must have shape {(grid.n1, grid.n2)}, got {trace.shape}"
        )
    fhat = np.fft.fft2(trace) / (grid.n1 * grid.n2)
    k1 = np.fft.fftfreq(grid.n1, d=1.0 / grid.n1)[:, None]
    k2 = np.fft.fftfreq(grid.n2, d=1.0 / grid.n2)[None, :]
    multiplier = 1.0 / np.sqrt(1.0 + 4.0 * np.pi**2 * (k1**2 + k2**2))
    return float(np.sqrt(np.sum(multiplier * np.abs(fhat) ** 2)))


def tangential_multi_indices(m: int):
    """All (i1, i2) with i1 + i2 = m: the order-m horizontal derivatives."""
    return [(i1, m - i1) for i1 in range(m + 1)]


def tangential_partial(grid: Grid, field: np.ndarray, idx) -> np.ndarray:
    """Repeated horizontal derivative for the multi-index (i1, i2)."""
    out = field
    for _ in range(idx[0]):
        out = grid.partial_spatial(out, 1)
    for _ in range(idx[1]):
        out = grid.partial_spatial(out, 2)
    return out
