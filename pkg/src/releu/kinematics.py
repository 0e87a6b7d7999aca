"""Pointwise change-of-variables machinery for the Lagrangian flow map.

The 4x4 matrix M_K^nu = partial_K eta^nu (row K = 0 is the four-velocity v),
its inverse A_nu^K, the Jacobian J = det M, and the cofactor matrix
a_nu^K = J * A_nu^K.

Index conventions for the stored arrays (grid axes trail):
    M[K, nu]   -- material index K first (the derivative direction)
    A[nu, K]   -- rectangular index nu first, so M @ A = I pointwise
    cof[nu, K] -- same layout as A
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid


class SingularMapError(RuntimeError):
    """The Jacobian determinant collapsed somewhere on the grid."""


@dataclass
class FlowMapState:
    """Flow map and velocity on one proper-time slice.

    eta holds the *displacement* from the reference embedding (0, y), so the
    stored components stay periodic in y1, y2; the identity part of the
    spatial gradient is added analytically when matrices are assembled.
    """

    tau: float
    eta: np.ndarray  # (4, n1, n2, n3) displacement
    v: np.ndarray  # (4, n1, n2, n3)

    def copy(self) -> "FlowMapState":
        return FlowMapState(self.tau, self.eta.copy(), self.v.copy())


@dataclass
class KinematicMatrices:
    M: np.ndarray  # (4, 4, n1, n2, n3), indexed [K, nu]
    A: np.ndarray  # (4, 4, n1, n2, n3), indexed [nu, K]
    J: np.ndarray  # (n1, n2, n3)
    cof: np.ndarray  # (4, 4, n1, n2, n3), indexed [nu, K]


_MINOR_ROWS = [(1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)]


def _cofactor44(M: np.ndarray) -> np.ndarray:
    """Cofactor matrix C[K, nu] of a 4x4 matrix field M[K, nu, ...].

    Polynomial in the entries (no division), so it is defined even where the
    determinant vanishes; inv(M) = C^T / det(M).
    """
    C = np.empty_like(M)
    for K in range(4):
        rows = _MINOR_ROWS[K]
        for nu in range(4):
            cols = _MINOR_ROWS[nu]
            r0, r1, r2 = (M[r] for r in rows)
            minor = (
                r0[cols[0]] * (r1[cols[1]] * r2[cols[2]] - r1[cols[2]] * r2[cols[1]])
                - r0[cols[1]] * (r1[cols[0]] * r2[cols[2]] - r1[cols[2]] * r2[cols[0]])
                + r0[cols[2]] * (r1[cols[0]] * r2[cols[1]] - r1[cols[1]] * r2[cols[0]])
            )
            C[K, nu] = minor if (K + nu) % 2 == 0 else -minor
    return C


def compute_matrices(
    state: FlowMapState, grid: Grid, singular_tol: float = 1e-10
) -> KinematicMatrices:
    """Assemble M from v and spatial stencils of eta, then invert pointwise.

    Raises:
        SingularMapError: if |det M| < singular_tol anywhere, reporting the
            worst node.
    """
    n1, n2, n3 = grid.shape
    M = np.empty((4, 4, n1, n2, n3))
    M[0] = state.v
    for k in (1, 2, 3):
        M[k] = grid.partial_spatial(state.eta, k)
        M[k, k] += 1.0  # gradient of the reference embedding (0, y)

    C = _cofactor44(M)
    # determinant by expansion along the velocity row, reusing the cofactors
    J = np.einsum("n...,n...->...", M[0], C[0])

    bad = np.abs(J) < singular_tol
    if np.any(bad):
        idx = np.unravel_index(np.argmin(np.abs(J)), J.shape)
        raise SingularMapError(
            f"flow map Jacobian |J| = {abs(J[idx]):.3e} < {singular_tol:.1e} "
            f"at node {idx}: Lagrangian chart has degenerated"
        )

    A = np.swapaxes(C, 0, 1) / J  # A[nu, K] = C[K, nu] / J
    cof = np.swapaxes(C, 0, 1)
    return KinematicMatrices(M=M, A=A, J=J, cof=cof)


def initial_matrices(v0bar: np.ndarray) -> KinematicMatrices:
    """Closed-form matrices on the initial slice, where eta = (0, y).

    M has the initial velocity in row 0 and an identity spatial block;
    A and J = v0 follow in closed form.

    Args:
        v0bar: normalized initial velocity, shape (4, ...), v0bar[0] > 0.
    """
    v0 = v0bar[0]
    if np.any(v0 <= 0.0):
        raise ValueError("initial velocity must be future-directed (v^0 > 0)")
    shape = v0bar.shape[1:]
    eye = np.zeros((4, 4) + shape)
    for i in range(4):
        eye[i, i] = 1.0

    M = eye.copy()
    M[0] = v0bar

    A = eye.copy()
    A[0, 0] = 1.0 / v0
    for i in (1, 2, 3):
        A[0, i] = -v0bar[i] / v0

    cof = v0 * A
    cof[0, 0] = 1.0  # v0 * (1/v0), exactly
    for i in (1, 2, 3):
        cof[0, i] = -v0bar[i]

    return KinematicMatrices(M=M, A=A, J=v0.copy(), cof=cof)


def differentiate_A(matrices: KinematicMatrices, dM: np.ndarray) -> np.ndarray:
    """Directional derivative of the inverse matrix: dA = -A dM A.

    dM[L, beta] is the same directional derivative applied to M, supplied by
    the caller (tau-derivative of the state or a spatial stencil of M).
    """
    A = matrices.A
    return -np.einsum("bk...,lb...,nl...->nk...", A, dM, A)


def differentiate_J(matrices: KinematicMatrices, dM: np.ndarray) -> np.ndarray:
    """Directional derivative of the determinant: dJ = J * A_alpha^K dM_K^alpha."""
    return matrices.J * np.einsum("ak...,ka...->...", matrices.A, dM)


def differentiate_cof(matrices: KinematicMatrices, dM: np.ndarray) -> np.ndarray:
    """Directional derivative of the cofactor matrix, d(J A) by product rule."""
    dJ = differentiate_J(matrices, dM)
    dA = differentiate_A(matrices, dM)
    return dJ * matrices.A + matrices.J * dA


def jacobian_rate(matrices: KinematicMatrices, v_grad: np.ndarray) -> np.ndarray:
    """partial_tau J = J * A_alpha^K partial_K v^alpha.

    v_grad[K, alpha] holds partial_K v^alpha with the K = 0 row equal to the
    acceleration partial_tau v^alpha (from the evolution equation).
    """
    return matrices.J * np.einsum("ak...,ka...->...", matrices.A, v_grad)


def tau_derivative_cof_column0(
    matrices: KinematicMatrices, grid: Grid
) -> np.ndarray:
    """partial_tau a_alpha^0 without knowing the acceleration.

    Writing d(J A_alpha^K) = J dM_L^beta {A_alpha^K A_beta^L - A_alpha^L A_beta^K}
    with the tau-derivative direction (dM_L^beta = partial_L v^beta), the
    L = 0 summand vanishes for K = 0 by antisymmetry of the bracket, so only
    spatial stencils of v enter.
    """
    A, J = matrices.A, matrices.J
    out = np.zeros_like(matrices.cof[:, 0])
    for L in (1, 2, 3):
        dv = grid.partial_spatial(matrices.M[0], L)  # partial_L v^beta
        out += J * (
            np.einsum("b...,a...,b...->a...", dv, A[:, 0], A[:, L])
            - np.einsum("b...,a...,b...->a...", dv, A[:, L], A[:, 0])
        )
    return out


def piola_residual(matrices: KinematicMatrices, grid: Grid) -> float:
    """Max over alpha of |sum_K partial_K a_alpha^K|, which vanishes for the
    continuum cofactor matrix.

    The K = 0 term is evaluated analytically (see tau_derivative_cof_column0);
    the spatial terms use stencils. Converges to zero at stencil order for
    smooth flow maps.
    """
    res = tau_derivative_cof_column0(matrices, grid)
    for k in (1, 2, 3):
        res = res + grid.partial_spatial(matrices.cof[:, k], k)
    return float(np.max(np.abs(res)))
