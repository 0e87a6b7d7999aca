"""Differential and metric operators on spacetime vector fields.

Greek indices are raised and lowered with the Minkowski metric
g = diag(-1, 1, 1, 1). The flow-map gradient of a field X is
grad_mu X^nu = A_mu^K partial_K X^nu; the material coordinate gradient
partial_K X (including its temporal K = 0 row) is always supplied by the
caller, so operator accuracy never depends on time-step history.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid

# diag of g and its inverse (they coincide)
G_DIAG = np.array([-1.0, 1.0, 1.0, 1.0])


def _gshape(x: np.ndarray, extra: int) -> np.ndarray:
    """G_DIAG broadcast against an array whose component axis sits at
    position `extra` from the front."""
    return G_DIAG.reshape((1,) * extra + (4,) + (1,) * (x.ndim - extra - 1))


def lower_index(X: np.ndarray) -> np.ndarray:
    """X_mu = g_{mu nu} X^nu: flips the sign of component 0."""
    return X * _gshape(X, 0)


def raise_index(X: np.ndarray) -> np.ndarray:
    """X^mu = g^{mu nu} X_nu; involution partner of lower_index."""
    return X * _gshape(X, 0)


def material_gradient(
    grid: Grid, X: np.ndarray, partial_tau_X: np.ndarray
) -> np.ndarray:
    """Stack partial_K X over K = 0..3: the supplied tau-derivative followed
    by spatial stencils. X may have leading component axes."""
    return np.stack(
        [partial_tau_X] + [grid.partial_spatial(X, k) for k in (1, 2, 3)]
    )


def eta_grad(A: np.ndarray, dX: np.ndarray) -> np.ndarray:
    """grad_mu X^nu = A_mu^K partial_K X^nu.

    Args:
        A: inverse change-of-variables matrices, indexed [nu, K].
        dX: coordinate gradient stack, indexed [K, nu].

    Returns:
        mixed tensor T[mu, nu] with lower mu, upper nu.
    """
    return np.einsum("mk...,kn...->mn...", A, dX)


def eta_div(A: np.ndarray, dX: np.ndarray) -> np.ndarray:
    """div X = A_alpha^K partial_K X^alpha (trace of eta_grad)."""
    return np.einsum("ak...,ka...->...", A, dX)


def eta_vort(A: np.ndarray, dX: np.ndarray) -> np.ndarray:
    """(vort X)_{mu nu} = grad_mu X_nu - grad_nu X_mu.

    Acts on the lowered components; dX holds the gradient of the upper-index
    field, lowered internally (g is constant)."""
    dXl = dX * _gshape(dX, 1)
    T = np.einsum("mk...,kn...->mn...", A, dXl)
    return T - np.swapaxes(T, 0, 1)


def vort_of_mixed_grad(T: np.ndarray) -> np.ndarray:
    """Antisymmetrize a mixed gradient T[mu, ^nu] into the lowered two-form
    omega_{mu nu} = T_mu^alpha g_{alpha nu} - T_nu^alpha g_{alpha mu}."""
    Tl = T * _gshape(T, 1)
    return Tl - np.swapaxes(Tl, 0, 1)


def flat_div3(grid: Grid, Y: np.ndarray) -> np.ndarray:
    """Coordinate divergence of an R^3-valued field, sum_a partial_a Y^a."""
    out = grid.partial_spatial(Y[0], 1)
    out = out + grid.partial_spatial(Y[1], 2)
    out = out + grid.partial_spatial(Y[2], 3)
    return out


def flat_vort3(grid: Grid, Y: np.ndarray) -> np.ndarray:
    """Coordinate curl components (vort Y)_{Kj} = partial_K Y_j - partial_j Y_K
    for K, j = 1..3 (stored at [K-1, j-1])."""
    dY = np.stack([grid.partial_spatial(Y, k) for k in (1, 2, 3)])
    return dY - np.swapaxes(dY, 0, 1)


def inner_g(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """<X, Y>_g = X_alpha Y^alpha = -X^0 Y^0 + X^a Y^a."""
    return np.einsum("a...,a...,a->...", X, Y, G_DIAG)


def inner_h(X: np.ndarray, Y: np.ndarray, v: np.ndarray) -> np.ndarray:
    """<X, Y>_h with h = g + 2 v (x) v: equals <X,Y>_g + 2 <v,X>_g <v,Y>_g."""
    return inner_g(X, Y) + 2.0 * inner_g(v, X) * inner_g(v, Y)


def vort_inner(omega: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """<omega, sigma>_g = omega_{alpha beta} sigma^{alpha beta}, both indices
    raised with g."""
    return np.einsum("ab...,ab...,a,b->...", omega, sigma, G_DIAG, G_DIAG)


def grad_inner_crossed(T1: np.ndarray, T2: np.ndarray) -> np.ndarray:
    """Crossed trace grad_alpha X^beta grad_beta Y^alpha of two mixed
    gradients."""
    return np.einsum("ab...,ba...->...", T1, T2)


def grad_inner_full_g(T1: np.ndarray, T2: np.ndarray) -> np.ndarray:
    """Full g-contraction g_{a abar} g^{b bbar} T1_b^a T2_bbar^abar
    (both slots paired straight, upper index lowered, lower index raised)."""
    return np.einsum("ba...,ba...,a,b->...", T1, T2, G_DIAG, G_DIAG)


def grad_inner_full_h(
    T1: np.ndarray, T2: np.ndarray, h: np.ndarray, h_inv: np.ndarray
) -> np.ndarray:
    """Full h-contraction h_{a abar} (h^{-1})^{b bbar} T1_b^a T2_bbar^abar;
    positive definite on the constraint surface."""
    return np.einsum("ba...,BA...,aA...,bB...->...", T1, T2, h, h_inv)


def symmetric_split_residual(T: np.ndarray) -> np.ndarray:
    """Residual of the symmetric/antisymmetric decomposition of a mixed
    gradient contraction:

        crossed(T, T) - [ full_g(T, T) - 1/2 <vort, vort>_g ],

    which vanishes identically (pure algebra; zero to rounding).
    """
    omega = vort_of_mixed_grad(T)
    return grad_inner_crossed(T, T) - (
        grad_inner_full_g(T, T) - 0.5 * vort_inner(omega, omega)
    )


@dataclass
class MetricH:
    """The Riemannian metric h = g + 2 v (x) v and its inverse."""

    h: np.ndarray  # (4, 4, ...) lowered components
    h_inv: np.ndarray  # (4, 4, ...) raised components
    product_residual: float  # max |h . h_inv - I|


def metric_h(v: np.ndarray, normalization_tol: float = 1e-4) -> MetricH:
    """Assemble h_{mu nu} = g_{mu nu} + 2 v_mu v_nu and its closed-form
    inverse (h^{-1})^{mu nu} = g^{mu nu} + 2 v^mu v^nu.

    The inverse formula is exact only where <v,v>_g = -1; the product
    h . h_inv - I is checked against a tolerance that accounts for the
    measured normalization drift.

    Raises:
        ValueError: if the normalization constraint is violated beyond
            normalization_tol, or the product check fails beyond what that
            violation explains.
    """
    viol = float(np.max(np.abs(inner_g(v, v) + 1.0)))
    if viol > normalization_tol:
        raise ValueError(
            f"four-velocity normalization violated: max |<v,v>_g + 1| = "
            f"{viol:.3e} exceeds {normalization_tol:.1e}"
        )
    vl = lower_index(v)
    h = 2.0 * np.einsum("a...,b...->ab...", vl, vl)
    h_inv = 2.0 * np.einsum("a...,b...->ab...", v, v)
    for mu in range(4):
        h[mu, mu] += G_DIAG[mu]
        h_inv[mu, mu] += G_DIAG[mu]

    prod = np.einsum("ab...,bc...->ac...", h, h_inv)
    for mu in range(4):
        prod[mu, mu] -= 1.0
    residual = float(np.max(np.abs(prod)))
    vmax2 = float(np.max(np.sum(v * v, axis=0)))
    if residual > 1e-8 + 5.0 * viol * (1.0 + vmax2):
        raise ValueError(
            f"h . h_inv deviates from identity by {residual:.3e}, more than "
            f"the normalization drift explains"
        )
    return MetricH(h=h, h_inv=h_inv, product_residual=residual)


def h_eigen_bounds(v: np.ndarray):
    """Eigenvalue range of h = g + 2 v (x) v at each point.

    h has eigenvalue 1 on spatial directions orthogonal to the spatial
    velocity, and eigenvalues (v0 -+ |vbar|)^2 on the boost plane, so

        lambda_min = (v0 - |vbar|)^2,   lambda_max = (v0 + |vbar|)^2,

    capped/floored by 1 when the velocity is nonzero. Both are positive on
    the constraint surface.

    Returns:
        (lambda_min, lambda_max) arrays over the grid shape of v.
    """
    v0 = v[0]
    b = np.sqrt(np.sum(np.square(v[1:]), axis=0))
    lam_minus = np.square(v0 - b)
    lam_plus = np.square(v0 + b)
    return np.minimum(lam_minus, 1.0), np.maximum(lam_plus, 1.0)
