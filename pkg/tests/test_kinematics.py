import numpy as np
import pytest

from releu.grid import Grid
from releu.kinematics import (
    FlowMapState,
    SingularMapError,
    compute_matrices,
    differentiate_A,
    differentiate_J,
    initial_matrices,
    jacobian_rate,
    piola_residual,
)


def rest_state(grid):
    eta = np.zeros((4,) + grid.shape)
    v = np.zeros((4,) + grid.shape)
    v[0] = 1.0
    return FlowMapState(0.0, eta, v)


def nonlinear_state(grid, tau=0.3):
    """Smooth test map: time component tau*(1 + 0.1 sin 2pi y1), spatial
    displacement small, smooth, periodic where it must be."""
    Y1, Y2, Y3 = grid.mesh()
    eta = np.zeros((4,) + grid.shape)
    v = np.zeros((4,) + grid.shape)
    v[0] = 1.0 + 0.1 * np.sin(2 * np.pi * Y1)
    eta[0] = tau * v[0]
    eta[1] = 0.02 * np.sin(2 * np.pi * Y2) * np.cos(2 * np.pi * Y1)
    eta[2] = 0.01 * np.cos(2 * np.pi * Y1) * Y3**2
    eta[3] = 0.03 * np.sin(2 * np.pi * Y1) * np.sin(0.5 * np.pi * Y3)
    return FlowMapState(tau, eta, v)


def identity_44(shape):
    eye = np.zeros((4, 4) + shape)
    for i in range(4):
        eye[i, i] = 1.0
    return eye


class TestComputeMatrices:
    def test_rest_flow(self):
        grid = Grid(8, 8, 9)
        mats = compute_matrices(rest_state(grid), grid)
        eye = identity_44(grid.shape)
        assert np.max(np.abs(mats.M - eye)) < 1e-14
        assert np.max(np.abs(mats.A - eye)) < 1e-14
        assert np.max(np.abs(mats.J - 1.0)) < 1e-14
        assert np.max(np.abs(mats.cof - eye)) < 1e-14

    def test_initial_jacobian_equals_v0(self):
        grid = Grid(8, 8, 9)
        state = rest_state(grid)
        state.v[0] = np.sqrt(2.0)
        state.v[1] = 1.0
        mats = compute_matrices(state, grid)
        assert np.max(np.abs(mats.J - np.sqrt(2.0))) < 1e-14

    def test_linear_map_exact(self):
        grid = Grid(8, 8, 9)
        _, _, Y3 = grid.mesh()
        c = np.array([0.05, -0.3, 0.2, 0.1])
        state = rest_state(grid)
        state.v[0] = 1.2
        state.v[1] = 0.4
        for mu in range(4):
            state.eta[mu] = c[mu] * Y3 + 0.01 * mu
        mats = compute_matrices(state, grid)
        want_row3 = c.copy()
        want_row3[3] += 1.0
        for mu in range(4):
            assert np.max(np.abs(mats.M[3, mu] - want_row3[mu])) < 1e-12
            assert np.max(np.abs(mats.M[0, mu] - state.v[mu])) < 1e-14

    def test_inverse_consistency(self):
        grid = Grid(16, 16, 17)
        mats = compute_matrices(nonlinear_state(grid), grid)
        prod = np.einsum("ka...,al...->kl...", mats.M, mats.A)
        prod -= identity_44(grid.shape)
        assert np.max(np.abs(prod)) < 1e-10

    def test_cofactor_identity(self):
        grid = Grid(16, 16, 17)
        mats = compute_matrices(nonlinear_state(grid), grid)
        assert np.max(np.abs(mats.cof - mats.J * mats.A)) < 1e-12

    def test_singular_map_aborts(self):
        grid = Grid(8, 8, 9)
        state = rest_state(grid)
        state.v[0] = 0.0  # degenerate velocity row
        with pytest.raises(SingularMapError):
            compute_matrices(state, grid)


class TestInitialMatrices:
    def test_rest(self):
        v = np.zeros((4, 2, 2, 2))
        v[0] = 1.0
        mats = initial_matrices(v)
        eye = identity_44((2, 2, 2))
        assert np.max(np.abs(mats.M - eye)) < 1e-15
        assert np.max(np.abs(mats.A - eye)) < 1e-15
        assert np.max(np.abs(mats.J - 1.0)) < 1e-15

    def test_boosted_inverse_entries(self):
        v = np.zeros((4, 1, 1, 1))
        v[0] = np.sqrt(2.0)
        v[1] = 1.0
        mats = initial_matrices(v)
        assert mats.A[0, 0, 0, 0, 0] == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-15)
        assert mats.A[0, 1, 0, 0, 0] == pytest.approx(-1.0 / np.sqrt(2.0), rel=1e-15)
        assert mats.J[0, 0, 0] == pytest.approx(np.sqrt(2.0), rel=1e-15)

    def test_agrees_with_stencil_construction_at_time_zero(self):
        grid = Grid(16, 16, 17)
        Y1, Y2, _ = grid.mesh()
        v = np.zeros((4,) + grid.shape)
        v[1] = 0.1 * np.sin(2 * np.pi * Y2)
        v[2] = 0.1 * np.sin(2 * np.pi * Y1)
        v[0] = np.sqrt(1.0 + v[1] ** 2 + v[2] ** 2)
        closed = initial_matrices(v)
        stenciled = compute_matrices(FlowMapState(0.0, np.zeros_like(v), v), grid)
        assert np.max(np.abs(closed.M - stenciled.M)) < 1e-12
        assert np.max(np.abs(closed.A - stenciled.A)) < 1e-12
        assert np.max(np.abs(closed.J - stenciled.J)) < 1e-12

    def test_rejects_past_directed(self):
        v = np.zeros((4, 1, 1, 1))
        v[0] = -1.0
        with pytest.raises(ValueError):
            initial_matrices(v)


class TestPiolaResidual:
    def test_rest_flow(self):
        grid = Grid(8, 8, 9)
        mats = compute_matrices(rest_state(grid), grid)
        assert piola_residual(mats, grid) < 1e-12

    def test_linear_map(self):
        grid = Grid(8, 8, 9)
        _, _, Y3 = grid.mesh()
        state = rest_state(grid)
        state.v[1] = 0.3
        state.eta[1] = 0.2 * Y3
        mats = compute_matrices(state, grid)
        assert piola_residual(mats, grid) < 1e-12

    def test_refinement_order(self):
        res = []
        for n in (16, 32):
            grid = Grid(n, n, n + 1)
            mats = compute_matrices(nonlinear_state(grid), grid)
            res.append(piola_residual(mats, grid))
        assert res[0] / res[1] >= 8.0


class TestDifferentiateA:
    def test_constant_matrix_direction_is_zero(self):
        grid = Grid(8, 8, 9)
        mats = compute_matrices(rest_state(grid), grid)
        dM = np.zeros_like(mats.M)
        assert np.max(np.abs(differentiate_A(mats, dM))) == 0.0

    def test_identity_vs_stencil(self):
        errs = []
        for n in (16, 32):
            grid = Grid(n, n, n + 1)
            mats = compute_matrices(nonlinear_state(grid), grid)
            dM = grid.partial_horizontal(mats.M, 1)
            analytic = differentiate_A(mats, dM)
            stencil = grid.partial_horizontal(mats.A, 1)
            errs.append(np.max(np.abs(analytic - stencil)))
        order = np.log2(errs[0] / errs[1])
        assert order >= 3.6

    def test_determinant_expansion_vs_stencil(self):
        errs = []
        for n in (16, 32):
            grid = Grid(n, n, n + 1)
            mats = compute_matrices(nonlinear_state(grid), grid)
            dM = grid.partial_horizontal(mats.M, 1)
            analytic = differentiate_J(mats, dM)
            stencil = grid.partial_horizontal(mats.J, 1)
            errs.append(np.max(np.abs(analytic - stencil)))
        order = np.log2(errs[0] / errs[1])
        assert order >= 3.6


class TestJacobianRate:
    def test_rest_flow_zero(self):
        grid = Grid(8, 8, 9)
        mats = compute_matrices(rest_state(grid), grid)
        v_grad = np.zeros((4, 4) + grid.shape)
        assert np.max(np.abs(jacobian_rate(mats, v_grad))) == 0.0

    def test_free_streaming_matches_tau_difference(self):
        grid = Grid(16, 16, 17)
        Y1, Y2, Y3 = grid.mesh()
        V = np.zeros((4,) + grid.shape)
        V[1] = 0.1 * np.sin(2 * np.pi * Y2)
        V[2] = 0.05 * np.sin(2 * np.pi * Y1) * Y3
        V[0] = np.sqrt(1.0 + V[1] ** 2 + V[2] ** 2)

        def state_at(tau):
            return FlowMapState(tau, tau * V, V)

        tau, dtau = 0.2, 1e-4
        mats = compute_matrices(state_at(tau), grid)
        v_grad = np.zeros((4, 4) + grid.shape)  # acceleration row is zero
        for k in (1, 2, 3):
            v_grad[k] = grid.partial_spatial(V, k)
        rate = jacobian_rate(mats, v_grad)

        J_plus = compute_matrices(state_at(tau + dtau), grid).J
        J_minus = compute_matrices(state_at(tau - dtau), grid).J
        fd = (J_plus - J_minus) / (2.0 * dtau)
        assert np.max(np.abs(rate - fd)) < 1e-7
