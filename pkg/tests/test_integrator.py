"""Time integration: transport-form evolution, step control, and the
cross-checks between the equivalent momentum forms."""

import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given, settings
from hypothesis import strategies as st

from releu.eos import Eos
from releu.grid import Grid
from releu.initial_data import bundle_from_fields, derive_v0, make_physical_vacuum_data
from releu.integrator import (
    NumericalAbort,
    SimulationState,
    cfl_dt,
    renormalize_velocity,
    residual_form_146,
    residual_form_149b,
    rhs,
    step_rk4,
)
from releu.kinematics import FlowMapState


def default_state(n=16, eps=0.01):
    grid = Grid(n, n, n + 1)
    data = make_physical_vacuum_data(grid, eps=eps)
    return SimulationState.from_initial_data(grid, Eos(2.0), data)


def free_streaming_state(n=16, amp=0.1):
    """Zero mass density, spatially varying normalized velocity."""
    grid = Grid(n, n, n + 1)
    y1 = grid.y1[:, None, None]
    y2 = grid.y2[None, :, None]
    v_bar = np.zeros((3,) + grid.shape)
    v_bar[0] = amp * np.sin(2 * np.pi * y2)
    v_bar[1] = amp * np.cos(2 * np.pi * y1)
    data = bundle_from_fields(grid, np.zeros(grid.shape), v_bar, eps_requested=0.0)
    return SimulationState.from_initial_data(grid, Eos(2.0), data)


def constraint_drift(state):
    v = state.flow.v
    return float(np.max(np.abs(-v[0] ** 2 + np.sum(v[1:] ** 2, axis=0) + 1.0)))


def evolve(state, n_steps, dt, **kw):
    for _ in range(n_steps):
        state = step_rk4(state, dt, **kw)
    return state


class TestRhs:
    def test_free_streaming_acceleration_vanishes(self):
        ev = rhs(free_streaming_state())
        assert np.max(np.abs(ev.d_v)) == 0.0
        assert ev.sweep_change == 0.0
        assert np.array_equal(ev.d_eta, free_streaming_state().flow.v)

    def test_homogeneous_rest_state_is_static(self):
        grid = Grid(16, 16, 17)
        data = bundle_from_fields(
            grid, np.full(grid.shape, 0.1), np.zeros((3,) + grid.shape), 0.1
        )
        ev = rhs(SimulationState.from_initial_data(grid, Eos(2.0), data))
        assert np.max(np.abs(ev.d_v)) == 0.0

    @given(
        vb=st.tuples(*[st.floats(-2, 2) for _ in range(3)]),
        n=st.floats(0.01, 0.3),
    )
    @settings(max_examples=20, deadline=None)
    def test_any_uniform_boosted_state_is_static(self, vb, n):
        grid = Grid(8, 8, 9)
        v_bar = np.zeros((3,) + grid.shape)
        for i in range(3):
            v_bar[i] = vb[i]
        data = bundle_from_fields(grid, np.full(grid.shape, n), v_bar, n)
        ev = rhs(SimulationState.from_initial_data(grid, Eos(2.0), data), sweeps=6)
        assert np.max(np.abs(ev.d_v)) == 0.0

    def test_boundary_acceleration_points_toward_vacuum(self):
        state = default_state()
        ev = rhs(state)
        dF3 = state.grid.partial_spatial(state.data.F_ring, 3)
        # lower face: mass increases inward, fluid accelerates outward (down)
        assert np.all(dF3[..., 0] > 0)
        assert np.all(ev.d_v[3][..., 0] < 0)
        # upper face mirrors
        assert np.all(dF3[..., -1] < 0)
        assert np.all(ev.d_v[3][..., -1] > 0)

    def test_fixed_point_settles_on_default_data(self):
        ev = rhs(default_state())
        assert ev.sweep_change < 1e-10

    def test_collapsed_map_aborts(self):
        state = default_state()
        eta = state.flow.eta.copy()
        eta[3] = -1.2 * state.grid.y3[None, None, :]  # folds the slab over
        bad = replace(state, flow=FlowMapState(0.0, eta, state.flow.v.copy()))
        with pytest.raises(NumericalAbort):
            rhs(bad)

    def test_nan_velocity_aborts(self):
        state = default_state()
        v = state.flow.v.copy()
        v[1, 0, 0, 0] = np.nan
        bad = replace(state, flow=FlowMapState(0.0, state.flow.eta.copy(), v))
        with pytest.raises(NumericalAbort):
            rhs(bad)


class TestStepRk4:
    def test_free_streaming_is_exact_linear_motion(self):
        state = free_streaming_state()
        v0 = state.flow.v.copy()
        out = evolve(state, 100, 0.002)
        assert np.array_equal(out.flow.v, v0)  # acceleration is exactly zero
        expected = out.flow.tau * v0
        assert np.max(np.abs(out.flow.eta - expected)) <= 1e-10
        assert out.step_count == 100

    def test_dt_halving_self_convergence(self):
        state = default_state()
        ends = [evolve(state, round(0.08 / dt), dt) for dt in (0.02, 0.01, 0.005)]

        def dist(a, b):
            return max(
                np.max(np.abs(a.flow.eta - b.flow.eta)),
                np.max(np.abs(a.flow.v - b.flow.v)),
            )

        e_coarse = dist(ends[0], ends[1])
        e_fine = dist(ends[1], ends[2])
        assert e_coarse / e_fine >= 12.0

    def test_one_step_normalization_drift_is_fifth_order(self):
        state = default_state()
        d_coarse = constraint_drift(step_rk4(state, 0.04))
        d_fine = constraint_drift(step_rk4(state, 0.02))
        assert d_coarse <= 1e-12
        assert d_coarse / d_fine >= 20.0  # ~2^5 for a local truncation effect

    def test_renormalization_flag_pins_the_constraint(self):
        out = evolve(default_state(), 5, 0.02, renormalize=True)
        assert constraint_drift(out) <= 5e-16


class TestCflDt:
    def test_vacuum_gives_pure_grid_limit(self):
        state = free_streaming_state()
        assert cfl_dt(state, safety=0.4) == pytest.approx(0.4 / 16, rel=1e-14)

    def test_doubling_resolution_halves_dt(self):
        ratio = cfl_dt(default_state(16)) / cfl_dt(default_state(32))
        assert ratio == pytest.approx(2.0, rel=0.01)

    def test_louder_sound_speed_shrinks_dt(self):
        assert cfl_dt(default_state(eps=0.05)) < cfl_dt(default_state(eps=0.01))

    def test_floor_applies(self):
        assert cfl_dt(default_state(), dt_min=1.0) == 1.0

    def test_bad_safety_rejected(self):
        with pytest.raises(ValueError):
            cfl_dt(default_state(), safety=0.0)


class TestRenormalizeVelocity:
    def test_hand_example(self):
        state = default_state()
        v = np.zeros_like(state.flow.v)
        v[0], v[1], v[3] = 1.1, 0.6, 0.8
        out = renormalize_velocity(
            replace(state, flow=FlowMapState(0.0, state.flow.eta.copy(), v))
        )
        assert out.flow.v[0].flat[0] == pytest.approx(np.sqrt(2.0), rel=1e-15)
        assert np.array_equal(out.flow.v[1:], v[1:])

    def test_normalized_state_unchanged(self):
        state = default_state()
        out = renormalize_velocity(state)
        assert np.max(np.abs(out.flow.v - state.flow.v)) <= 1e-15

    def test_idempotent(self):
        once = renormalize_velocity(default_state())
        twice = renormalize_velocity(once)
        assert np.array_equal(once.flow.v, twice.flow.v)


class TestResidualForms:
    def test_free_streaming_residuals_vanish_identically(self):
        state = free_streaming_state()
        ev = rhs(state)
        assert np.max(np.abs(residual_form_146(state, ev))) == 0.0
        assert np.max(np.abs(residual_form_149b(state, ev))) == 0.0

    def test_residuals_converge_on_solutions(self):
        def residuals(n, n_steps):
            state = default_state(n)
            state = evolve(state, n_steps, 0.05 / n_steps)
            ev = rhs(state)
            return (
                np.max(np.abs(residual_form_146(state, ev))),
                np.max(np.abs(residual_form_149b(state, ev))),
            )

        coarse = residuals(16, 4)
        fine = residuals(32, 8)
        assert coarse[0] / fine[0] >= 4.0
        assert coarse[1] / fine[1] >= 4.0

    def test_manufactured_bump_is_detected(self):
        state = default_state()
        ev = rhs(state)
        clean_146 = np.max(np.abs(residual_form_146(state, ev)))
        clean_149 = np.max(np.abs(residual_form_149b(state, ev)))

        y1 = state.grid.y1[:, None, None]
        y3 = state.grid.y3[None, None, :]
        eta = state.flow.eta.copy()
        eta[3] += 0.03 * np.sin(2 * np.pi * y1) * 16.0 * y3**2 * (1 - y3) ** 2
        bumped = replace(state, flow=FlowMapState(0.0, eta, state.flow.v.copy()))
        evb = rhs(bumped, sweeps=8)
        assert np.max(np.abs(residual_form_146(bumped, evb))) >= 20.0 * clean_146
        assert np.max(np.abs(residual_form_149b(bumped, evb))) >= 20.0 * clean_149


class TestEvolutionInvariants:
    def test_mass_constraint_is_algebraic(self):
        state = evolve(default_state(), 8, 0.02)
        ev = rhs(state)
        gap = np.max(np.abs(ev.f * ev.matrices.J - state.data.F_ring))
        assert gap <= 1e-15

    def test_constraint_drift_scales_at_integrator_order(self):
        state = default_state()
        d_coarse = constraint_drift(evolve(state, 5, 0.02))
        d_fine = constraint_drift(evolve(state, 10, 0.01))
        assert 8.0 <= d_coarse / d_fine <= 40.0

    def test_time_reversal_returns_the_state(self):
        state = default_state()
        back = step_rk4(step_rk4(state, 0.02), -0.02)
        diff = max(
            np.max(np.abs(back.flow.eta - state.flow.eta)),
            np.max(np.abs(back.flow.v - state.flow.v)),
        )
        assert diff <= 0.02**4
        assert diff <= 1e-11  # in practice the two truncations nearly cancel

    def test_jacobian_stays_in_band_on_default_run(self):
        state = default_state()
        v0_sup = float(np.max(state.data.v0))
        out = evolve(state, 5, 0.02)
        J = rhs(out).matrices.J
        assert v0_sup - 0.5 <= float(J.min()) and float(J.max()) <= v0_sup + 0.5
