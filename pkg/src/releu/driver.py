"""Run choreography and report emission.

A run evolves the default physical-vacuum data and writes a uniformly
spaced snapshot series plus a per-step monitor log. Diagnostics use
centered finite differences in tau, so the series is seeded three snapshot
intervals *before* tau = 0 (by stepping backward) and overruns t_end by the
same margin; every requested report time is then the center of a full
stack window, with tau = 0 an exact series point.

Reports are plain CSV with fixed headers; floats are printed with 17
significant digits so identical runs produce identical bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import SimConfig
from .diagnostics import (
    BootstrapMonitor,
    InsufficientHistoryError,
    TimeDerivativeStack,
    energy_report,
    norm_S,
    vorticity_diagnostics,
)
from .diagnostics.monitors import vertical_column_quadratic_form
from .eos import Eos
from .grid import Grid
from .initial_data import (
    InitialDataBundle,
    bundle_from_fields,
    make_physical_vacuum_data,
    validate_physical_vacuum,
)
from .integrator import NumericalAbort, SimulationState, cfl_dt, step_rk4
from .kinematics import FlowMapState, compute_matrices
from .operators import inner_g
from .snapshot_io import Snapshot, write_snapshot

SEED_INTERVALS = 3  # stack windows reach this many snapshot intervals back

MONITOR_HEADER = (
    "step",
    "tau",
    "constraint_drift",
    "min_jacobian",
    "sup_mass_fraction",
    "mass_fraction_ok",
    "jacobian_band_ok",
    "vertical_column_ok",
)

DIAGNOSTIC_HEADER = (
    "tau",
    "norm_S_running",
    "energy_total",
    "energy_integrand_min",
    "vort_Sv_norm",
    "expansion_residual",
    "monitors_ok",
    "mass_fraction_margin",
    "flow_map_norm_margin",
    "velocity_norms_margin",
    "jacobian_band_margin",
    "vertical_column_margin",
)


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def build_setup(cfg: SimConfig):
    grid = Grid(cfg.grid.n1, cfg.grid.n2, cfg.grid.n3)
    eos = Eos(gamma=cfg.eos.gamma)
    data = make_physical_vacuum_data(
        grid,
        eps=cfg.data.eps,
        pert_amp=cfg.data.pert_amp,
        velocity_amp=cfg.data.velocity_amp,
    )
    return grid, eos, data


def _snapshot_fields(state: SimulationState) -> dict[str, np.ndarray]:
    return {
        "eta": state.flow.eta,
        "v": state.flow.v,
        "F": state.data.F_ring,
    }


def _monitor_row(state: SimulationState, data: InitialDataBundle):
    mats = compute_matrices(state.flow, state.grid)
    v = state.flow.v
    drift = float(np.max(np.abs(inner_g(v, v) + 1.0)))
    min_J = float(np.min(mats.J))
    f = data.F_ring / mats.J
    sup_f = float(np.max(f))
    jac_ok = bool(
        np.all(mats.J >= data.v0 - 0.5) and np.all(mats.J <= data.v0 + 0.5)
    )
    w = np.sum(np.square(data.v_spatial[:2]), axis=0)
    q = vertical_column_quadratic_form(mats)
    col_ok = bool(np.all(q >= 0.25 + w) and np.all(q <= 2.0 + w))
    return (
        state.step_count,
        state.flow.tau,
        drift,
        min_J,
        sup_f,
        sup_f <= 0.125,
        jac_ok,
        col_ok,
    )


@dataclass
class RunResult:
    snapshot_paths: list[Path]
    monitor_rows: list[tuple]
    dt: float
    aborted: str | None = None


def init_output(cfg: SimConfig, out_dir) -> Path:
    """Write the initial snapshot (with the density fields the run itself
    does not need) and a data-validation report."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid, eos, data = build_setup(cfg)
    state = SimulationState.from_initial_data(grid, eos, data)
    snap_path = out / "initial.bin"
    fields = dict(_snapshot_fields(state))
    fields["n"] = data.n_ring
    write_snapshot(snap_path, grid.shape, 0.0, fields)

    report = validate_physical_vacuum(data, grid)
    names = [f.name for f in report.__dataclass_fields__.values()]
    values = [getattr(report, n) for n in names]
    write_csv(out / "data_report.csv", tuple(names), [tuple(values)])
    return snap_path


def run_simulation(cfg: SimConfig, out_dir) -> RunResult:
    """Evolve per the configuration, writing snapshots and the monitor log.

    Raises:
        NumericalAbort: when the step size falls below dt_min or the
            evolution leaves the representable regime; the monitor log
            written so far is flushed first.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid, eos, data = build_setup(cfg)
    state = SimulationState.from_initial_data(grid, eos, data)
    run = cfg.run

    paths: list[Path] = []
    rows: list[tuple] = [_monitor_row(state, data)]

    def dump(snapshot_state: SimulationState, index: int) -> None:
        path = out / f"snap_{index:04d}.bin"
        write_snapshot(
            path,
            grid.shape,
            snapshot_state.flow.tau,
            _snapshot_fields(snapshot_state),
        )
        paths.append(path)

    if run.t_end == 0.0:
        dump(state, 0)
        write_csv(out / "monitors.csv", MONITOR_HEADER, rows)
        return RunResult(paths, rows, dt=0.0)

    dt_guide = cfl_dt(state, safety=run.cfl_safety, dt_min=run.dt_min)
    intervals = max(1, math.ceil(run.t_end / (run.output_every * dt_guide)))
    dt = run.t_end / intervals / run.output_every
    if dt < run.dt_min:
        raise NumericalAbort(
            f"required step {dt:.3e} is below dt_min={run.dt_min:.3e}"
        )

    try:
        # seed the series before tau = 0 so early report times are stack
        # centers; these backward slices get snapshots but no monitor rows
        back = state
        backward: list[SimulationState] = []
        for i in range(SEED_INTERVALS):
            for _ in range(run.output_every):
                back = step_rk4(back, -dt, renormalize=run.renormalize)
            backward.append(back)
        for i, snap_state in enumerate(reversed(backward)):
            dump(snap_state, i)

        dump(state, SEED_INTERVALS)
        forward = state
        total_intervals = intervals + SEED_INTERVALS
        for i in range(total_intervals):
            for _ in range(run.output_every):
                forward = step_rk4(forward, dt, renormalize=run.renormalize)
                rows.append(_monitor_row(forward, data))
            dump(forward, SEED_INTERVALS + 1 + i)
    finally:
        write_csv(out / "monitors.csv", MONITOR_HEADER, rows)

    return RunResult(paths, rows, dt=dt)


def bundle_from_snapshot(grid: Grid, snap: Snapshot) -> InitialDataBundle:
    """Rebuild the initial-data bundle a diagnostics pass needs from a
    tau = 0 snapshot (F is stored; the density follows from F = n v0)."""
    v = snap.fields["v"]
    F = snap.fields["F"]
    n = F / v[0]
    eps_measured = float(np.max(F))
    return bundle_from_fields(grid, n, v[1:].copy(), eps_measured)


def diagnose_series(
    grid: Grid,
    eos: Eos,
    snaps: list[Snapshot],
    p_max: int = 2,
    capacity: int = 7,
):
    """Slide a stack window across a snapshot series and report per-center
    diagnostics. Returns (header, rows); windows whose evaluation aborts
    (singular map, insufficient history) contribute no row."""
    if len(snaps) < capacity:
        raise ValueError(
            f"series of {len(snaps)} snapshots cannot fill a "
            f"capacity-{capacity} stack"
        )
    stack = TimeDerivativeStack(grid, capacity=capacity)
    rows: list[tuple] = []
    monitor: BootstrapMonitor | None = None
    data: InitialDataBundle | None = None
    for i, snap in enumerate(snaps):
        stack.push(FlowMapState(snap.tau, snap.fields["eta"], snap.fields["v"]))
        if len(stack) < capacity:
            continue
        if monitor is None:
            center = snaps[i - capacity + 1 + stack.center_index]
            data = bundle_from_snapshot(grid, center)
            monitor = BootstrapMonitor(stack, data)
        try:
            s_val = norm_S(stack, data, p_max=p_max)
            e_rep = energy_report(stack, data, p_max=p_max)
            vort = vorticity_diagnostics(stack, eos, data)
            mon = monitor.evaluate(stack)
        except (NumericalAbort, InsufficientHistoryError):
            continue
        margins = {c.name: c.margin for c in mon.conditions}
        rows.append(
            (
                stack.center.tau,
                s_val,
                e_rep.total,
                e_rep.integrand_min,
                vort.vort_Sv_norm,
                vort.expansion_residual,
                mon.ok,
                margins["mass_fraction_small"],
                margins["flow_map_norm"],
                margins["velocity_derivative_norms"],
                margins["jacobian_band"],
                margins["vertical_column_band"],
            )
        )
    return DIAGNOSTIC_HEADER, rows
