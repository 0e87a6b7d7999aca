"""Run choreography: snapshot cadence, seeding before tau = 0, monitor logs,
and series diagnosis."""

import numpy as np
import pytest

from releu.config import parse_config
from releu.diagnostics import sobolev_norm_absolute
from releu.driver import (
    DIAGNOSTIC_HEADER,
    MONITOR_HEADER,
    diagnose_series,
    init_output,
    run_simulation,
)
from releu.eos import Eos
from releu.grid import Grid
from releu.initial_data import derive_v0
from releu.snapshot_io import read_series, read_snapshot, write_snapshot

SHORT = "[run]\nt_end = 0.02\noutput_every = 2\n"


@pytest.fixture(scope="module")
def short_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("short_run")
    result = run_simulation(parse_config(SHORT), out)
    return out, result


class TestChoreography:
    def test_zero_t_end_writes_exactly_one_snapshot(self, tmp_path):
        result = run_simulation(parse_config("[run]\nt_end = 0\n"), tmp_path)
        assert len(result.snapshot_paths) == 1
        assert read_snapshot(result.snapshot_paths[0]).tau == 0.0
        assert (tmp_path / "monitors.csv").exists()

    def test_series_covers_three_intervals_each_side(self, short_run):
        out, result = short_run
        snaps = read_series(result.snapshot_paths)
        taus = np.array([s.tau for s in snaps])
        assert len(snaps) == 8  # 3 seed + initial + (1 + 3 overhang)
        assert abs(taus[3]) <= 1e-15  # tau = 0 stays a series point
        spacings = np.diff(taus)
        assert np.all(np.abs(spacings - result.dt * 2) < 1e-14)
        assert taus[0] == pytest.approx(-3 * result.dt * 2)
        assert taus[-1] >= 0.02 + 2 * result.dt * 2

    def test_snapshots_carry_flow_and_mass_fields(self, short_run):
        _, result = short_run
        snap = read_snapshot(result.snapshot_paths[3])
        assert set(snap.fields) == {"eta", "v", "F"}
        assert snap.fields["eta"].shape == (4, 16, 16, 17)

    def test_monitor_rows_one_per_forward_step(self, short_run):
        out, result = short_run
        # initial row + output_every * (intervals + 3 overhang) step rows
        assert len(result.monitor_rows) == 1 + 2 * 4
        text = (out / "monitors.csv").read_text().splitlines()
        assert text[0] == ",".join(MONITOR_HEADER)
        assert len(text) == 1 + len(result.monitor_rows)

    def test_monitor_flags_hold_on_healthy_run(self, short_run):
        _, result = short_run
        for row in result.monitor_rows:
            assert row[-3] and row[-2] and row[-1]
            assert row[2] < 1e-12  # normalization drift
            assert row[3] > 0.5  # Jacobian stays near v0

    def test_csv_floats_round_trip(self, short_run):
        out, result = short_run
        line = (out / "monitors.csv").read_text().splitlines()[2]
        parsed = line.split(",")
        assert float(parsed[3]) == result.monitor_rows[1][3]

    def test_identical_configs_identical_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        ra = run_simulation(parse_config(SHORT), a)
        rb = run_simulation(parse_config(SHORT), b)
        for pa, pb in zip(ra.snapshot_paths, rb.snapshot_paths):
            assert pa.read_bytes() == pb.read_bytes()
        assert (a / "monitors.csv").read_bytes() == (b / "monitors.csv").read_bytes()


class TestInitOutput:
    def test_writes_initial_snapshot_and_report(self, tmp_path):
        path = init_output(parse_config(""), tmp_path)
        snap = read_snapshot(path)
        assert snap.tau == 0.0
        assert set(snap.fields) == {"eta", "v", "F", "n"}
        report = (tmp_path / "data_report.csv").read_text().splitlines()
        header = report[0].split(",")
        values = dict(zip(header, report[1].split(",")))
        assert float(values["c1"]) == pytest.approx(0.02, rel=0.01)
        assert float(values["c2"]) == pytest.approx(0.04, rel=0.01)


class TestDiagnoseSeries:
    def test_free_streaming_norm_column_tracks_flow_map_norm(self, tmp_path):
        grid = Grid(16, 16, 17)
        eos = Eos(2.0)
        v_bar = np.zeros((3,) + grid.shape)
        v_bar[0], v_bar[1] = 0.2, -0.1
        v4 = np.concatenate([derive_v0(v_bar)[None], v_bar])
        delta = 0.01
        paths = []
        for i in range(9):
            tau = (i - 3) * delta
            p = tmp_path / f"s{i}.bin"
            write_snapshot(
                p,
                grid.shape,
                tau,
                {"eta": tau * v4, "v": v4, "F": np.zeros(grid.shape)},
            )
            paths.append(p)
        header, rows = diagnose_series(grid, eos, read_series(paths))
        assert header == DIAGNOSTIC_HEADER
        assert len(rows) == 3
        i_s = header.index("norm_S_running")
        i_e = header.index("energy_total")
        for row, k in zip(rows, range(3)):
            tau_c = k * delta
            assert row[0] == pytest.approx(tau_c, abs=1e-15)
            expected = sobolev_norm_absolute(grid, tau_c * v4, 4) ** 2
            assert row[i_s] == pytest.approx(expected, rel=1e-12)
            assert row[i_e] == 0.0

    def test_evolved_run_reports_healthy_monitors(self, short_run):
        _, result = short_run
        grid = Grid(16, 16, 17)
        snaps = read_series(result.snapshot_paths)
        header, rows = diagnose_series(grid, Eos(2.0), snaps)
        taus = [r[0] for r in rows]
        assert taus == pytest.approx([0.0, 0.02], abs=1e-14)
        ok = header.index("monitors_ok")
        assert all(r[ok] for r in rows)

    def test_short_series_rejected(self):
        grid = Grid(16, 16, 17)
        with pytest.raises(ValueError):
            diagnose_series(grid, Eos(2.0), [])
