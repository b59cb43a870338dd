import csv
import math

import numpy as np
import pytest

import spinctl.experiments as experiments
from spinctl.config import ExperimentConfig
from spinctl.experiments import build_spec, fmt, run_convergence, run_dynamics, run_noise_compare


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def quick(**kw):
    base = dict(realizations=2, max_iters=8, seed=0)
    base.update(kw)
    return ExperimentConfig(**base)


def test_fmt_round_trips():
    for v in (0.1, 1e-17, 2.0 / 3.0, -5e300):
        assert float(fmt(v)) == v
    assert fmt(np.int64(3)) == "3" and fmt(True) == "1" and fmt(2.0) == "2.0"


def test_single_row_trace_without_iterations(tmp_path):
    config = quick(scheme="local", realizations=1, max_iters=0)
    run_convergence(config, tmp_path)
    rows = read_csv(tmp_path / "trace_local_0.csv")
    spec = build_spec(config, "local")
    assert rows == [["eval_index", "J"], ["0", repr(spec(spec.scheme.initial_params(0)))]]


def test_convergence_files_well_formed(tmp_path):
    summary = run_convergence(quick(), tmp_path)
    for kind in ("local", "global"):
        traces = summary.completed(kind)
        assert len(traces) == 2
        for r, trace in enumerate(traces):
            rows = read_csv(tmp_path / f"trace_{kind}_{r}.csv")
            assert rows[0] == ["eval_index", "J"]
            assert len(rows) - 1 == trace.n_evals
            assert all(math.isfinite(float(v)) for row in rows[1:] for v in row)
        summary_rows = read_csv(tmp_path / f"summary_{kind}.csv")
        assert summary_rows[0] == ["eval_index", "mean_J", "std_J"]
        assert len(summary_rows) - 1 == max(t.n_evals for t in traces)
        runs = read_csv(tmp_path / f"runs_{kind}.csv")
        assert [row[1] for row in runs[1:]] == ["0", "1"]
    assert (tmp_path / "trace_local_0.csv").read_bytes().endswith(b"\n")
    assert b"\r" not in (tmp_path / "summary_global.csv").read_bytes()


def test_partial_failure_recorded(tmp_path, monkeypatch):
    real_optimize = experiments.optimize

    def flaky(spec, x0, *args):
        if spec.scheme.name == "global" and x0[0] == spec.scheme.initial_params(1)[0]:
            raise FloatingPointError("boom")
        return real_optimize(spec, x0, *args)

    monkeypatch.setattr(experiments, "optimize", flaky)
    summary = run_convergence(quick(), tmp_path)
    assert len(summary.completed("global")) == 1
    runs = read_csv(tmp_path / "runs_global.csv")
    assert "boom" in runs[2][-1]
    assert not (tmp_path / "trace_global_1.csv").exists()


def test_dynamics_outputs(tmp_path):
    config = ExperimentConfig(experiment="dynamics", realizations=3, max_iters=40)
    summary = run_dynamics(config, tmp_path)
    rows = read_csv(tmp_path / "dynamics.csv")
    header = rows[0]
    assert header == ["t", "mean_F_tar", "std_F_tar", "mean_F_in", "std_F_in",
                      "mean_pop_0", "mean_pop_1", "mean_pop_2", "std_pop_0", "std_pop_1", "std_pop_2"]
    assert len(rows) == 1 + 9
    first = dict(zip(header, map(float, rows[1])))
    assert first["t"] == 0 and first["mean_F_in"] == 1 and first["mean_F_tar"] == 0
    assert [first[f"mean_pop_{j}"] for j in range(3)] == [1, 0, 0]
    last = dict(zip(header, map(float, rows[-1])))
    assert last["t"] == 2.0
    assert last["mean_F_tar"] > 0.99 and last["mean_pop_2"] > 0.99
    # populations of a single excitation sum to one at every boundary
    for row in rows[1:]:
        pops = [float(row[header.index(f"mean_pop_{j}")]) for j in range(3)]
        assert sum(pops) == pytest.approx(1, abs=1e-9)
    best = summary.best.trace
    assert abs(summary.best_terminal_F - (1 - best.fun)) < 1e-12
    assert summary.best_terminal_F == max(t.fidelity for t in summary.completed("local"))
    controls = read_csv(tmp_path / "controls_best.csv")
    assert controls[0] == ["ell", "t_start", "site", "u"]
    assert len(controls) == 1 + 8 * 3
    u = np.array([float(r[3]) for r in controls[1:]]).reshape(8, 3)
    assert np.array_equal(u, build_spec(config, "local").controls(best.x))


def test_dynamics_trend_is_upward(tmp_path):
    run_dynamics(ExperimentConfig(experiment="dynamics", realizations=3, max_iters=40), tmp_path)
    rows = read_csv(tmp_path / "dynamics.csv")
    f = [float(r[1]) for r in rows[1:]]
    assert all(b >= a - 0.05 for a, b in zip(f, f[1:]))


def test_noise_compare_full_depolarization(tmp_path):
    config = quick(experiment="noise-compare", p=1.0, max_iters=3)
    summary = run_noise_compare(config, tmp_path)
    for kind in ("local", "global"):
        assert summary.mean_final_F[kind] == pytest.approx(1 / 8, abs=1e-12)
    rows = read_csv(tmp_path / "noise_summary.csv")
    assert rows[0] == ["scheme", "mean_final_F", "std_final_F", "robustness_ratio"]
    assert [r[0] for r in rows[1:]] == ["local", "global"]
    assert float(rows[1][3]) == pytest.approx(1.0, abs=1e-10)
    assert not summary.flags


def test_noise_compare_p0_matches_convergence(tmp_path):
    conv = run_convergence(quick(), tmp_path / "a")
    noisy = run_noise_compare(quick(experiment="noise-compare", p=0.0), tmp_path / "b")
    for kind in ("local", "global"):
        for a, b in zip(conv.completed(kind), noisy.completed(kind)):
            assert abs(a.fun - b.fun) < 1e-8


def test_workers_do_not_change_results(tmp_path):
    run_convergence(quick(), tmp_path / "serial")
    run_convergence(quick(workers=2), tmp_path / "pool")
    for path in sorted((tmp_path / "serial").iterdir()):
        assert path.read_bytes() == (tmp_path / "pool" / path.name).read_bytes()
