"""Sweep and CLI tests: determinism, error records, exit codes, file formats."""

import json

import numpy as np
import pytest

from sqlab.cli import main
from sqlab.experiments import (
    ConfigError,
    ExperimentConfig,
    ResultRecord,
    chi_square_gof,
    linear_fit,
    render_records,
    run_sweep,
)


def _gap_config(**overrides):
    base = dict(subcommand="haar-gap", d_values=(2, 4), copies_values=(1, 2), seed=3)
    base.update(overrides)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError, match="format"):
        ExperimentConfig(subcommand="haar-gap", fmt="xml")
    with pytest.raises(ConfigError, match="threads"):
        ExperimentConfig(subcommand="haar-gap", threads=0)
    with pytest.raises(ConfigError, match="nonempty"):
        run_sweep(ExperimentConfig(subcommand="haar-gap", d_values=(), copies_values=(1,)))
    with pytest.raises(ConfigError, match="unknown sweep"):
        run_sweep(ExperimentConfig(subcommand="teleport", d_values=(2,)))


def test_haar_gap_sweep_produces_ordered_records():
    records = run_sweep(_gap_config())
    assert [r.params for r in records] == [
        {"d": 2, "N": 1},
        {"d": 2, "N": 2},
        {"d": 4, "N": 1},
        {"d": 4, "N": 2},
    ]
    assert all(r.error is None for r in records)
    assert all(r.values["gap"] <= r.values["bound_two_term"] + 1e-9 for r in records)


def test_sweep_is_deterministic_and_thread_count_invariant():
    config = _gap_config(mc_samples=2000)
    text_a = render_records(run_sweep(config), "csv")
    text_b = render_records(run_sweep(config), "csv")
    text_c = render_records(run_sweep(_gap_config(mc_samples=2000, threads=4)), "csv")
    assert text_a == text_b == text_c


def test_budget_exceeded_becomes_error_record():
    records = run_sweep(_gap_config(d_values=(2, 64), copies_values=(4,)))
    by_d = {r.params["d"]: r for r in records}
    assert by_d[2].error is None
    assert by_d[64].error.startswith("budget-exceeded")
    assert by_d[64].values == {}
    # the failing cell still renders as a complete row
    lines = render_records(records, "csv").splitlines()
    assert len(lines) == 3
    assert lines[1].count(",") == lines[2].count(",")


def test_copies_sweep_records():
    config = ExperimentConfig(subcommand="copies-sweep", d_values=(64, 128, 2), seed=0)
    records = run_sweep(config)
    by_d = {r.params["d"]: r for r in records}
    assert by_d[2].error.startswith("invalid-cell")
    assert by_d[128].values["min_copies"] > by_d[64].values["min_copies"]


def test_render_json_lines_round_trip():
    records = run_sweep(_gap_config())
    text = render_records(records, "json-lines")
    rows = [json.loads(line) for line in text.splitlines()]
    assert len(rows) == 4
    assert rows[0]["d"] == 2 and rows[0]["seed"] == 3
    assert rows[1]["gap"] == pytest.approx(1 / 3, abs=1e-9)


def test_render_csv_float_format_round_trips():
    records = run_sweep(_gap_config(d_values=(2,), copies_values=(2,)))
    text = render_records(records, "csv")
    header, row = text.splitlines()
    gap = float(row.split(",")[header.split(",").index("gap")])
    assert gap == records[0].values["gap"]


def test_timings_column_is_opt_in():
    records = run_sweep(_gap_config(d_values=(2,), copies_values=(1,)))
    assert "seconds" not in render_records(records, "csv").splitlines()[0]
    timed = render_records(records, "csv", timings=True)
    assert timed.splitlines()[0].endswith("seconds")


def test_render_rejects_mixed_kinds():
    a = ResultRecord(kind="haar-gap", params={}, values={}, seed=0)
    b = ResultRecord(kind="copies-sweep", params={}, values={}, seed=0)
    with pytest.raises(ValueError, match="mix"):
        render_records([a, b], "csv")


def test_chi_square_gof_accepts_true_distribution():
    rng = np.random.default_rng(0)
    probs = np.array([0.5, 0.25, 0.125, 0.125])
    draws = rng.choice(4, size=50_000, p=probs) + 1
    _, dof, p_value = chi_square_gof(draws, probs)
    assert dof == 3
    assert p_value >= 1e-3


def test_chi_square_gof_rejects_wrong_distribution():
    rng = np.random.default_rng(1)
    draws = rng.integers(1, 5, size=50_000)  # uniform over 4
    _, _, p_value = chi_square_gof(draws, np.array([0.4, 0.3, 0.2, 0.1]))
    assert p_value < 1e-6


def test_chi_square_gof_pools_tiny_bins():
    rng = np.random.default_rng(2)
    probs = np.array([0.9989, 0.001, 1e-4, 1e-6])
    draws = rng.choice(4, size=10_000, p=probs / probs.sum()) + 1
    statistic, dof, p_value = chi_square_gof(draws, probs)
    assert dof == 1  # the tiny bins pool into the 0.001 bin, leaving two cells
    assert p_value >= 1e-3


def test_chi_square_gof_point_mass_degenerates_gracefully():
    draws = np.ones(1000, dtype=int)
    statistic, dof, p_value = chi_square_gof(draws, np.array([1.0, 0.0]))
    assert (statistic, dof, p_value) == (0.0, 0, 1.0)


def test_linear_fit_recovers_exact_line():
    xs = np.arange(1, 8)
    slope, intercept, r2 = linear_fit(xs, 3.5 * xs - 2.0)
    assert slope == pytest.approx(3.5)
    assert intercept == pytest.approx(-2.0)
    assert r2 == pytest.approx(1.0)


# --- CLI surface ---


def test_cli_unknown_flag_is_config_error(capsys):
    assert main(["haar-gap", "--wat"]) == 1
    assert "error" in capsys.readouterr().err


def test_cli_empty_d_list_is_config_error(capsys):
    assert main(["haar-gap", "--d", ",", "--N", "1"]) == 1


def test_cli_haar_gap_writes_deterministic_csv(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"

    def run(out):
        return main(
            ["--seed", "5", "--out", str(out), "haar-gap", "--d", "2,4", "--N", "1,2", "--mc-samples", "1000"]
        )

    assert run(out_a) == 0
    assert run(out_b) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    header = out_a.read_text().splitlines()[0]
    assert header == "d,N,sym_dim,gap,bound_two_term,bound_final,o_rest_min_eig,mc_max_dev,seed,error"


def test_cli_solve_pipeline(tmp_path, capsys):
    inst_dir = tmp_path / "inst"
    assert main(["--seed", "21", "gen-instance", "--kind", "real-search", "--n", "6", "--C", "3", "--dir", str(inst_dir)]) == 0
    capsys.readouterr()
    assert main(["solve", "real-search", "--instance", str(inst_dir)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["correct"] is True
    assert [c["query"] for c in payload["calls"]] == [1, 1, 1]
    assert [c["sample"] for c in payload["calls"]] == [0, 0, 0]


def test_cli_solve_sample_only(tmp_path, capsys):
    inst_dir = tmp_path / "inst"
    main(["--seed", "22", "gen-instance", "--kind", "minus-sign", "--n", "8", "--C", "2", "--dir", str(inst_dir)])
    capsys.readouterr()
    assert main(["--seed", "1", "solve", "sample-only", "--instance", str(inst_dir), "--budget", "100"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert [c["sample"] for c in payload["calls"]] == [100, 100]
    assert [c["query"] for c in payload["calls"]] == [0, 0]


def test_cli_sample_test_passes_on_honest_sampler(capsys):
    assert main(["--seed", "2", "sample-test", "--dim", "32", "--draws", "20000"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["pass"] is True


def test_cli_discriminate_family(capsys):
    assert main(["--seed", "3", "discriminate", "--family", "minus-sign", "--d", "4", "--copies", "2", "--trials", "2000"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["dim"] == 256
    sigma = (payload["optimal_success"] * (1 - payload["optimal_success"]) / 2000) ** 0.5
    assert abs(payload["empirical_success"] - payload["optimal_success"]) < 3 * sigma + 1e-9


def test_cli_discriminate_files(tmp_path, capsys):
    from sqlab.quantum_sim import random_density_operator, save_density_operator

    rng = np.random.default_rng(9)
    for name in ("a", "b"):
        save_density_operator(tmp_path / f"{name}.txt", random_density_operator(4, rng))
    assert main(["discriminate", "--a", str(tmp_path / "a.txt"), "--b", str(tmp_path / "b.txt"), "--trials", "1000"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert 0.5 <= payload["optimal_success"] <= 1.0


def test_cli_discriminate_needs_a_source(capsys):
    assert main(["discriminate", "--trials", "10"]) == 1


def test_cli_sharp_p(tmp_path, capsys):
    circuit = tmp_path / "c.txt"
    circuit.write_text("qubits 3\nH 0\nT 1\nCNOT 0 2\n")
    assert main(["sharp-p", "--circuit", str(circuit)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["identity_ok"] is True
    assert payload["abs_diff"] <= 1e-12
    # an impossible tolerance exercises the violation exit code
    assert main(["sharp-p", "--circuit", str(circuit), "--tolerance", "-1"]) == 2


def test_cli_encoding_demo(capsys):
    assert main(["--seed", "4", "encoding-demo", "--n", "6", "--trials", "200"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["product_successes"] == 200
    assert payload["measurements_per_object"] == 1
    expected = 0.5 + 0.5 * (1 - (1 - 2 / 64) ** 2) ** 0.5
    assert payload["amplitude_single_copy_success"] == pytest.approx(expected, abs=1e-12)


def test_cli_missing_instance_dir_is_config_error(capsys):
    assert main(["solve", "minus-sign", "--instance", "/nonexistent/path"]) == 1
