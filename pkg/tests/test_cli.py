"""Command-line interface: scenario parsing, sweeps, exit codes."""

import json

import numpy as np
import pytest

from thznoma import cli
from thznoma.cli import (
    ConfigError,
    SweepRow,
    default_scenario,
    load_preset,
    main,
    parse_scenario,
    rows_to_csv,
    run_sweep,
    validate_scenario,
)


def scenario_doc(**overrides):
    doc = {
        "radius_m": 60.0,
        "population": 300,
        "power_split": {"near": 0.33},
        "budget": {"power_w": 1.0, "gain_tx_db": 20.0, "gain_rx_db": 20.0,
                   "thermal_noise_w": 1e-21, "frequency_hz": 1.0e12,
                   "absorption_per_m": 0.05},
        "fading": {"m": 2.0},
        "schemes": ["proposed"],
        "targets": {"near_bps_hz": 3.0, "far_bps_hz": 0.5},
        "methods": ["simplified", "exact", "mc"],
        "trials": 4000,
        "seed": 99,
    }
    doc.update(overrides)
    return doc


def write_config(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------------------
# scenario parsing
# ---------------------------------------------------------------------------

def test_parse_minimal_scenario():
    sc = parse_scenario(scenario_doc())
    assert sc.radius_m == 60.0
    assert sc.schemes == ("proposed",)
    assert sc.methods == ("simplified", "exact", "mc")
    assert sc.trials == 4000
    assert sc.plan is None


def test_parse_defaults_applied():
    doc = scenario_doc()
    del doc["trials"], doc["seed"], doc["fading"], doc["schemes"], doc["methods"]
    sc = parse_scenario(doc)
    assert sc.trials == 100_000
    assert sc.seed == 0
    assert sc.fading.m == 2.0
    assert len(sc.schemes) == 4


def test_parse_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown keys"):
        parse_scenario(scenario_doc(extra_knob=1))
    with pytest.raises(ConfigError, match="budget"):
        doc = scenario_doc()
        doc["budget"]["antenna_count"] = 4
        parse_scenario(doc)


def test_parse_rejects_missing_required():
    doc = scenario_doc()
    del doc["targets"]
    with pytest.raises(ConfigError, match="targets"):
        parse_scenario(doc)


def test_parse_rejects_bad_scheme_and_method():
    with pytest.raises(ConfigError, match="scheme"):
        parse_scenario(scenario_doc(schemes=["closest"]))
    with pytest.raises(ConfigError, match="single-carrier"):
        parse_scenario(scenario_doc(methods=["threshold"]))
    with pytest.raises(ConfigError, match="at least one"):
        parse_scenario(scenario_doc(methods=[]))


def test_parse_sweep_validation():
    with pytest.raises(ConfigError, match="increasing"):
        parse_scenario(scenario_doc(sweep={"variable": "k", "grid": [0.05, 0.03]}))
    with pytest.raises(ConfigError, match="nonempty"):
        parse_scenario(scenario_doc(sweep={"variable": "k", "grid": []}))
    with pytest.raises(ConfigError, match="unknown variable"):
        parse_scenario(scenario_doc(sweep={"variable": "bandwidth", "grid": [1]}))
    with pytest.raises(ConfigError, match="subcarriers block"):
        parse_scenario(scenario_doc(sweep={"variable": "N_subcarriers",
                                           "grid": [1, 2]}))


def test_parse_multicarrier_constraints():
    sub = {"frequencies_hz": [0.85e12, 0.9e12], "absorption_per_m": [0.0357, 0.04]}
    doc = scenario_doc(subcarriers=sub, methods=["threshold", "mgf"],
                       sweep={"variable": "N_subcarriers", "grid": [1, 2]})
    sc = parse_scenario(doc)
    assert sc.plan.count == 2
    with pytest.raises(ConfigError, match="integers"):
        parse_scenario(scenario_doc(subcarriers=sub, methods=["threshold"],
                                    sweep={"variable": "N_subcarriers",
                                           "grid": [1, 2.5]}))
    with pytest.raises(ConfigError, match="conflicts"):
        parse_scenario(scenario_doc(subcarriers=sub, methods=["threshold"],
                                    sweep={"variable": "k", "grid": [0.01, 0.02]}))
    with pytest.raises(ConfigError, match="multi-carrier"):
        parse_scenario(scenario_doc(subcarriers=sub, methods=["simplified"]))


def test_parse_rejects_bad_trials():
    with pytest.raises(ConfigError, match="trials"):
        parse_scenario(scenario_doc(trials=0))


def test_presets_load():
    fig2 = load_preset("fig2")
    assert fig2.sweep_var == "k"
    assert len(fig2.sweep_grid) == 10
    assert fig2.methods == ("simplified", "exact", "mc")
    fig3 = load_preset("fig3")
    assert fig3.sweep_var == "a1"
    assert fig3.schemes == ("proposed",)
    fig4 = load_preset("fig4")
    assert fig4.sweep_var == "N_subcarriers"
    assert fig4.plan.count == 6
    assert fig4.methods == ("threshold", "mgf", "mc")
    with pytest.raises(ConfigError, match="unknown preset"):
        load_preset("fig9")


# ---------------------------------------------------------------------------
# sweep evaluation and CSV rendering
# ---------------------------------------------------------------------------

def test_single_point_row_grid():
    sc = parse_scenario(scenario_doc(trials=500,
                                     schemes=["random", "proposed"]))
    rows, flagged = run_sweep(sc)
    assert not flagged
    # schemes x users x modes x methods, in fixed nesting order
    assert len(rows) == 2 * 2 * 2 * 3
    assert [r.scheme for r in rows[:12]] == ["random"] * 12
    assert [r.user for r in rows[:6]] == ["near"] * 6
    assert rows[0].mode == "noma" and rows[3].mode == "oma"
    assert [r.method for r in rows[:3]] == ["simplified", "exact", "mc"]
    for row in rows:
        assert 0.0 <= row.estimate <= 1.0
        assert row.status == "ok"
        assert (row.stderr is not None) == (row.method == "mc")


def test_csv_header_and_float_repr():
    rows = [SweepRow("k", 0.05, "proposed", "near", "noma", "simplified",
                     0.9612490793501746, None, "ok")]
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "sweep_var,sweep_value,scheme,user,mode,method,estimate,stderr,status"
    assert lines[1] == "k,0.05,proposed,near,noma,simplified,0.9612490793501746,,ok"


def test_sweep_bytes_stable_across_jobs():
    doc = scenario_doc(trials=2000,
                       sweep={"variable": "a1", "grid": [0.2, 0.3]})
    sc = parse_scenario(doc)
    seq1 = rows_to_csv(run_sweep(sc, jobs=1)[0])
    seq2 = rows_to_csv(run_sweep(sc, jobs=1)[0])
    par = rows_to_csv(run_sweep(sc, jobs=2)[0])
    assert seq1 == seq2
    assert seq1 == par


def test_sweep_values_change_along_grid():
    # random pairing keeps the distance law fixed while k squeezes the
    # certain-outage distance, so the outage must climb along the grid
    doc = scenario_doc(trials=500, methods=["simplified"], schemes=["random"],
                       sweep={"variable": "k", "grid": [0.01, 0.05, 0.1]})
    rows, _ = run_sweep(parse_scenario(doc))
    near_noma = [r.estimate for r in rows if r.user == "near" and r.mode == "noma"]
    assert len(near_noma) == 3
    assert near_noma[0] < near_noma[1] < near_noma[2]


def test_validate_scenario_passes_reference_point():
    sc = parse_scenario(scenario_doc(trials=4000))
    results = validate_scenario(sc)
    names = {r.name for r in results}
    assert {"simplified-vs-mc", "exact-vs-mc", "simplified-vs-exact",
            "numeric-status"} == names
    assert all(r.passed for r in results)


def test_validate_scenario_fails_on_zero_tolerance():
    doc = scenario_doc(trials=2000, validation={"analytic_mc_tol": 0.0})
    results = validate_scenario(parse_scenario(doc))
    failed = {r.name for r in results if not r.passed}
    assert "simplified-vs-mc" in failed


# ---------------------------------------------------------------------------
# subcommands and exit codes
# ---------------------------------------------------------------------------

def test_exit_code_invalid_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["outage", "--config", str(path)]) == 3
    assert "configuration error" in capsys.readouterr().err


def test_exit_code_unknown_key(tmp_path, capsys):
    path = write_config(tmp_path, scenario_doc(extra=1))
    assert main(["outage", "--config", str(path)]) == 3


def test_exit_code_config_and_preset_conflict(tmp_path):
    path = write_config(tmp_path, scenario_doc())
    assert main(["outage", "--config", path, "--preset", "fig2"]) == 3


def test_exit_code_bad_trials_override(tmp_path):
    path = write_config(tmp_path, scenario_doc())
    assert main(["outage", "--config", path, "--trials", "0"]) == 3


def test_outage_rejects_sweep_scenario(capsys):
    assert main(["outage", "--preset", "fig2"]) == 3
    assert "single point" in capsys.readouterr().err


def test_outage_prints_cells(tmp_path, capsys):
    path = write_config(tmp_path, scenario_doc(trials=500,
                                               methods=["simplified"]))
    out = tmp_path / "rows.csv"
    assert main(["outage", "--config", path, "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "proposed near noma" in text
    assert out.read_text().startswith("sweep_var,")


def test_sweep_requires_grid(tmp_path, capsys):
    path = write_config(tmp_path, scenario_doc())
    assert main(["sweep", "--config", path]) == 3


def test_sweep_writes_csv(tmp_path):
    doc = scenario_doc(trials=500, methods=["simplified"],
                       sweep={"variable": "tau1", "grid": [1.0, 3.0]})
    path = write_config(tmp_path, doc)
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", path, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 2 * 1 * 2 * 2 * 1  # header + grid*scheme*user*mode*method
    assert lines[1].startswith("tau1,1.0,proposed,near,noma,simplified,")


def test_validate_exit_codes(tmp_path, capsys):
    ok = write_config(tmp_path, scenario_doc(trials=4000))
    assert main(["validate", "--config", ok]) == 0
    assert "all checks passed" in capsys.readouterr().out
    bad = write_config(tmp_path, scenario_doc(
        trials=2000, validation={"analytic_mc_tol": 0.0}), name="bad.json")
    assert main(["validate", "--config", bad]) == 2


def test_validate_writes_json_report(tmp_path):
    path = write_config(tmp_path, scenario_doc(trials=2000))
    out = tmp_path / "report.json"
    assert main(["validate", "--config", path, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert {entry["name"] for entry in payload} >= {"simplified-vs-mc",
                                                    "numeric-status"}
    assert all(entry["passed"] for entry in payload)


def test_flagged_rows_exit_four(tmp_path, monkeypatch, capsys):
    flagged_row = SweepRow("none", None, "proposed", "near", "noma",
                           "simplified", 0.5, None, "flagged")
    monkeypatch.setattr(cli, "run_sweep", lambda sc, jobs=1: ([flagged_row], True))
    path = write_config(tmp_path, scenario_doc(trials=500,
                                               methods=["simplified"]))
    assert main(["outage", "--config", path]) == 4


def test_validate_distinguishes_flags_from_failures(monkeypatch, tmp_path):
    # identical estimates but flagged status: only numeric-status fails
    rows = [
        SweepRow("none", None, "proposed", "near", "noma", "simplified",
                 0.5, None, "flagged"),
        SweepRow("none", None, "proposed", "near", "noma", "exact",
                 0.5, None, "ok"),
        SweepRow("none", None, "proposed", "near", "noma", "mc",
                 0.5, 0.001, "ok"),
    ]
    monkeypatch.setattr(cli, "run_sweep", lambda sc, jobs=1: (rows, True))
    path = write_config(tmp_path, scenario_doc(trials=500))
    assert main(["validate", "--config", path]) == 4


def test_mc_prints_confidence_interval(tmp_path, capsys):
    path = write_config(tmp_path, scenario_doc(trials=2000))
    assert main(["mc", "--config", path]) == 0
    assert "99% CI" in capsys.readouterr().out


def test_mc_requires_mc_method(tmp_path):
    path = write_config(tmp_path, scenario_doc(methods=["simplified"]))
    assert main(["mc", "--config", path]) == 3


# ---------------------------------------------------------------------------
# absorb subcommand
# ---------------------------------------------------------------------------

def test_absorb_frozen_coefficient(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["absorb", "--freq", "0.85e12", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "frequency_hz,absorption_per_m"
    freq, k = lines[1].split(",")
    assert float(freq) == 0.85e12
    assert float(k) == pytest.approx(0.03580713695057799, rel=1e-12)


def test_absorb_deduplicates_frequencies(tmp_path):
    out = tmp_path / "k.csv"
    with pytest.warns(UserWarning, match="duplicate"):
        code = main(["absorb", "--freq", "1e12,1e12", "--out", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 2


def test_absorb_empty_grid(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["absorb", "--freq", "", "--out", str(out)]) == 0
    assert out.read_text() == "frequency_hz,absorption_per_m\n"


def test_absorb_defaults_to_scenario_carrier(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["absorb", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert float(lines[1].split(",")[0]) == 1.0e12


def test_absorb_bad_frequency_token(capsys):
    assert main(["absorb", "--freq", "fast"]) == 3


def test_absorb_bad_catalog(tmp_path):
    path = tmp_path / "cat.csv"
    path.write_text("wrong,header\n")
    assert main(["absorb", "--catalog", str(path), "--freq", "1e12"]) == 3


# ---------------------------------------------------------------------------
# thresholds subcommand
# ---------------------------------------------------------------------------

def test_thresholds_single_carrier(capsys):
    assert main(["thresholds"]) == 0
    text = capsys.readouterr().out
    assert "near_max=13.5666" in text
    assert "far_min=5.5571" in text


def test_thresholds_multicarrier(tmp_path, capsys):
    out = tmp_path / "thr.csv"
    assert main(["thresholds", "--preset", "fig4", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert "combined wideband pair" in text
    assert "near_max=11.3433" in text
    assert "far_min=7.7830" in text
    lines = out.read_text().splitlines()
    assert lines[0] == "scope,absorption_per_m,near_max_m,far_min_m"
    assert len(lines) == 1 + 6 + 1  # header, six subcarriers, combined row
