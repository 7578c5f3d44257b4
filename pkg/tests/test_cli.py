import json

import numpy as np
import pytest

from symrb.cli import (EXIT_CONFIG, EXIT_OK, EXIT_RESOURCE, ConfigError,
                       load_run_config, main, sweep_svg)
from symrb.svgplot import Series, render_plot


def _write_config(path, **overrides):
    doc = {
        "schema_version": 1,
        "experiment": {
            "example": "single-T",
            "epsilon": 0.0,
            "lengths": list(range(1, 11)),
            "num_sequences": 5,
            "shots": 0,
            "seed": 3,
            "state_ids": ["zplus"],
        },
        "estimation": {"tau": 8},
    }
    for key, value in overrides.items():
        section, _, name = key.partition(".")
        doc[section][name] = value
    path.write_text(json.dumps(doc))
    return path


# ---------------------------------------------------------------------------
# decompose

def test_decompose_table(capsys):
    assert main(["decompose", "--gate", "T", "--copies", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "sum of multiplicities 4" in out
    assert "chi0;e" in out


def test_decompose_rejects_unknown_gate(capsys):
    assert main(["decompose", "--gate", "Q"]) == EXIT_CONFIG
    assert main(["decompose", "--gate", "T", "--copies", "9"]) == EXIT_CONFIG


def test_decompose_json_output(tmp_path, capsys):
    out = tmp_path / "table.json"
    assert main(["decompose", "--gate", "T", "--copies", "2",
                 "--json-out", str(out)]) == EXIT_OK
    table = json.loads(out.read_text())
    assert sum(e["multiplicity"] for e in table) == 11
    assert len(table) == 7


# ---------------------------------------------------------------------------
# config files

def test_config_rejects_unknown_keys(tmp_path):
    cfg = _write_config(tmp_path / "c.json")
    doc = json.loads(cfg.read_text())
    doc["experiment"]["bogus"] = 1
    cfg.write_text(json.dumps(doc))
    with pytest.raises(ConfigError):
        load_run_config(cfg)
    assert main(["simulate", "--config", str(cfg),
                 "--out", str(tmp_path)]) == EXIT_CONFIG


def test_config_length_range_form(tmp_path):
    cfg = _write_config(tmp_path / "c.json",
                        **{"experiment.lengths":
                           {"start": 8, "stop": 32, "step": 8}})
    config, est, _ = load_run_config(cfg)
    assert config.lengths == (8, 16, 24, 32)
    assert est == {"tau": 8}


# ---------------------------------------------------------------------------
# simulate

def test_simulate_row_count_and_determinism(tmp_path):
    cfg = _write_config(tmp_path / "c.json")
    assert main(["simulate", "--config", str(cfg),
                 "--out", str(tmp_path / "a")]) == EXIT_OK
    lines = (tmp_path / "a" / "dataset.csv").read_text().splitlines()
    assert len(lines) == 1 + 10 * 5            # header + lengths x sequences
    assert main(["simulate", "--config", str(cfg),
                 "--out", str(tmp_path / "b")]) == EXIT_OK
    assert (tmp_path / "a" / "dataset.csv").read_bytes() == \
        (tmp_path / "b" / "dataset.csv").read_bytes()


def test_simulate_perfect_gate_all_ones(tmp_path):
    cfg = _write_config(tmp_path / "c.json")
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    rows = (tmp_path / "dataset.csv").read_text().splitlines()[1:]
    assert all(float(r.split(",")[4]) == 1.0 for r in rows)


def test_simulate_resource_limit(tmp_path):
    cfg = _write_config(tmp_path / "c.json",
                        **{"experiment.lengths":
                           {"start": 1, "stop": 1_000_000, "step": 1},
                           "experiment.num_sequences": 10})
    assert main(["simulate", "--config", str(cfg),
                 "--out", str(tmp_path)]) == EXIT_RESOURCE


# ---------------------------------------------------------------------------
# estimate

def _simulated(tmp_path, **overrides):
    cfg = _write_config(tmp_path / "c.json", **overrides)
    assert main(["simulate", "--config", str(cfg),
                 "--out", str(tmp_path)]) == EXIT_OK
    return cfg, tmp_path / "dataset.csv"


def test_estimate_perfect_gate(tmp_path):
    lengths = {"start": 8, "stop": 400, "step": 8}
    cfg, data = _simulated(tmp_path, **{"experiment.lengths": lengths,
                                        "experiment.state_ids": None})
    assert main(["estimate", "--data", str(data), "--config", str(cfg),
                 "--out", str(tmp_path), "--svg"]) == EXIT_OK
    result = json.loads((tmp_path / "result.json").read_text())
    assert abs(result["fidelity"] - 1.0) < 1e-6
    assert abs(result["exact_fidelity"] - 1.0) < 1e-12
    assert set(result) == {"epsilon", "subspace_poles", "sum_lambda",
                           "fidelity", "ci_low", "ci_high", "exact_fidelity",
                           "config_hash"}
    assert len(result["subspace_poles"]) == 4
    svg = (tmp_path / "series.svg").read_text()
    assert svg.startswith("<svg") and result["config_hash"] in svg


def test_estimate_hash_mismatch_and_force(tmp_path):
    lengths = {"start": 8, "stop": 200, "step": 8}
    cfg, data = _simulated(tmp_path, **{"experiment.lengths": lengths,
                                        "experiment.state_ids": None})
    other = _write_config(tmp_path / "other.json",
                          **{"experiment.lengths": lengths,
                             "experiment.state_ids": None,
                             "experiment.seed": 99})
    assert main(["estimate", "--data", str(data), "--config", str(other),
                 "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["estimate", "--data", str(data), "--config", str(other),
                 "--force", "--out", str(tmp_path)]) == EXIT_OK


def test_estimate_missing_dataset(tmp_path):
    assert main(["estimate", "--data", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path)]) == EXIT_CONFIG


def test_estimate_with_bootstrap(tmp_path):
    lengths = {"start": 8, "stop": 400, "step": 8}
    cfg, data = _simulated(tmp_path, **{"experiment.lengths": lengths,
                                        "experiment.epsilon": 0.05,
                                        "experiment.num_sequences": 20,
                                        "experiment.state_ids": None})
    assert main(["estimate", "--data", str(data), "--bootstrap", "20",
                 "--out", str(tmp_path)]) == EXIT_OK
    result = json.loads((tmp_path / "result.json").read_text())
    assert result["ci_low"] is not None
    assert result["ci_low"] <= result["ci_high"]


# ---------------------------------------------------------------------------
# plots

def test_svg_deterministic():
    series = [Series(np.arange(5.0), np.linspace(0, 1, 5), label="a"),
              Series(np.arange(5.0), np.linspace(1, 0, 5), marker=True)]
    a = render_plot(series, title="t", xlabel="x", ylabel="y")
    b = render_plot(series, title="t", xlabel="x", ylabel="y")
    assert a == b
    assert a.startswith("<svg") and a.rstrip().endswith("</svg>")


def test_sweep_svg_contains_series():
    rows = [{"epsilon": e, "estimate": 1 - e, "exact": 1 - e,
             "ci_low": "", "ci_high": "", "config_hash": "x"}
            for e in (0.01, 0.1)]
    svg = sweep_svg(rows, "sweep")
    assert "estimated" in svg and "exact average fidelity" in svg
