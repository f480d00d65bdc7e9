from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest

from src.app.main import main
from src.app.model_io import aux_to_dict, load_model, save_model
from src.app.reports import SIMULATION_COLUMNS
from src.core.errors import ModelValidationError
from src.core.prob import X, Y1, kl_divergence, marginal
from src.regions.positive_rate import AuxChannels


def _rows(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def test_identical_laws_print_the_zero_corner(tmp_path, identical_pair):
    model = tmp_path / "same.json"
    out = tmp_path / "region.csv"
    save_model(identical_pair, model)
    assert main(["region", str(model), "--out", str(out)]) == 0
    assert out.read_text() == "theta1,theta2,unit\n0,0,bits\n"


def test_saved_model_loads_back(tmp_path, example6):
    path = tmp_path / "copy.json"
    save_model(example6, path, notes="copy")
    again = load_model(path)
    assert again.p.allclose(example6.p) and again.p_bar.allclose(example6.p_bar)
    assert again.name == example6.name


def test_two_message_region_writes_matching_csv_json_and_svg(tmp_path, models_dir):
    out, js, svg = tmp_path / "r.csv", tmp_path / "r.json", tmp_path / "r.svg"
    code = main(
        [
            "region",
            str(models_dir / "product_tradeoff.json"),
            "--mode",
            "concurrent",
            "--w1",
            "2",
            "--grid-step",
            "0.01",
            "--out",
            str(out),
            "--json",
            str(js),
            "--svg",
            str(svg),
        ]
    )
    assert code == 0
    rows = _rows(out.read_text())
    payload = json.loads(js.read_text())
    assert len(rows) >= 5
    assert payload["unit"] == "bits" and payload["is_rectangle"] is False
    assert [[float(row["theta1"]), float(row["theta2"])] for row in rows] == payload["points"]
    assert [row["theta1"] for row in rows] == sorted((row["theta1"] for row in rows), key=float)
    assert svg.read_text().startswith("<svg")


def test_high_rate_region_in_nats(tmp_path, example6, models_dir):
    out = tmp_path / "high.csv"
    code = main(
        ["region", str(models_dir / "example6.json"), "--regime", "high-rate", "--nats", "--out", str(out)]
    )
    assert code == 0
    (row,) = _rows(out.read_text())
    expected = kl_divergence(marginal(example6.p, (X, Y1)), marginal(example6.p_bar, (X, Y1)))
    assert float(row["theta1"]) == expected
    assert row["unit"] == "nats"


def test_benefit_reports_markov_degeneracy(tmp_path, models_dir):
    out = tmp_path / "benefit.json"
    assert main(["benefit", str(models_dir / "markov_x_y2_y1.json"), "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["benefit"] < 1e-7
    assert payload["degenerate_structure"]["cooperation_useless"] is True
    assert payload["theta2_coop"] == pytest.approx(payload["theta2_nocoop"], abs=1e-7)


def test_high_rate_benefit_is_positive_for_a_generic_pair(capsys, models_dir):
    assert main(["benefit", str(models_dir / "example6.json"), "--regime", "high-rate"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["benefit"] > 0.0
    assert payload["theta2_coop"] - payload["theta2_nocoop"] == pytest.approx(payload["benefit"], abs=1e-10)


def test_exact_simulation_rows(tmp_path, models_dir):
    out = tmp_path / "sim.csv"
    code = main(
        ["simulate", str(models_dir / "example6.json"), "--n", "4,6", "--exact", "--out", str(out)]
    )
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0] == ",".join(SIMULATION_COLUMNS)
    rows = _rows(text)
    assert [row["n"] for row in rows] == ["4", "6"]
    for row in rows:
        assert row["method"] == "exact"
        assert row["ci95_beta2"] == "0"


def test_sweep_adds_limit_columns(tmp_path, models_dir):
    out = tmp_path / "sweep.csv"
    code = main(["simulate", str(models_dir / "example6.json"), "--n", "4,8", "--out", str(out)])
    assert code == 0
    rows = _rows(out.read_text())
    assert len(rows) == 2
    assert rows[0]["theta2_limit"] == rows[1]["theta2_limit"]


def test_monte_carlo_simulation_is_reproducible(tmp_path, models_dir):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        args = ["simulate", str(models_dir / "example6.json"), "--n", "10", "--mc"]
        args += ["--trials", "2000", "--seed", "7", "--out", str(out)]
        assert main(args) == 0
        outputs.append(out.read_text())
    assert outputs[0] == outputs[1]
    assert _rows(outputs[0])[0]["method"] == "monte_carlo"


def test_random_coding_simulation_from_aux_file(tmp_path, models_dir):
    aux = AuxChannels.from_rows(np.eye(2), np.ones((4, 1)), 2)
    aux_path = tmp_path / "aux.json"
    aux_path.write_text(json.dumps(aux_to_dict(aux)))
    out = tmp_path / "rc.csv"
    args = ["simulate", str(models_dir / "example6.json"), "--aux", str(aux_path), "--n", "6"]
    args += ["--r1", "0.3", "--nats", "--trials", "512", "--out", str(out)]
    assert main(args) == 0
    (row,) = _rows(out.read_text())
    assert row["method"] == "monte_carlo"


def test_concurrent_random_coding_default_radius_keeps_sensor_matches_apart(tmp_path, models_dir, capsys):
    aux = AuxChannels.from_rows(np.eye(2), np.ones((4, 1)), 2, np.eye(2))
    aux_path = tmp_path / "aux.json"
    aux_path.write_text(json.dumps(aux_to_dict(aux)))
    args = ["simulate", str(models_dir / "example6.json"), "--aux", str(aux_path), "--n", "4"]
    args += ["--mode", "concurrent", "--trials", "256"]
    assert main(args + ["--out", str(tmp_path / "rc.csv")]) == 0
    assert main(args + ["--mu", "0.2"]) == 3
    assert "must not intersect" in capsys.readouterr().err


def test_missing_support_exits_with_precondition_code(tmp_path, capsys):
    model = tmp_path / "holed.json"
    p = [0.125] * 8
    p_bar = [0.25, 0.0, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]
    model.write_text(json.dumps({"alphabet_sizes": {"x": 2, "y1": 2, "y2": 2}, "p": p, "p_bar": p_bar}))
    assert main(["region", str(model)]) == 3
    assert "error:" in capsys.readouterr().err


def test_malformed_models_exit_with_validation_code(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["region", str(broken)]) == 2
    negative = tmp_path / "negative.json"
    p = [0.25, -0.125, 0.125, 0.125, 0.125, 0.125, 0.25, 0.125]
    negative.write_text(json.dumps({"alphabet_sizes": {"x": 2, "y1": 2, "y2": 2}, "p": p, "p_bar": [0.125] * 8}))
    assert main(["region", str(negative)]) == 2
    assert main(["region", str(tmp_path / "absent.json")]) == 2
    with pytest.raises(ModelValidationError):
        load_model(tmp_path / "absent.json")


def test_over_budget_exact_run_exits_with_budget_code(models_dir):
    args = ["simulate", str(models_dir / "example1.json"), "--n", "40", "--exact"]
    assert main(args) == 5


def test_independence_region_from_the_cli(tmp_path, models_dir):
    out, js = tmp_path / "ind.csv", tmp_path / "ind.json"
    args = ["region", str(models_dir / "example1.json"), "--regime", "positive-rate", "--r1", "0.4"]
    args += ["--lambda-points", "3", "--restarts", "2", "--sweeps", "3", "--out", str(out), "--json", str(js)]
    assert main(args) == 0
    assert len(_rows(out.read_text())) >= 1
    payload = json.loads(js.read_text())
    assert payload["metadata"]["r1"] == pytest.approx(0.4 * np.log(2.0))
    assert all("u_given_x" in witness for witness in payload["witnesses"])
