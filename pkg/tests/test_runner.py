import json

import numpy as np
import pytest

from edgesync.cli import main as cli_main
from edgesync.errors import ConfigurationError
from edgesync.lattice import ModelVariant
from edgesync.runner import (
    SweepConfig,
    cells_to_sites,
    load_scenario,
    run_scenario,
    run_sweep,
    scenario_from_dict,
    theory_amplitude,
    theory_frequency,
)

TINY = {
    "name": "tiny",
    "model": {"variant": "FourBand", "N": 13, "g1": 1.0, "g2": 0.7},
    "dissipation": {"jump_type": "Dephasing", "sites": "CenterFive", "gamma": 1.0},
    "initial_state": {"preset": "OnePlus"},
    "t_max": 10.0,
    "dt": 0.1,
    "channels": ["n_1", "n_N"],
    "metrics": {"pearson_pairs": [["n_1", "n_N", 0.0]], "t_transient": 2.0},
}


def test_shipped_scenarios_parse():
    for name in ("fig1", "fig2", "fig3"):
        cfg = load_scenario(name)
        assert cfg.name == name
        assert cfg.dissipation.sites  # preset expanded and in bounds
        cfg.dissipation.validate_for(cfg.model.N)


def test_unknown_scenario_name():
    with pytest.raises(ConfigurationError):
        load_scenario("fig99")


@pytest.mark.parametrize(
    "patch,field",
    [
        ({"t_max": None}, "t_max"),
        ({"dissipation": {"jump_type": "Dephasing", "gamma": 1.0}}, "sites"),
        ({"channels": ["n_bogus"]}, "channels"),
        ({"initial_state": {"preset": "Nope"}}, "initial_state"),
        ({"dissipation": {"jump_type": "Dephasing", "sites": [99], "gamma": 1.0}}, "sites"),
    ],
)
def test_validation_names_field(patch, field):
    doc = json.loads(json.dumps(TINY))
    doc.update({k: v for k, v in patch.items() if v is not None})
    for k, v in patch.items():
        if v is None:
            doc.pop(k)
    with pytest.raises(ConfigurationError) as exc:
        scenario_from_dict(doc)
    assert field in str(exc.value)


def test_theory_values():
    cfg = load_scenario("fig3")
    assert theory_frequency(cfg.model) == pytest.approx(2.4413111231467406)
    assert theory_amplitude(cfg.model) == pytest.approx(0.13005)
    cfg1 = load_scenario("fig1")
    assert theory_frequency(cfg1.model) == pytest.approx(2.3388031127052997)
    assert theory_amplitude(cfg1.model) is None


def test_cells_to_sites():
    assert cells_to_sites(ModelVariant.DIAGONAL_AAH, 3, 20) == 59
    assert cells_to_sites(ModelVariant.OFF_DIAGONAL_AAH, 4, 20) == 80
    assert cells_to_sites(ModelVariant.FOUR_BAND, 4, 10) == 41


def test_run_scenario_outputs_and_determinism(tmp_path):
    cfg = scenario_from_dict(TINY)
    out1 = run_scenario(cfg, tmp_path / "a")
    out2 = run_scenario(cfg, tmp_path / "b")
    for name in ("timeseries.csv", "metrics.json", "resolved_config.json",
                 "liouvillian.json", "timeseries.meta.json"):
        assert (out1 / name).exists()
    assert (out1 / "timeseries.csv").read_bytes() == (out2 / "timeseries.csv").read_bytes()
    assert (out1 / "resolved_config.json").read_bytes() == (out2 / "resolved_config.json").read_bytes()
    resolved = json.loads((out1 / "resolved_config.json").read_text())
    assert resolved["config"]["dissipation"]["sites"] == [5, 6, 7, 8, 9]
    assert "sha256" in resolved
    doc = json.loads((out1 / "metrics.json").read_text())
    assert doc["invariants"]["trace_drift"] < 1e-9


def test_sweep_rates_and_errors(tmp_path):
    sweep = SweepConfig.from_dict({
        "name": "mini",
        "task": "rates",
        "base": json.loads(json.dumps(TINY)),
        "l_values": [3, 4, 40],  # l=40 -> N=161 exceeds the superoperator cap
        "gamma_values": [1.0],
        "fits": [],
    })
    out = run_sweep(sweep, tmp_path, workers=1)
    rows = (out / "sweep.csv").read_text().strip().split("\n")
    assert rows[0] == "l,N,gamma,r_decay,r_relax,omega_sync"
    assert len(rows) == 3  # header + 2 successful points
    errors = json.loads((out / "sweep_errors.json").read_text())
    assert errors[0]["l"] == 40


def test_sweep_requires_axes():
    with pytest.raises(ConfigurationError):
        SweepConfig.from_dict({"name": "x", "task": "rates", "base": {},
                               "l_values": [], "gamma_values": [1.0]})


def test_cli_spectrum_and_fit(tmp_path):
    rc = cli_main(["spectrum", "--scenario", "fig3", "--out", str(tmp_path / "spec"),
                   "--phase-grid", "5"])
    assert rc == 0
    doc = json.loads((tmp_path / "spec" / "spectrum.json").read_text())
    assert len(doc["energies"]) == 41
    assert len(doc["edge_report"]["states"]) == 4
    assert (tmp_path / "spec" / "spectrum_vs_phase.csv").exists()

    csv = tmp_path / "data.csv"
    l = np.arange(3, 11)
    y = 0.01 + 0.5 * 0.49**l
    with open(csv, "w") as fh:
        fh.write("l,gamma,r_decay\n")
        for li, yi in zip(l, y):
            fh.write(f"{li},1.0,{float(yi)!r}\n")
    rc = cli_main(["fit", "--csv", str(csv), "--y", "r_decay", "--model", "exponential",
                   "--group", "gamma", "--out", str(tmp_path / "fit.json")])
    assert rc == 0
    fit = json.loads((tmp_path / "fit.json").read_text())
    assert fit["gamma=1"]["params"]["c"] == pytest.approx(0.49, abs=1e-5)


def test_cli_exit_codes(tmp_path):
    assert cli_main(["evolve", "--scenario", "fig99", "--out", str(tmp_path)]) == 2
    # superoperator cap refusal without --large
    assert cli_main(["liouvillian", "--scenario", "fig2", "--out", str(tmp_path)]) == 2


def test_dissipative_run_synchronized_control_not(fig3_run, fig3_control_run):
    assert fig3_run.metrics["synchronized"] is True
    assert fig3_control_run.metrics["synchronized"] is False


def test_robustness_baseline_reproduces_fig3(fig3_run, robustness_run, tmp_path):
    # identity perturbation: same rates and sync metrics as the fig3 run
    base = robustness_run["baseline"]["dissipative"]
    assert base["r_tail_min"] == pytest.approx(
        fig3_run.metrics["pearson"]["n_1|n_N"]["tail_min"], abs=1e-12)
    assert base["omega"] == pytest.approx(
        fig3_run.metrics["frequency"]["omega"], abs=1e-12)


def test_cli_evolve_tiny(tmp_path):
    cfg_path = tmp_path / "tiny.json"
    cfg_path.write_text(json.dumps(TINY))
    rc = cli_main(["evolve", "--config", str(cfg_path), "--out", str(tmp_path / "run"),
                   "--skip-liouvillian"])
    assert rc == 0
    assert (tmp_path / "run" / "timeseries.csv").exists()
