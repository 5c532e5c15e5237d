"""Panel rendering against synthetic, contract-conformant inputs."""

import json

import numpy as np
import pytest

from figplots import PanelSpec, render
from figplots.cli import main as cli_main


def make_run_dir(tmp_path, name="run", gamma=2.0):
    run = tmp_path / name
    run.mkdir()
    t = 0.05 * np.arange(400)
    n1 = 0.5 + 0.1 * np.cos(2.44 * t)
    nN = 0.5 + 0.05 * np.cos(2.44 * t)
    with open(run / "timeseries.csv", "w") as fh:
        fh.write("t,n_1,n_N\n")
        for row in zip(t, n1, nN):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    with open(run / "pearson_n_1_n_N.csv", "w") as fh:
        fh.write("t,r\n")
        for ti in t[:300]:
            fh.write(f"{float(ti)!r},{float(1 - np.exp(-ti))!r}\n")
    (run / "metrics.json").write_text(json.dumps({"scenario": name, "omega_theory": 2.44}))
    return run


def make_sweep_dir(tmp_path):
    sweep = tmp_path / "sweep"
    sweep.mkdir()
    ls = np.arange(3, 10)
    with open(sweep / "sweep.csv", "w") as fh:
        fh.write("l,N,gamma,r_decay,r_relax,omega_sync\n")
        for gamma in (1.0, 2.0):
            for l in ls:
                fh.write(f"{l},{4 * l + 1},{gamma},{float(0.5 * 0.49**l)!r},"
                         f"{float(0.3 / l**2)!r},2.44\n")
    fits = {
        "sweep": "synthetic",
        "task": "rates",
        "theory": {"omega": 2.4413, "amplitude": 0.13005},
        "fits": {
            "exponential:r_decay": {
                "gamma=1": {"model": "a+b*c^l", "params": {"a": 0.0, "b": 0.5, "c": 0.49},
                            "points": {"l": ls.tolist()}},
            },
            "powerlaw:r_relax": {
                "gamma=1": {"model": "a+b/(l+c)^d",
                            "params": {"a": 0.0, "b": 0.3, "c": 0.0, "d": 2.0},
                            "points": {"l": ls.tolist()}},
            },
        },
    }
    (sweep / "fits.json").write_text(json.dumps(fits))
    return sweep


def test_timeseries_panel(tmp_path):
    run = make_run_dir(tmp_path)
    ctl = make_run_dir(tmp_path, "control", gamma=0.0)
    out = render(PanelSpec(kind="timeseries", inputs=(str(run), str(ctl)),
                           out=str(tmp_path / "ts.png"), channels=("n_1", "n_N")))
    assert out.exists() and out.stat().st_size > 0


def test_timeseries_requires_channels(tmp_path):
    run = make_run_dir(tmp_path)
    with pytest.raises(ValueError):
        render(PanelSpec(kind="timeseries", inputs=(str(run),),
                         out=str(tmp_path / "x.png")))


def test_pearson_panel(tmp_path):
    run = make_run_dir(tmp_path)
    out = render(PanelSpec(kind="pearson", inputs=(str(run),), out=str(tmp_path / "r.png")))
    assert out.exists()


def test_spectrum_panel(tmp_path):
    run = tmp_path / "spec"
    run.mkdir()
    with open(run / "spectrum_vs_phase.csv", "w") as fh:
        fh.write("phi_V,index,energy,is_edge,side\n")
        for phi in np.linspace(-3, 3, 20):
            for idx in range(10):
                edge = 1 if idx in (4, 5) else 0
                side = "Left" if idx == 4 else ("Right" if idx == 5 else "")
                fh.write(f"{float(phi)!r},{idx},{float(idx - 5 + 0.1 * phi)!r},{edge},{side}\n")
    out = render(PanelSpec(kind="spectrum_vs_phase", inputs=(str(run),),
                           out=str(tmp_path / "spec.png")))
    assert out.exists()


def test_scaling_panel_with_fit_and_theory_lines(tmp_path):
    sweep = make_sweep_dir(tmp_path)
    out = render(PanelSpec(kind="scaling", inputs=(str(sweep),),
                           out=str(tmp_path / "scaling.png"), title="rates"))
    assert out.exists() and out.stat().st_size > 0


def test_malformed_csv_names_location(tmp_path):
    run = tmp_path / "bad"
    run.mkdir()
    (run / "timeseries.csv").write_text("t,n_1\n0.0,abc\n")
    with pytest.raises(ValueError) as exc:
        render(PanelSpec(kind="timeseries", inputs=(str(run),),
                         out=str(tmp_path / "x.png"), channels=("n_1",)))
    assert "timeseries.csv:2" in str(exc.value)
    assert "n_1" in str(exc.value)


def test_unknown_kind_and_missing_input(tmp_path):
    with pytest.raises(ValueError):
        PanelSpec(kind="volume", inputs=("x",), out="y.png")
    with pytest.raises(ValueError):
        PanelSpec(kind="pearson", inputs=(str(tmp_path / "nope"),), out="y.png")


def test_cli_roundtrip(tmp_path):
    run = make_run_dir(tmp_path)
    rc = cli_main(["--kind", "pearson", "--in", str(run),
                   "--out", str(tmp_path / "cli.png")])
    assert rc == 0
    assert (tmp_path / "cli.png").exists()
    rc = cli_main(["--kind", "timeseries", "--in", str(run), "--out",
                   str(tmp_path / "cli2.png")])
    assert rc == 2  # empty channel list is a validation error


def test_rendering_is_read_only(tmp_path):
    run = make_run_dir(tmp_path)
    before = sorted((p.name, p.stat().st_size) for p in run.iterdir())
    render(PanelSpec(kind="pearson", inputs=(str(run),), out=str(tmp_path / "ro.png")))
    after = sorted((p.name, p.stat().st_size) for p in run.iterdir())
    assert before == after
