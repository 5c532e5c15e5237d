"""Shared fixtures. The shipped scenarios are expensive (minutes each), so
they run once per session and every test reads the same run directories."""

import json
import time

import pytest

from edgesync.runner import load_scenario, run_robustness, run_scenario, scenario_from_dict


def _control_config(cfg):
    doc = cfg.to_dict()
    doc["name"] = f"{cfg.name}_control"
    doc["dissipation"]["sites"] = doc["dissipation"].pop("preset") or doc["dissipation"]["sites"]
    doc["dissipation"]["gamma"] = 0.0
    return scenario_from_dict(doc)


class ScenarioRun:
    def __init__(self, cfg, path, elapsed):
        self.cfg = cfg
        self.path = path
        self.elapsed = elapsed
        self.metrics = json.loads((path / "metrics.json").read_text(encoding="utf-8"))

    @property
    def liouvillian(self):
        p = self.path / "liouvillian.json"
        return json.loads(p.read_text(encoding="utf-8")) if p.exists() else None


def _run(cfg, tmp, **kw):
    t0 = time.time()
    out = run_scenario(cfg, tmp, **kw)
    return ScenarioRun(cfg, out, time.time() - t0)


@pytest.fixture(scope="session")
def fig1_run(tmp_path_factory):
    return _run(load_scenario("fig1"), tmp_path_factory.mktemp("fig1"))


@pytest.fixture(scope="session")
def fig1_control_run(tmp_path_factory):
    cfg = _control_config(load_scenario("fig1"))
    return _run(cfg, tmp_path_factory.mktemp("fig1_ctl"), skip_liouvillian=True)


@pytest.fixture(scope="session")
def fig2_run(tmp_path_factory):
    return _run(load_scenario("fig2"), tmp_path_factory.mktemp("fig2"))


@pytest.fixture(scope="session")
def fig2_control_run(tmp_path_factory):
    cfg = _control_config(load_scenario("fig2"))
    return _run(cfg, tmp_path_factory.mktemp("fig2_ctl"), skip_liouvillian=True)


@pytest.fixture(scope="session")
def fig3_run(tmp_path_factory):
    return _run(load_scenario("fig3"), tmp_path_factory.mktemp("fig3"))


@pytest.fixture(scope="session")
def fig3_control_run(tmp_path_factory):
    cfg = _control_config(load_scenario("fig3"))
    return _run(cfg, tmp_path_factory.mktemp("fig3_ctl"), skip_liouvillian=True)


@pytest.fixture(scope="session")
def robustness_run(tmp_path_factory):
    out = run_robustness(load_scenario("fig3"), tmp_path_factory.mktemp("fig5"))
    return json.loads((out / "robustness.json").read_text(encoding="utf-8"))


def _run_shipped_sweep(name, tmp_path_factory, workers=2):
    from edgesync.cli import _load_sweep_doc
    from edgesync.runner import SweepConfig, run_sweep

    cfg = SweepConfig.from_dict(_load_sweep_doc(name))
    out = run_sweep(cfg, tmp_path_factory.mktemp(name), workers=workers)
    rows = []
    with open(out / "sweep.csv", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            vals = line.strip().split(",")
            row = dict(zip(header, (float(v) for v in vals)))
            row["l"] = int(row["l"])
            rows.append(row)
    fits_path = out / "fits.json"
    fits_doc = json.loads(fits_path.read_text(encoding="utf-8")) if fits_path.exists() else {}
    return {"rows": rows, "out": out, **fits_doc}


@pytest.fixture(scope="session")
def rates_sweep(tmp_path_factory):
    return _run_shipped_sweep("fig4_rates", tmp_path_factory)


@pytest.fixture(scope="session")
def relax_sweep(tmp_path_factory):
    return _run_shipped_sweep("fig4_relax", tmp_path_factory)


@pytest.fixture(scope="session")
def ampfreq_sweep(tmp_path_factory):
    return _run_shipped_sweep("fig4_ampfreq", tmp_path_factory)["rows"]


@pytest.fixture(scope="session")
def bulk_crossover():
    """detect_crossover inputs for the bulk-dissipation setting at desk scale."""
    from edgesync.dynamics import DissipationSpec, resolve_site_preset
    from edgesync.fits import detect_crossover
    from edgesync.lattice import ModelSpec, build_hamiltonian
    from edgesync.liouvillian import build_superoperator, spectrum_and_classify
    from edgesync.runner import theory_frequency
    from edgesync.spectral import eigensystem, identify_edge_states

    def rates(l, gamma):
        N = 4 * l + 1
        spec = ModelSpec(variant="FourBand", N=N, g1=1.0, g2=0.7)
        h = build_hamiltonian(spec)
        es = eigensystem(h)
        edges = identify_edge_states(es)
        d = DissipationSpec(jump_type="Dephasing",
                            sites=resolve_site_preset("BulkHalf", N), gamma=gamma)
        sop = build_superoperator(h, d)
        return spectrum_and_classify(sop, es, edges.protected_indices,
                                     theory_frequency(spec)).r_relax

    grids = {0.002: range(3, 10), 0.006: range(3, 10), 0.038: range(3, 13)}
    out = {}
    for gamma, ls in grids.items():
        ls = list(ls)
        out[gamma] = detect_crossover(ls, [rates(l, gamma) for l in ls])
    return out


@pytest.fixture(scope="session")
def fourband_rates_grid():
    """LiouvillianReports for the four-band chain, integer l = 3..9, gamma in {1,2,3}."""
    from edgesync.dynamics import DissipationSpec, resolve_site_preset
    from edgesync.lattice import ModelSpec, build_hamiltonian
    from edgesync.liouvillian import build_superoperator, spectrum_and_classify
    from edgesync.runner import theory_frequency
    from edgesync.spectral import eigensystem, identify_edge_states

    grid = {}
    for l in range(3, 10):
        N = 4 * l + 1
        spec = ModelSpec(variant="FourBand", N=N, g1=1.0, g2=0.7)
        h = build_hamiltonian(spec)
        es = eigensystem(h)
        edges = identify_edge_states(es)
        for gamma in (1.0, 2.0, 3.0):
            d = DissipationSpec(jump_type="Dephasing",
                                sites=resolve_site_preset("CenterFive", N), gamma=gamma)
            sop = build_superoperator(h, d)
            grid[(l, gamma)] = spectrum_and_classify(
                sop, es, edges.protected_indices, theory_frequency(spec))
    return grid
