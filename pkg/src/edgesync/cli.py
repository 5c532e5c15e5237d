"""Command-line front end.

Subcommands: spectrum, evolve, liouvillian, sweep, robustness, fit.
Exit codes: 0 success, 2 configuration/validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fits as fits_mod
from .errors import CapabilityError, ConfigurationError, EdgesyncError
from .lattice import ModelSpec, ModelVariant, build_hamiltonian
from .runner import (
    SUPEROP_DIM_CAP,
    ScenarioConfig,
    SweepConfig,
    compute_liouvillian_report,
    load_scenario,
    run_robustness,
    run_scenario,
    run_sweep,
    theory_frequency,
)
from .spectral import eigensystem, identify_edge_states


def _add_scenario_arg(p: argparse.ArgumentParser):
    p.add_argument("--scenario", help="shipped scenario name (fig1, fig2, fig3) or path to a JSON file")
    p.add_argument("--config", help="path to a scenario JSON file (alias of --scenario)")


def _load(args) -> ScenarioConfig:
    target = args.scenario or args.config
    if not target:
        raise ConfigurationError("scenario", "provide --scenario or --config")
    return load_scenario(target, seed_override=getattr(args, "seed", None))


def _cmd_spectrum(args) -> int:
    cfg = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    h = build_hamiltonian(cfg.model)
    es = eigensystem(h)
    report = identify_edge_states(es)
    doc = {
        "model": cfg.model.to_dict(),
        "energies": [float(e) for e in es.energies],
        "edge_report": report.to_dict(),
        "omega_theory": theory_frequency(cfg.model),
    }
    (out / "spectrum.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if args.phase_grid:
        _write_phase_sweep(cfg.model, args.phase_grid, out / "spectrum_vs_phase.csv")
    return 0


def _write_phase_sweep(model: ModelSpec, npoints: int, path: Path) -> None:
    """Energy spectrum versus the variant's sweep parameter.

    Diagonal chain: phi_V over (-pi, pi]; off-diagonal chain: phi_lambda;
    four-band chain: the ratio g2/g1 over (-1.5, 1.5).
    """
    rows = []
    if model.variant is ModelVariant.FOUR_BAND:
        params = np.linspace(-1.5, 1.5, npoints)
        param_name = "g2_over_g1"
    else:
        params = np.linspace(-np.pi, np.pi, npoints, endpoint=True)[1:]
        param_name = "phi_V" if model.variant is ModelVariant.DIAGONAL_AAH else "phi_lambda"
    for p in params:
        patch = model.to_dict()
        if model.variant is ModelVariant.FOUR_BAND:
            patch["g2"] = p * model.g1
        elif model.variant is ModelVariant.DIAGONAL_AAH:
            patch["phi_V"] = float(p)
        else:
            patch["phi_lambda"] = float(p)
        spec = ModelSpec.from_dict(patch)
        es = eigensystem(build_hamiltonian(spec))
        report = identify_edge_states(es)
        edge_info = {s.index: s for s in report.states}
        for idx, energy in enumerate(es.energies):
            s = edge_info.get(idx)
            rows.append((float(p), idx, float(energy), 1 if s else 0, s.side if s else ""))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{param_name},index,energy,is_edge,side\n")
        for row in rows:
            fh.write(f"{row[0]!r},{row[1]},{row[2]!r},{row[3]},{row[4]}\n")


def _cmd_evolve(args) -> int:
    cfg = _load(args)
    run_scenario(cfg, args.out, large=args.large,
                 skip_liouvillian=args.skip_liouvillian,
                 snapshot_every=args.snapshot_every)
    return 0


def _cmd_liouvillian(args) -> int:
    cfg = _load(args)
    if cfg.model.N**2 > SUPEROP_DIM_CAP and not args.large:
        raise CapabilityError(
            f"superoperator dimension {cfg.model.N**2} exceeds the cap {SUPEROP_DIM_CAP}; "
            "pass --large to enable long runtimes"
        )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    h = build_hamiltonian(cfg.model)
    report, _ = compute_liouvillian_report(cfg, h)
    (out / "liouvillian.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = SweepConfig.from_dict(_load_sweep_doc(args.config))
    run_sweep(cfg, args.out, workers=args.workers, large=args.large)
    return 0


def _load_sweep_doc(target: str) -> dict:
    path = Path(target)
    if not path.exists():
        from importlib.resources import files

        candidate = files("edgesync").joinpath(f"scenarios/{target}.json")
        if not candidate.is_file():
            raise ConfigurationError("config", f"no sweep file or shipped name {target!r}")
        return json.loads(candidate.read_text(encoding="utf-8"))
    return json.loads(path.read_text(encoding="utf-8"))


def _cmd_robustness(args) -> int:
    cfg = load_scenario(args.scenario or "fig3", seed_override=args.seed)
    run_robustness(cfg, args.out, large=args.large)
    return 0


def _cmd_fit(args) -> int:
    data = np.genfromtxt(args.csv, delimiter=",", names=True)
    out_doc = {}
    groups = [None]
    if args.group:
        groups = sorted(set(data[args.group]))
    for gval in groups:
        sel = data if gval is None else data[data[args.group] == gval]
        order = np.argsort(sel[args.x])
        xs = sel[args.x][order]
        ys = sel[args.y][order]
        if args.model == "exponential":
            result = fits_mod.fit_exponential(xs, ys).to_dict()
        elif args.model == "powerlaw":
            result = fits_mod.fit_powerlaw(xs, ys).to_dict()
        elif args.model == "crossover":
            result = fits_mod.detect_crossover(xs, ys).to_dict()
        else:
            raise ConfigurationError("model", f"unknown fit model {args.model!r}")
        key = "all" if gval is None else f"{args.group}={gval:g}"
        out_doc[key] = result
    Path(args.out).write_text(json.dumps(out_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="edgesync",
        description="Dissipation-induced synchronization of topological edge states: "
        "simulate, analyze, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--large", action="store_true",
                       help="allow superoperator dimensions beyond the default cap")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="override random seeds in the config")

    p = sub.add_parser("spectrum", help="eigenvalues and edge-state report")
    _add_scenario_arg(p)
    common(p)
    p.add_argument("--phase-grid", type=int, default=0,
                   help="also sweep the variant's phase parameter on this many points")
    p.set_defaults(func=_cmd_spectrum)

    p = sub.add_parser("evolve", help="run a scenario: time series + metrics")
    _add_scenario_arg(p)
    common(p)
    p.add_argument("--skip-liouvillian", action="store_true")
    p.add_argument("--snapshot-every", type=int, default=None,
                   help="dump full correlation matrices every K samples")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("liouvillian", help="superoperator spectrum and rates")
    _add_scenario_arg(p)
    common(p)
    p.set_defaults(func=_cmd_liouvillian)

    p = sub.add_parser("sweep", help="run an (l, gamma) grid and fits")
    p.add_argument("--config", required=True, help="sweep JSON file or shipped name")
    common(p, seed=False)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("robustness", help="perturbation suite with controls")
    p.add_argument("--scenario", default="fig3")
    common(p)
    p.set_defaults(func=_cmd_robustness)

    p = sub.add_parser("fit", help="fit scaling laws to sweep CSV columns")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", default="l")
    p.add_argument("--y", required=True)
    p.add_argument("--model", required=True, choices=["exponential", "powerlaw", "crossover"])
    p.add_argument("--group", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EdgesyncError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
