"""Figure panels rendered from simulation run directories.

Every panel reads only the documented file contracts of the simulation
CLI (timeseries.csv, pearson_*.csv, metrics.json, spectrum_vs_phase.csv,
sweep.csv, fits.json) and writes one image. Rendering never modifies the
run directories.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PANEL_KINDS = ("timeseries", "pearson", "spectrum_vs_phase", "scaling")


@dataclass(frozen=True)
class PanelSpec:
    kind: str
    inputs: tuple[str, ...]  # run directories or data files, kind-specific
    out: str
    channels: tuple[str, ...] = ()
    title: str = ""
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PANEL_KINDS:
            raise ValueError(f"unknown panel kind {self.kind!r}; choose from {PANEL_KINDS}")
        if not self.inputs:
            raise ValueError("panel needs at least one input path")
        for p in self.inputs:
            if not Path(p).exists():
                raise ValueError(f"input does not exist: {p}")


def read_csv(path, string_columns=()) -> dict[str, np.ndarray]:
    """Parse a headered CSV into named float columns, naming bad cells.

    Columns listed in ``string_columns`` are kept as strings; all others
    must parse as floats (empty cells become NaN).
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        columns = {name: [] for name in header}
        for row_no, line in enumerate(fh, start=2):
            cells = line.strip().split(",")
            if len(cells) != len(header):
                raise ValueError(f"{path}:{row_no}: expected {len(header)} cells, got {len(cells)}")
            for name, cell in zip(header, cells):
                if name in string_columns:
                    columns[name].append(cell)
                    continue
                try:
                    columns[name].append(float(cell) if cell != "" else np.nan)
                except ValueError as exc:
                    raise ValueError(f"{path}:{row_no}: column {name!r}: {exc}") from None
    if not columns or not next(iter(columns.values())):
        raise ValueError(f"{path}: no data rows")
    return {k: np.asarray(v) for k, v in columns.items()}


def _read_metrics(run_dir: Path) -> dict:
    p = Path(run_dir) / "metrics.json"
    return json.loads(p.read_text(encoding="utf-8")) if p.exists() else {}


def _save(fig, out: str) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out


# ---------------------------------------------------------------------------
# Panel kinds
# ---------------------------------------------------------------------------

def _render_timeseries(panel: PanelSpec) -> Path:
    """Observable traces; two stacked axes when a control run is given."""
    runs = [Path(p) for p in panel.inputs]
    if not panel.channels:
        raise ValueError("timeseries panel needs a non-empty channel list")
    fig, axes = plt.subplots(len(runs), 1, figsize=(7, 2.6 * len(runs)), sharex=True, squeeze=False)
    for ax, run in zip(axes[:, 0], runs):
        data = read_csv(run / "timeseries.csv")
        for ch in panel.channels:
            if ch not in data:
                raise ValueError(f"{run}/timeseries.csv has no channel {ch!r}")
            ax.plot(data["t"], data[ch], lw=0.8, label=ch)
        meta = _read_metrics(run)
        gamma = meta.get("scenario", run.name)
        ax.set_ylabel("observables")
        ax.legend(loc="upper right", fontsize=8)
        ax.set_title(str(gamma), fontsize=9)
    axes[-1, 0].set_xlabel("t (1/g)")
    if panel.title:
        fig.suptitle(panel.title)
    return _save(fig, panel.out)


def _render_pearson(panel: PanelSpec) -> Path:
    """Sliding Pearson traces of one or more runs on a common axis."""
    fig, ax = plt.subplots(figsize=(7, 3))
    plotted = 0
    for run in map(Path, panel.inputs):
        traces = sorted(run.glob("pearson_*.csv"))
        if not traces:
            raise ValueError(f"{run}: no pearson_*.csv traces")
        for trace in traces:
            data = read_csv(trace)
            label = f"{run.name}: {trace.stem[len('pearson_'):]}"
            ax.plot(data["t"], data["r"], lw=0.9, label=label)
            plotted += 1
    ax.set_xlabel("t (1/g)")
    ax.set_ylabel("r")
    ax.set_ylim(-1.05, 1.05)
    ax.axhline(1.0, color="k", lw=0.5, ls=":")
    ax.legend(fontsize=8)
    if panel.title:
        ax.set_title(panel.title)
    return _save(fig, panel.out)


def _render_spectrum_vs_phase(panel: PanelSpec) -> Path:
    """Energy spectrum against the swept phase, edge states highlighted."""
    path = Path(panel.inputs[0])
    if path.is_dir():
        path = path / "spectrum_vs_phase.csv"
    data = read_csv(path, string_columns=("side",))
    param_name = [k for k in data if k not in ("index", "energy", "is_edge", "side")][0]
    fig, ax = plt.subplots(figsize=(6, 4))
    bulk = data["is_edge"] == 0
    ax.scatter(data[param_name][bulk], data["energy"][bulk], s=1, c="k", rasterized=True)
    edge = ~bulk
    ax.scatter(data[param_name][edge], data["energy"][edge], s=6, c="crimson")
    ax.set_xlabel(param_name)
    ax.set_ylabel("E/g")
    if panel.title:
        ax.set_title(panel.title)
    return _save(fig, panel.out)


_FIT_MODELS = {
    "a+b*c^l": lambda l, p: p["a"] + p["b"] * p["c"] ** l,
    "a+b/(l+c)^d": lambda l, p: p["a"] + p["b"] / (l + p["c"]) ** p["d"],
}


def _render_scaling(panel: PanelSpec) -> Path:
    """Sweep quantities vs cell number with fit lines and theory dashes.

    Inputs: a sweep directory holding sweep.csv and (optionally) fits.json.
    One subplot per quantity column; fitted models are overlaid as solid
    lines and thermodynamic-limit references as dashed lines.
    """
    sweep_dir = Path(panel.inputs[0])
    data = read_csv(sweep_dir / "sweep.csv")
    fits_doc = {}
    fits_path = sweep_dir / "fits.json"
    if fits_path.exists():
        fits_doc = json.loads(fits_path.read_text(encoding="utf-8"))

    quantities = [c for c in data if c not in ("l", "N", "gamma") and not c.endswith("_err")
                  and not c.endswith("_pt")]
    fig, axes = plt.subplots(1, len(quantities), figsize=(4 * len(quantities), 3.4), squeeze=False)
    gammas = np.unique(data["gamma"])
    theory = fits_doc.get("theory", {})
    for ax, qty in zip(axes[0], quantities):
        for gamma in gammas:
            sel = data["gamma"] == gamma
            ax.plot(data["l"][sel], data[qty][sel], "o", ms=4, label=f"gamma={gamma:g}")
        for key, per_gamma in fits_doc.get("fits", {}).items():
            model_name, ycol = key.split(":")
            if ycol != qty:
                continue
            for gkey, res in per_gamma.items():
                if "params" not in res or res.get("model") not in _FIT_MODELS:
                    continue
                pts = res.get("points", {})
                ls = np.asarray(pts.get("l", data["l"]))
                grid = np.linspace(ls.min(), ls.max(), 200)
                ax.plot(grid, _FIT_MODELS[res["model"]](grid, res["params"]), "-", lw=1)
        ref = theory.get("omega" if qty.startswith("omega") else
                         "amplitude" if qty.startswith("amplitude") else "")
        if ref:
            ax.axhline(ref, color="k", ls="--", lw=1)
        if qty.startswith("r_"):
            ax.set_yscale("log")
        ax.set_xlabel("l (cells)")
        ax.set_ylabel(qty)
        ax.legend(fontsize=7)
    if panel.title:
        fig.suptitle(panel.title)
    return _save(fig, panel.out)


_RENDERERS = {
    "timeseries": _render_timeseries,
    "pearson": _render_pearson,
    "spectrum_vs_phase": _render_spectrum_vs_phase,
    "scaling": _render_scaling,
}


def render(panel: PanelSpec) -> Path:
    """Render one panel to an image file; returns the written path."""
    return _RENDERERS[panel.kind](panel)
