"""Size-scaling fits: exponential and shifted-power-law models, plus the
plateau/power-law crossover detector.

Both fitters are deterministic: derivative-free simplex minimization from
a fixed multi-start schedule, each start polished by a restart at its own
optimum. No randomness, no data-dependent iteration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

MAX_ITER = 10_000  # per start
_XATOL = 1e-12
_FATOL = 1e-24


@dataclass(frozen=True)
class FitResult:
    params: dict[str, float]
    residual_norm: float
    converged: bool
    iterations: int
    model: str
    flags: tuple[str, ...] = ()
    residuals: tuple[float, ...] = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "params": dict(self.params),
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "flags": list(self.flags),
            "residuals": list(self.residuals),
        }


def _validate(l_values, y_values, min_points: int):
    l = np.asarray(l_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    if l.ndim != 1 or l.shape != y.shape:
        raise ValueError("l_values and y_values must be 1-d and equal length")
    if len(l) < min_points:
        raise ValueError(f"need >= {min_points} points, got {len(l)}")
    if np.any(np.diff(l) <= 0):
        raise ValueError("l_values must be strictly increasing")
    if not (np.all(np.isfinite(l)) and np.all(np.isfinite(y))):
        raise ValueError("inputs must be finite")
    return l, y


def _is_degenerate(y: np.ndarray) -> bool:
    return float(np.ptp(y)) < 1e-12 * max(1.0, float(np.max(np.abs(y))))


def _simplex(loss, x0: np.ndarray):
    """Two chained Nelder-Mead runs (restart re-expands the simplex)."""
    total = 0
    res = minimize(loss, x0, method="Nelder-Mead",
                   options={"maxiter": MAX_ITER, "xatol": _XATOL, "fatol": _FATOL})
    total += res.nit
    res2 = minimize(loss, res.x, method="Nelder-Mead",
                    options={"maxiter": MAX_ITER, "xatol": _XATOL, "fatol": _FATOL})
    total += res2.nit
    best = res2 if res2.fun <= res.fun else res
    return best.x, float(best.fun), total, bool(res2.success or res.success)


def fit_exponential(l_values, y_values) -> FitResult:
    """Least squares fit of y ~ a + b c^l.

    The geometric factor is seeded from the median successive ratio of
    (y - a0) with a0 = min(y)/2, plus fixed seeds c in {0.25, 0.5, 0.75};
    the best residual over all starts wins.
    """
    l, y = _validate(l_values, y_values, 4)
    if np.any(y <= 0):
        raise ValueError("y_values must be positive")
    if _is_degenerate(y):
        a = float(np.mean(y))
        return FitResult({"a": a, "b": 0.0, "c": 0.5}, 0.0, False, 0,
                         model="a+b*c^l", flags=("degenerate",),
                         residuals=tuple(float(v) for v in (y - a)))

    a0 = float(np.min(y)) / 2.0
    shifted = y - a0
    ratios = shifted[1:] / shifted[:-1]
    steps = np.diff(l)
    ratios = np.abs(ratios) ** (1.0 / steps)  # per-unit-l factor for uneven grids
    c_hat = float(np.clip(np.median(ratios), 1e-3, 0.999))
    seeds = [c_hat, 0.25, 0.5, 0.75]

    def loss(p):
        a, b, c = p
        if c <= 0 or c > 1.5:
            return 1e30
        r = y - (a + b * np.power(c, l))
        return float(r @ r)

    best = None
    for c0 in seeds:
        b0 = shifted[0] / c0 ** l[0]
        x, fun, nit, ok = _simplex(loss, np.array([a0, b0, c0]))
        cand = (fun, x, nit, ok)
        if best is None or fun < best[0]:
            best = cand
    fun, x, nit, ok = best
    a, b, c = (float(v) for v in x)
    resid = y - (a + b * np.power(c, l))
    flags = []
    if abs(b) < 1e-10 * max(1.0, float(np.max(np.abs(y)))):
        flags.append("degenerate")
        ok = False
    return FitResult({"a": a, "b": b, "c": c}, float(np.sqrt(fun)), ok, nit,
                     model="a+b*c^l", flags=tuple(flags),
                     residuals=tuple(float(v) for v in resid))


def fit_powerlaw(l_values, y_values) -> FitResult:
    """Least squares fit of y ~ a + b / (l + c)^d.

    The exponent is seeded from the log-log slope of (y - min(y)/2)
    against l, plus fixed seeds d in {1.5, 2, 3}.
    """
    l, y = _validate(l_values, y_values, 4)
    if np.any(y <= 0):
        raise ValueError("y_values must be positive")
    if _is_degenerate(y):
        a = float(np.mean(y))
        return FitResult({"a": a, "b": 0.0, "c": 0.0, "d": 2.0}, 0.0, False, 0,
                         model="a+b/(l+c)^d", flags=("degenerate",),
                         residuals=tuple(float(v) for v in (y - a)))

    a0 = float(np.min(y)) / 2.0
    shifted = np.maximum(y - a0, 1e-300)
    slope = np.polyfit(np.log(l), np.log(shifted), 1)[0]
    d_hat = float(np.clip(-slope, 0.1, 8.0))
    seeds = [d_hat, 1.5, 2.0, 3.0]

    def loss(p):
        a, b, c, d = p
        if l[0] + c <= 0 or d <= 0 or d > 12:
            return 1e30
        r = y - (a + b / np.power(l + c, d))
        return float(r @ r)

    best = None
    for d0 in seeds:
        b0 = shifted[0] * l[0] ** d0
        x, fun, nit, ok = _simplex(loss, np.array([a0, b0, 0.0, d0]))
        cand = (fun, x, nit, ok)
        if best is None or fun < best[0]:
            best = cand
    fun, x, nit, ok = best
    a, b, c, d = (float(v) for v in x)
    resid = y - (a + b / np.power(l + c, d))
    flags = []
    if abs(b) < 1e-10 * max(1.0, float(np.max(np.abs(y)))):
        flags.append("degenerate")
        ok = False
    return FitResult({"a": a, "b": b, "c": c, "d": d}, float(np.sqrt(fun)), ok, nit,
                     model="a+b/(l+c)^d", flags=tuple(flags),
                     residuals=tuple(float(v) for v in resid))


# ---------------------------------------------------------------------------
# Plateau / power-law crossover
# ---------------------------------------------------------------------------

MIN_TAIL_EXPONENT = 1.0  # below this the "tail" is drift, not a decay branch
TIE_REL_TOL = 0.02


@dataclass(frozen=True)
class CrossoverResult:
    l_c: float
    plateau_value: float
    tail_exponent: float | None
    tail_prefactor: float | None
    flag: str | None  # "no_plateau" / "no_decay_in_range" / None

    def to_dict(self) -> dict:
        return {
            "l_c": self.l_c,
            "plateau_value": self.plateau_value,
            "tail_exponent": self.tail_exponent,
            "tail_prefactor": self.tail_prefactor,
            "flag": self.flag,
        }


def detect_crossover(l_values, y_values) -> CrossoverResult:
    """Segmented fit: constant for l <= l_c, pure power law b l^-d beyond.

    The split minimizes the total squared residual (tail residuals taken
    in raw space from a log-log linear fit); near-ties go to the longest
    plateau. Two degenerate outcomes are flagged: a best split at the
    first point means no plateau ("no_plateau"), and a best tail whose
    fitted exponent stays below MIN_TAIL_EXPONENT means the data never
    leaves the plateau within the sampled range ("no_decay_in_range").
    """
    l, y = _validate(l_values, y_values, 6)
    if np.any(y <= 0):
        raise ValueError("y_values must be positive")
    logl, logy = np.log(l), np.log(y)

    candidates = []  # (ssr, split, tail_coef); plateau = points [0..split]
    for split in range(0, len(l) - 2):  # tail needs >= 2 points
        plateau = y[: split + 1]
        ssr = float(np.sum((plateau - plateau.mean()) ** 2))
        coef = np.polyfit(logl[split + 1:], logy[split + 1:], 1)
        tail_pred = np.exp(np.polyval(coef, logl[split + 1:]))
        ssr += float(np.sum((y[split + 1:] - tail_pred) ** 2))
        candidates.append((ssr, split, coef))

    best_ssr = min(c[0] for c in candidates)
    scale = float(np.sum((y - y.mean()) ** 2)) + 1e-300
    tied = [c for c in candidates
            if c[0] <= best_ssr * (1 + TIE_REL_TOL) + 1e-12 * scale]
    ssr, split, coef = max(tied, key=lambda c: c[1])  # longest plateau among ties

    tail_exponent = float(-coef[0])
    tail_prefactor = float(np.exp(coef[1]))
    if tail_exponent < MIN_TAIL_EXPONENT:
        # the "tail" is a slow drift, not a decay: plateau spans the range
        return CrossoverResult(float(l[-1]), float(np.mean(y)), tail_exponent,
                               tail_prefactor, flag="no_decay_in_range")
    plateau_value = float(np.mean(y[: split + 1]))
    if split == 0:
        return CrossoverResult(float(l[0]), plateau_value, tail_exponent,
                               tail_prefactor, flag="no_plateau")
    return CrossoverResult(float(l[split]), plateau_value, tail_exponent,
                           tail_prefactor, flag=None)
