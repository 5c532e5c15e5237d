"""Synchronization metrics on sampled time series.

Pearson coefficient over a sliding window (the second channel optionally
time-shifted), dominant-frequency extraction by tapered FFT plus a local
sinusoid fit, and steady oscillation amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .dynamics import TimeSeries
from .errors import NoOscillationError

MIN_WINDOW_SAMPLES = 16
PEAK_OVER_MEDIAN = 5.0  # dominance requirement for the spectral peak
MULTIPEAK_FRACTION = 0.05  # secondary local maxima above this power fraction flag multi-mode content


@dataclass(frozen=True)
class MetricConfig:
    """Windowing for the sliding Pearson estimate and steady-state analysis.

    window and tau are in units of 1/g; t_transient is discarded before
    frequency/amplitude extraction.
    """

    window: float
    t_transient: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("window must be > 0")
        if self.t_transient < 0:
            raise ValueError("t_transient must be >= 0")


def sliding_pearson(t: np.ndarray, f: np.ndarray, h: np.ndarray, cfg: MetricConfig) -> TimeSeries:
    """Windowed Pearson coefficient r(t) of f(t') and h(t' + tau), t' in [t, t+window].

    The shifted channel is evaluated by linear interpolation; the output
    grid keeps only those t where both the window and the shift stay
    inside the sampled range. Windows with (numerically) zero variance in
    either channel yield NaN gap markers, never infinities.
    """
    t = np.asarray(t, dtype=float)
    dt = t[1] - t[0]
    nw = int(round(cfg.window / dt))
    if nw + 1 < MIN_WINDOW_SAMPLES:
        raise ValueError(f"window must span >= {MIN_WINDOW_SAMPLES} samples, got {nw + 1}")

    lo = t[0] + max(0.0, -cfg.tau)
    hi = t[-1] - cfg.window - max(0.0, cfg.tau)
    starts = np.nonzero((t >= lo - 1e-12) & (t <= hi + 1e-12))[0]
    if starts.size == 0:
        raise ValueError("window plus shift exceed the sampled range")

    h_shift = np.interp(t + cfg.tau, t, h, left=np.nan, right=np.nan)
    fw = np.lib.stride_tricks.sliding_window_view(f, nw + 1)
    hw = np.lib.stride_tricks.sliding_window_view(h_shift, nw + 1)
    fw = fw[starts]
    hw = hw[starts]

    fm = fw - fw.mean(axis=1, keepdims=True)
    hm = hw - hw.mean(axis=1, keepdims=True)
    cov = np.sum(fm * hm, axis=1)
    var_f = np.sum(fm**2, axis=1)
    var_h = np.sum(hm**2, axis=1)
    denom = np.sqrt(var_f * var_h)
    scale_f = np.max(np.abs(fw), axis=1)
    scale_h = np.max(np.abs(hw), axis=1)
    ok = denom > (1e-14 * (scale_f + 1e-300) * (scale_h + 1e-300)) * (nw + 1)
    r = np.full(len(starts), np.nan)
    r[ok] = cov[ok] / denom[ok]
    return TimeSeries(t=t[starts], channels={"r": r}, metadata={"window": cfg.window, "tau": cfg.tau})


def pearson(ts: TimeSeries, f: str, h: str, cfg: MetricConfig) -> TimeSeries:
    """Sliding Pearson between two named channels of one series."""
    return sliding_pearson(ts.t, ts[f], ts[h], cfg)


def aligned_pearson(
    t: np.ndarray,
    f: np.ndarray,
    h: np.ndarray,
    period: float,
    window: float,
    tail_start: float,
    n_shifts: int = 32,
) -> dict:
    """Sliding Pearson maximized over a one-period grid of time shifts.

    Phase-locked oscillation with a constant (possibly nonzero) phase
    offset scores ~1 at the aligning shift; signals whose relative phase
    wanders score below 1 for every shift. Returns the best shift and the
    tail statistics at that shift (tail = samples with t >= tail_start).
    """
    best = None
    for k in range(n_shifts):
        tau = k * period / n_shifts
        r_ts = sliding_pearson(t, f, h, MetricConfig(window=window, tau=tau))
        tail = r_ts.t >= tail_start - 1e-9
        r_tail = r_ts["r"][tail]
        r_tail = r_tail[np.isfinite(r_tail)]
        if r_tail.size == 0:
            continue
        stats = {"tau": tau, "tail_min": float(np.min(r_tail)), "tail_mean": float(np.mean(r_tail))}
        if best is None or stats["tail_min"] > best["tail_min"]:
            best = stats
    if best is None:
        raise ValueError("no full window fits in the tail span")
    return best


# ---------------------------------------------------------------------------
# Frequency and amplitude
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencyEstimate:
    omega: float
    uncertainty: float
    amplitude: float
    offset: float
    phase: float
    multipeak: bool
    n_periods: float


@dataclass(frozen=True)
class AmplitudeEstimate:
    amplitude: float  # primary: the fitted sinusoid amplitude |b|
    peak_to_trough: float  # half the mean peak-minus-trough excursion, last 5 periods
    omega: float


def _post_transient(t: np.ndarray, f: np.ndarray, cfg: MetricConfig):
    mask = t >= cfg.t_transient - 1e-12
    if np.count_nonzero(mask) < MIN_WINDOW_SAMPLES:
        raise NoOscillationError("post-transient segment too short")
    return t[mask], f[mask]


def _spectral_peak(ts: np.ndarray, fs: np.ndarray):
    """Hann-tapered FFT peak: (omega, amplitude, phase, multipeak flag)."""
    n = len(fs)
    dt = ts[1] - ts[0]
    detrended = fs - fs.mean()
    taper = np.hanning(n)
    spec = np.fft.rfft(detrended * taper)
    freqs = 2 * np.pi * np.fft.rfftfreq(n, d=dt)
    power = np.abs(spec) ** 2
    power[0] = 0.0
    k = int(np.argmax(power))
    if k == 0 or power[k] <= 0:
        raise NoOscillationError("no spectral peak")
    median = float(np.median(power[1:]))
    if median > 0 and power[k] < PEAK_OVER_MEDIAN * median:
        raise NoOscillationError(
            f"dominant peak only {power[k] / median:.2f}x the spectral median"
        )
    if median == 0 and power[k] == 0:
        raise NoOscillationError("flat spectrum")

    # secondary local maxima well separated from the main lobe
    multipeak = False
    for i in range(1, len(power) - 1):
        if abs(i - k) <= 3:
            continue
        if power[i] >= power[i - 1] and power[i] >= power[i + 1]:
            if power[i] > MULTIPEAK_FRACTION * power[k]:
                multipeak = True
                break
    amp = 2.0 * np.abs(spec[k]) / np.sum(taper)
    phase = float(np.angle(spec[k] * np.exp(-1j * freqs[k] * ts[0])))
    return float(freqs[k]), float(amp), phase, multipeak


def extract_frequency(t: np.ndarray, f: np.ndarray, cfg: MetricConfig) -> FrequencyEstimate:
    """Dominant oscillation frequency of the post-transient segment.

    An FFT of the mean-subtracted, Hann-tapered segment seeds a least
    squares fit of a + b cos(omega t + phi0); the fit refines omega and
    provides its standard error. Raises NoOscillationError when no peak
    exceeds 5x the spectral median.
    """
    ts_seg, fs_seg = _post_transient(np.asarray(t), np.asarray(f), cfg)
    omega0, amp0, phase0, multipeak = _spectral_peak(ts_seg, fs_seg)

    def model(tt, a, b, w, p):
        return a + b * np.cos(w * tt + p)

    p0 = [float(fs_seg.mean()), amp0, omega0, phase0]
    try:
        popt, pcov = curve_fit(model, ts_seg, fs_seg, p0=p0, maxfev=20000)
        err = float(np.sqrt(np.abs(pcov[2, 2])))
    except RuntimeError:
        popt, err = p0, math.inf
    omega = abs(float(popt[2]))
    span = ts_seg[-1] - ts_seg[0]
    return FrequencyEstimate(
        omega=omega,
        uncertainty=err,
        amplitude=abs(float(popt[1])),
        offset=float(popt[0]),
        phase=float(popt[3]),
        multipeak=multipeak,
        n_periods=span * omega / (2 * math.pi),
    )


def extract_amplitude(t: np.ndarray, f: np.ndarray, cfg: MetricConfig) -> AmplitudeEstimate:
    """Steady oscillation amplitude of the post-transient segment.

    Primary value is the fitted sinusoid amplitude; also reports half the
    mean peak-to-trough excursion over the last five fitted periods.
    """
    est = extract_frequency(t, f, cfg)
    ts_seg, fs_seg = _post_transient(np.asarray(t), np.asarray(f), cfg)
    t_tail = ts_seg[-1] - 5 * (2 * math.pi / est.omega)
    tail = ts_seg >= t_tail
    ft = fs_seg[tail]
    peaks, troughs = [], []
    for i in range(1, len(ft) - 1):
        if ft[i] >= ft[i - 1] and ft[i] >= ft[i + 1]:
            peaks.append(ft[i])
        elif ft[i] <= ft[i - 1] and ft[i] <= ft[i + 1]:
            troughs.append(ft[i])
    if peaks and troughs:
        ptt = 0.5 * (float(np.mean(peaks)) - float(np.mean(troughs)))
    else:
        ptt = float("nan")
    return AmplitudeEstimate(amplitude=est.amplitude, peak_to_trough=ptt, omega=est.omega)
