"""Correlation-matrix Lindblad dynamics.

The state is the two-point correlation matrix C_ij = <c_i^dag c_j>. For a
quadratic chain with on-site dephasing (jump operator n_s) or loss (jump
operator c_s) on a site set S, C obeys a closed linear equation:

    dC/dt = i (h^T C - C h^T) + D(C)

with, entrywise, D(C)_ij = -(gamma/2) (1_{i in S} + 1_{j in S}) C_ij for
loss, and the same minus the diagonal restoring term for dephasing (so
populations are untouched). The integrator stores C as a real
symmetric/antisymmetric pair (X = Re C, Y = Im C), which keeps Hermiticity
exact and halves the arithmetic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, IntegrationFailure
from .lattice import Hamiltonian

# Fixed-step cap c in dt_int = min(dt, c / (||h|| + gamma)). The RK4 phase
# error ~ t * omega^5 * dt^4 / 120 with omega up to 2||h||; c = 5e-3 keeps
# trajectories within ~5e-9 of exact at t = 10, the regression budget.
RK4_STEP_CAP = 5e-3


class JumpType(str, Enum):
    DEPHASING = "Dephasing"
    LOSS = "Loss"


@dataclass(frozen=True)
class DissipationSpec:
    """Jump-operator type, 1-based target sites S, and rate gamma (units of g)."""

    jump_type: JumpType
    sites: tuple[int, ...]
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "jump_type", JumpType(self.jump_type))
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if self.gamma < 0:
            raise ConfigurationError("gamma", f"rate must be >= 0, got {self.gamma}")
        if len(set(self.sites)) != len(self.sites):
            raise ConfigurationError("sites", "duplicate sites in dissipation set")

    def validate_for(self, N: int):
        for s in self.sites:
            if not 1 <= s <= N:
                raise ConfigurationError("sites", f"site {s} outside 1..{N}")

    def to_dict(self) -> dict:
        return {"jump_type": self.jump_type.value, "sites": list(self.sites), "gamma": self.gamma}


def resolve_site_preset(name: str, N: int) -> tuple[int, ...]:
    """Named dissipation site sets from the studied scenarios.

    CenterTwo: the two centermost sites {floor(N/2), floor(N/2)+1}.
    CenterFive: five centermost sites, N odd.
    BulkHalf: the central (N+1)/2 sites, N = 1 mod 4.
    """
    if name == "CenterTwo":
        if N < 2:
            raise ConfigurationError("sites", "CenterTwo needs N >= 2")
        lo = N // 2
        return (lo, lo + 1)
    if name == "CenterFive":
        if N % 2 == 0 or N < 7:
            raise ConfigurationError("sites", f"CenterFive needs odd N >= 7, got N={N}")
        return tuple(range((N - 3) // 2, (N - 3) // 2 + 5))
    if name == "BulkHalf":
        if N % 4 != 1:
            raise ConfigurationError("sites", f"BulkHalf needs N = 1 mod 4, got N={N}")
        return tuple(range((N + 3) // 4, (3 * N + 1) // 4 + 1))
    raise ConfigurationError("sites", f"unknown site preset {name!r}")


# ---------------------------------------------------------------------------
# Product states and their correlation matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProductStateSpec:
    """Per-site Bloch angles of the product state prod_j (cos th_j + e^{i ph_j} sin th_j c_j^dag)|0>."""

    thetas: tuple[float, ...]
    phis: tuple[float, ...]
    label: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "phis", tuple(float(p) for p in self.phis))
        if len(self.thetas) != len(self.phis):
            raise ConfigurationError("initial_state", "thetas and phis lengths differ")
        for t in self.thetas:
            if not 0 <= t < math.pi:
                raise ConfigurationError("theta", f"must lie in [0, pi), got {t}")
        for p in self.phis:
            if not 0 <= p < 2 * math.pi:
                raise ConfigurationError("phi", f"must lie in [0, 2pi), got {p}")

    @property
    def N(self) -> int:
        return len(self.thetas)

    @classmethod
    def vacuum(cls, N: int) -> "ProductStateSpec":
        return cls((0.0,) * N, (0.0,) * N, label="Vacuum")

    @classmethod
    def plus_ends(cls, N: int) -> "ProductStateSpec":
        """|+0...0+> : theta = pi/4 at both ends."""
        th = [0.0] * N
        th[0] = th[-1] = math.pi / 4
        return cls(tuple(th), (0.0,) * N, label="PlusEnds")

    @classmethod
    def one_plus(cls, N: int) -> "ProductStateSpec":
        """|10...0+> : site 1 occupied, |+> at site N."""
        th = [0.0] * N
        th[0] = math.pi / 2
        th[-1] = math.pi / 4
        return cls(tuple(th), (0.0,) * N, label="OnePlus")

    @classmethod
    def random(cls, N: int, seed: int) -> "ProductStateSpec":
        rng = np.random.default_rng(seed)
        th = rng.uniform(0.0, math.pi, size=N)
        ph = rng.uniform(0.0, 2 * math.pi, size=N)
        return cls(tuple(th), tuple(ph), label=f"Random(seed={seed})")

    def to_dict(self) -> dict:
        return {"label": self.label, "thetas": list(self.thetas), "phis": list(self.phis)}


def initial_correlation(spec: ProductStateSpec) -> np.ndarray:
    """Correlation matrix of a fermionic product state.

    C_jj = sin^2 th_j, and for i < j
    C_ij = conj(a_i) a_j prod_{k=i+1}^{j-1} (1 - 2 sin^2 th_k)
    with a_m = cos th_m sin th_m e^{i ph_m}; the product is the
    Jordan-Wigner parity string between the two sites.
    """
    th = np.asarray(spec.thetas)
    ph = np.asarray(spec.phis)
    N = spec.N
    a = np.cos(th) * np.sin(th) * np.exp(1j * ph)
    z = 1.0 - 2.0 * np.sin(th) ** 2
    C = np.zeros((N, N), dtype=complex)
    C[np.arange(N), np.arange(N)] = np.sin(th) ** 2
    for i in range(N - 1):
        strings = np.concatenate(([1.0], np.cumprod(z[i + 1:N - 1])))
        row = np.conj(a[i]) * strings * a[i + 1:]
        C[i, i + 1:] = row
        C[i + 1:, i] = np.conj(row)
    return C


# ---------------------------------------------------------------------------
# Equation of motion
# ---------------------------------------------------------------------------

def _damping_matrix(d: DissipationSpec, N: int) -> np.ndarray:
    """Entrywise damping rates Lambda_ij applied as dC/dt -= Lambda * C."""
    ind = np.zeros(N)
    ind[[s - 1 for s in d.sites]] = 1.0
    lam = 0.5 * d.gamma * (ind[:, None] + ind[None, :])
    if d.jump_type is JumpType.DEPHASING:
        lam[np.arange(N), np.arange(N)] -= d.gamma * ind
    return lam


def lindblad_rhs(C: np.ndarray, h: Hamiltonian | np.ndarray, d: DissipationSpec) -> np.ndarray:
    """Time derivative of the correlation matrix."""
    hm = h.matrix if isinstance(h, Hamiltonian) else np.asarray(h)
    N = hm.shape[0]
    if C.shape != (N, N):
        raise ValueError(f"dimension mismatch: C is {C.shape}, h is {hm.shape}")
    d.validate_for(N)
    ht = hm.T
    return 1j * (ht @ C - C @ ht) - _damping_matrix(d, N) * C


def unitary_reference(C0: np.ndarray, h: Hamiltonian | np.ndarray, t: float) -> np.ndarray:
    """Closed-form gamma = 0 evolution e^{i h^T t} C0 e^{-i h^T t}."""
    hm = h.matrix if isinstance(h, Hamiltonian) else np.asarray(h)
    energies, modes = np.linalg.eigh(hm.T)
    phases = np.exp(1j * energies * t)
    U = modes @ np.diag(phases) @ modes.T
    return U @ C0 @ U.conj().T


# ---------------------------------------------------------------------------
# Observable channels
# ---------------------------------------------------------------------------

_N_SITE = re.compile(r"^n_(\d+)$")
_REIM_PAIR = re.compile(r"^(Re|Im)C_(\d+)_(\d+)$")


def channel_extractor(name: str, N: int):
    """Map a channel name to a function of (X, Y) = (Re C, Im C)."""
    m = _N_SITE.match(name)
    if m:
        j = int(m.group(1))
        if not 1 <= j <= N:
            raise ConfigurationError("channels", f"site {j} outside 1..{N} in {name!r}")
        return lambda X, Y, j=j - 1: X[j, j]
    if name == "n_mid":
        j = (N + 1) // 2 - 1
        return lambda X, Y, j=j: X[j, j]
    if name == "n_N":
        return lambda X, Y: X[N - 1, N - 1]
    if name == "ReC_1N":
        return lambda X, Y: X[0, N - 1]
    if name == "ImC_1N":
        return lambda X, Y: Y[0, N - 1]
    if name == "AbsC_1N":
        return lambda X, Y: math.hypot(X[0, N - 1], Y[0, N - 1])
    m = _REIM_PAIR.match(name)
    if m:
        part, i, j = m.group(1), int(m.group(2)), int(m.group(3))
        if not (1 <= i <= N and 1 <= j <= N):
            raise ConfigurationError("channels", f"sites outside 1..{N} in {name!r}")
        arr = 0 if part == "Re" else 1
        return lambda X, Y, i=i - 1, j=j - 1, arr=arr: (X if arr == 0 else Y)[i, j]
    if name == "trace":
        return lambda X, Y: float(np.trace(X))
    if name == "min_eig":
        return lambda X, Y: float(np.linalg.eigvalsh(X + 1j * Y)[0])
    if name == "max_eig":
        return lambda X, Y: float(np.linalg.eigvalsh(X + 1j * Y)[-1])
    raise ConfigurationError("channels", f"unknown channel {name!r}")


@dataclass
class TimeSeries:
    """Uniformly sampled observable traces with run metadata."""

    t: np.ndarray
    channels: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def to_csv(self, path) -> None:
        names = list(self.channels)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(["t"] + names) + "\n")
            cols = [self.t] + [self.channels[n] for n in names]
            for row in zip(*cols):
                fh.write(",".join(repr(float(x)) for x in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        if header[0] != "t":
            raise ValueError(f"{path}: first column must be 't', got {header[0]!r}")
        channels = {name: data[:, k + 1] for k, name in enumerate(header[1:])}
        return cls(t=data[:, 0], channels=channels)


# ---------------------------------------------------------------------------
# Integrator
# ---------------------------------------------------------------------------

def _rhs_split(X, Y, h, lam):
    # dX = -[h, Y] - lam*X ; dY = [h, X] - lam*Y ; exact symmetry classes
    B = h @ Y
    A = h @ X
    return -(B + B.T) - lam * X, (A - A.T) - lam * Y


def evolve(
    C0: np.ndarray,
    h: Hamiltonian | np.ndarray,
    d: DissipationSpec,
    t_max: float,
    dt: float,
    channels: list[str],
    snapshot_every: int | None = None,
    extra_metadata: dict | None = None,
) -> TimeSeries:
    """Integrate the correlation-matrix equation with fixed-step RK4.

    Samples the requested channels on the uniform grid 0, dt, ..., t_max.
    The internal step is dt / ceil(dt (||h|| + gamma) / c) with c =
    RK4_STEP_CAP, which keeps the trajectory within the 1e-8 regression
    budget of the exact flow. Hermiticity is exact by construction of the
    split-real representation; the recorded violation is the measured one.
    """
    if dt <= 0:
        raise ConfigurationError("dt", "must be > 0")
    if t_max < dt:
        raise ConfigurationError("t_max", "must be >= dt")
    ham = h if isinstance(h, Hamiltonian) else Hamiltonian(matrix=np.asarray(h, dtype=float))
    hm = ham.matrix
    N = hm.shape[0]
    d.validate_for(N)
    if C0.shape != (N, N):
        raise ValueError(f"dimension mismatch: C0 is {C0.shape}, h is {hm.shape}")

    norm = ham.spectral_norm()
    dt_cap = RK4_STEP_CAP / (norm + d.gamma) if norm + d.gamma > 0 else dt
    n_sub = max(1, math.ceil(dt / dt_cap - 1e-12))
    dt_int = dt / n_sub

    lam = _damping_matrix(d, N)
    C0 = np.asarray(C0, dtype=complex)
    X = (C0.real + C0.real.T) / 2.0
    Y = (C0.imag - C0.imag.T) / 2.0

    n_samples = int(math.floor(t_max / dt + 1e-9))
    t_grid = dt * np.arange(n_samples + 1)
    extractors = [(name, channel_extractor(name, N)) for name in channels]
    traces = {name: np.empty(n_samples + 1) for name in channels}
    snapshots = []
    herm_violation = 0.0

    half = dt_int / 2.0
    sixth = dt_int / 6.0
    for k in range(n_samples + 1):
        if k > 0:
            for _ in range(n_sub):
                k1x, k1y = _rhs_split(X, Y, hm, lam)
                k2x, k2y = _rhs_split(X + half * k1x, Y + half * k1y, hm, lam)
                k3x, k3y = _rhs_split(X + half * k2x, Y + half * k2y, hm, lam)
                k4x, k4y = _rhs_split(X + dt_int * k3x, Y + dt_int * k3y, hm, lam)
                X = X + sixth * (k1x + 2 * k2x + 2 * k3x + k4x)
                Y = Y + sixth * (k1y + 2 * k2y + 2 * k3y + k4y)
        if not np.isfinite(X[0, 0]) or not np.all(np.isfinite(X)):
            raise IntegrationFailure(t_grid[k])
        herm_violation = max(
            herm_violation,
            float(np.max(np.abs(X - X.T))),
            float(np.max(np.abs(Y + Y.T))),
        )
        for name, f in extractors:
            traces[name][k] = f(X, Y)
        if snapshot_every and k % snapshot_every == 0:
            snapshots.append((float(t_grid[k]), (X + 1j * Y).copy()))

    metadata = {
        "integrator": "rk4-fixed",
        "dt": dt,
        "dt_int": dt_int,
        "n_sub": n_sub,
        "t_max": float(t_grid[-1]),
        "step_cap": RK4_STEP_CAP,
        "h_norm": norm,
        "hermiticity_violation": herm_violation,
        "dissipation": d.to_dict(),
    }
    if ham.spec is not None:
        metadata["model"] = ham.spec.to_dict()
    if extra_metadata:
        metadata.update(extra_metadata)
    if snapshots:
        metadata["snapshots"] = snapshots
    return TimeSeries(t=t_grid, channels=traces, metadata=metadata)


def write_metadata_sidecar(ts: TimeSeries, path) -> None:
    """JSON sidecar with everything except bulky snapshot arrays."""
    import json

    meta = {k: v for k, v in ts.metadata.items() if k != "snapshots"}
    Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
