"""Diagonalization, edge-state identification, and closed-form edge energies.

The closed forms cover the three model variants:

* diagonal chain (q = 3): the mid-gap pair mu1/mu2 as functions of the
  diagonal phase,
* off-diagonal chain (q = 4): left/right pairs with finite existence
  windows in the off-diagonal phase,
* four-band chain: the degenerate quadruplet at +/- sqrt(g1^2 + g2^2)
  inside the window |g2/g1| < 1.

Edge states are detected from boundary weight; nearly degenerate
eigenspaces (the four-band quadruplets, or the off-diagonal pairs at
phi_lambda = 0) are rotated into maximally one-sided combinations before
their side is reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .lattice import Hamiltonian, ModelSpec, ModelVariant, _clean_bonds

EDGE_WEIGHT_THRESHOLD = 0.5
GAP_MARGIN = 1e-6
CLUSTER_TOL = 0.2  # energy window (units of the base hopping) for near-degenerate grouping
BLOCH_GRID = 256


@dataclass(frozen=True)
class EigenSystem:
    """Sorted eigenpairs of a real symmetric single-particle matrix."""

    energies: np.ndarray
    states: np.ndarray  # orthonormal columns, sign-fixed
    hamiltonian: Hamiltonian | None = field(compare=False, default=None)

    @property
    def N(self) -> int:
        return len(self.energies)


def eigensystem(h: Hamiltonian | np.ndarray) -> EigenSystem:
    """Dense symmetric diagonalization with a deterministic sign convention.

    Energies ascend; each eigenvector is flipped so its first amplitude
    above 1e-12 is positive.
    """
    ham = h if isinstance(h, Hamiltonian) else Hamiltonian(matrix=np.asarray(h, dtype=float))
    energies, states = np.linalg.eigh(ham.matrix)
    for n in range(states.shape[1]):
        col = states[:, n]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            states[:, n] = -col
    return EigenSystem(energies=energies, states=states, hamiltonian=ham)


# ---------------------------------------------------------------------------
# Closed-form edge energies
# ---------------------------------------------------------------------------

def edge_energies_diagonal(v: float, phi_V: float) -> tuple[float, float]:
    """Mid-gap edge energies (mu1, mu2) of the q = 3 diagonal chain, in units of g."""
    shift = -v * math.cos(phi_V) / 2.0
    root = math.sqrt(1.0 + 3.0 * v**2 * math.sin(phi_V) ** 2 / 4.0)
    return shift - root, shift + root


class EdgePairWindow(NamedTuple):
    side: str
    energy: float  # positive member of the +/- pair, units of g
    exists: bool
    window: tuple[float, float]  # open phi_lambda interval where the pair exists


@dataclass(frozen=True)
class OffDiagonalEdgeReport:
    left: EdgePairWindow
    right: EdgePairWindow

    @property
    def pairs(self) -> tuple[EdgePairWindow, EdgePairWindow]:
        return self.left, self.right


def edge_energies_offdiagonal(lam: float, phi_lambda: float) -> OffDiagonalEdgeReport:
    """Left/right edge-state pairs of the q = 4 off-diagonal chain.

    The left pair at +/- sqrt(2 + lam^2 - 2*sqrt(2)*lam*sin(phi+pi/4))
    exists for -3pi/4 < phi < pi/4; the right pair at
    +/- sqrt(2 + lam^2 + 2*sqrt(2)*lam*sin(phi-pi/4)) for
    -pi/4 < phi < 3pi/4. At phi = 0 both collapse to
    +/- sqrt(2 + lam^2 - 2*lam).
    """
    s2 = math.sqrt(2.0)
    e_left = math.sqrt(max(2.0 + lam**2 - 2.0 * s2 * lam * math.sin(phi_lambda + math.pi / 4), 0.0))
    e_right = math.sqrt(max(2.0 + lam**2 + 2.0 * s2 * lam * math.sin(phi_lambda - math.pi / 4), 0.0))
    wl = (-3 * math.pi / 4, math.pi / 4)
    wr = (-math.pi / 4, 3 * math.pi / 4)
    return OffDiagonalEdgeReport(
        left=EdgePairWindow("Left", e_left, wl[0] < phi_lambda < wl[1], wl),
        right=EdgePairWindow("Right", e_right, wr[0] < phi_lambda < wr[1], wr),
    )


class FourBandEdgeEnergy(NamedTuple):
    energy: float
    is_edge: bool  # inside the degenerate-edge window |g2/g1| < 1


def edge_energy_fourband(g1: float, g2: float) -> FourBandEdgeEnergy:
    """Magnitude sqrt(g1^2 + g2^2) of the four-band edge quadruplet."""
    return FourBandEdgeEnergy(math.hypot(g1, g2), abs(g2) < abs(g1))


# ---------------------------------------------------------------------------
# Bulk band structure
# ---------------------------------------------------------------------------

def bloch_hamiltonian(spec: ModelSpec, k: float) -> np.ndarray:
    """q x q Bloch matrix of the periodic chain at momentum k."""
    q = spec.cell_size
    # bond/onsite pattern over one cell; bond q wraps to the next cell
    probe = ModelSpec(**{**spec.to_dict(), "N": 2 * q + 1, "disorder_amplitude": 0.0})
    bonds = _clean_bonds(probe)[:q]
    hk = np.zeros((q, q), dtype=complex)
    if spec.variant is ModelVariant.DIAGONAL_AAH:
        m = np.arange(1, q + 1)
        hk[np.arange(q), np.arange(q)] = spec.g * spec.v * np.cos(2 * np.pi * spec.alpha * m + spec.phi_V)
    for m in range(q - 1):
        hk[m, m + 1] += bonds[m]
        hk[m + 1, m] += bonds[m]
    hk[q - 1, 0] += bonds[q - 1] * np.exp(1j * k)
    hk[0, q - 1] += bonds[q - 1] * np.exp(-1j * k)
    if spec.g3 != 0.0:
        # NNN couplings within and across the cell boundary
        for m in range(q):
            i, jj = m, m + 2
            phase = jj // q
            hk[i, jj % q] += spec.g3 * np.exp(1j * k * phase)
            hk[jj % q, i] += spec.g3 * np.exp(-1j * k * phase)
    return hk


def bulk_bands(spec: ModelSpec, nk: int = BLOCH_GRID) -> np.ndarray:
    """Band extents of the periodic chain: array (q, 2) of [min, max] per band."""
    q = spec.cell_size
    ks = np.linspace(-np.pi, np.pi, nk, endpoint=False)
    energies = np.empty((nk, q))
    for i, k in enumerate(ks):
        energies[i] = np.linalg.eigvalsh(bloch_hamiltonian(spec, k))
    return np.stack([energies.min(axis=0), energies.max(axis=0)], axis=1)


def _gap_label(energy: float, bands: np.ndarray, margin: float) -> str | None:
    """Positional label of the internal gap containing ``energy``, if any."""
    nbands = bands.shape[0]
    for i in range(nbands - 1):
        lo, hi = bands[i, 1], bands[i + 1, 0]
        if lo + margin <= energy <= hi - margin:
            if i == 0:
                return "BottomGap"
            if i == nbands - 2:
                return "TopGap"
            return "MidGap"
    return None


# ---------------------------------------------------------------------------
# Edge-state identification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeState:
    index: int  # eigenstate index in the ascending-energy ordering
    energy: float
    side: str  # "Left" or "Right"
    edge_weight: float  # weight on the q sites nearest the reported side
    gap_label: str


@dataclass(frozen=True)
class DegenerateGroup:
    indices: tuple[int, ...]
    dimension: int
    left_weight: float  # total boundary weight of the projected eigenspace
    right_weight: float


@dataclass(frozen=True)
class EdgeStateReport:
    states: tuple[EdgeState, ...]
    groups: tuple[DegenerateGroup, ...]
    q: int
    threshold: float

    @property
    def protected_indices(self) -> tuple[int, ...]:
        return tuple(sorted({s.index for s in self.states}))

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "threshold": self.threshold,
            "states": [
                {
                    "index": s.index,
                    "energy": s.energy,
                    "side": s.side,
                    "edge_weight": s.edge_weight,
                    "gap_label": s.gap_label,
                }
                for s in self.states
            ],
            "degenerate_groups": [
                {
                    "indices": list(g.indices),
                    "dimension": g.dimension,
                    "left_weight": g.left_weight,
                    "right_weight": g.right_weight,
                }
                for g in self.groups
            ],
        }


def identify_edge_states(
    es: EigenSystem,
    q: int | None = None,
    threshold: float = EDGE_WEIGHT_THRESHOLD,
    cluster_tol: float | None = None,
) -> EdgeStateReport:
    """Detect boundary-localized eigenstates and label their gap.

    A state is a candidate when its combined weight on the q leftmost
    plus q rightmost sites exceeds ``threshold``. Candidates that are
    nearly degenerate are rotated within their eigenspace into maximally
    one-sided combinations (resolving the left/right ambiguity of
    symmetric quadruplets); the rotated states must individually carry
    more than ``threshold`` weight on one side. States not sitting at
    least GAP_MARGIN inside an internal bulk gap are discarded.
    """
    spec = es.hamiltonian.spec if es.hamiltonian is not None else None
    if q is None:
        if spec is None:
            raise ValueError("q is required when the eigensystem has no model spec")
        q = spec.cell_size
    N = es.N
    if N < 2 * q:
        raise ValueError(f"need N >= 2q, got N={N}, q={q}")

    scale = spec.energy_scale if spec is not None else 1.0
    tol = cluster_tol if cluster_tol is not None else CLUSTER_TOL * scale
    bands = bulk_bands(spec) if spec is not None else None

    weights_left = np.sum(es.states[:q, :] ** 2, axis=0)
    weights_right = np.sum(es.states[N - q:, :] ** 2, axis=0)
    candidates = np.nonzero(weights_left + weights_right > threshold)[0]

    # group nearly degenerate candidates (energies ascend with the index)
    clusters: list[list[int]] = []
    for idx in candidates:
        if clusters and es.energies[idx] - es.energies[clusters[-1][-1]] < tol:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])

    states: list[EdgeState] = []
    groups: list[DegenerateGroup] = []
    for cluster in clusters:
        vecs = es.states[:, cluster]
        if len(cluster) > 1:
            left_op = vecs[:q].T @ vecs[:q]
            right_op = vecs[N - q:].T @ vecs[N - q:]
            vals, rot = np.linalg.eigh(left_op)
            vecs = vecs @ rot
            energies = rot.T @ np.diag(es.energies[cluster]) @ rot
            energies = np.diag(energies)
            groups.append(
                DegenerateGroup(
                    indices=tuple(cluster),
                    dimension=len(cluster),
                    left_weight=float(np.trace(left_op)),
                    right_weight=float(np.trace(right_op)),
                )
            )
        else:
            energies = es.energies[cluster]
        for m, idx in enumerate(cluster):
            lw = float(np.sum(vecs[:q, m] ** 2))
            rw = float(np.sum(vecs[N - q:, m] ** 2))
            weight = max(lw, rw)
            if weight <= threshold:
                continue
            energy = float(energies[m])
            label = _gap_label(energy, bands, GAP_MARGIN * scale) if bands is not None else "MidGap"
            if label is None:
                continue
            states.append(
                EdgeState(
                    index=idx,
                    energy=energy,
                    side="Left" if lw >= rw else "Right",
                    edge_weight=weight,
                    gap_label=label,
                )
            )
    return EdgeStateReport(states=tuple(states), groups=tuple(groups), q=q, threshold=threshold)
