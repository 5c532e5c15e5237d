"""Correlation-space superoperator: construction, spectrum, mode classification.

The linear map M with d vec(C)/dt = M vec(C) (column stacking) is built
from the same equation of motion the integrator uses. Its eigenmodes fall
into three classes:

* Sync: conjugate pair(s) at +/- i omega supported on the edge-state
  subspace; their tiny |Re| is the synchronization decay rate r_decay.
* Stationary: zero-frequency modes that never relax, either supported on
  the protected subspace (edge populations and intra-pair coherences) or
  exactly conserved operators such as the identity under dephasing.
* Relaxing: everything else; the smallest |Re| among them is the
  relaxation rate r_relax that sets the time to reach the synchronized
  subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .dynamics import DissipationSpec, JumpType
from .errors import ClassificationError
from .lattice import Hamiltonian
from .spectral import EigenSystem

SYNC_WINDOW = 0.1  # relative half-width of the Im-lambda window around the hint
OVERLAP_THRESHOLD = 0.5


@dataclass(frozen=True)
class Superoperator:
    """Dense matrix M acting on column-stacked correlation matrices."""

    matrix: np.ndarray
    n_sites: int
    dissipation: dict = field(compare=False, default=None)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, C: np.ndarray) -> np.ndarray:
        """M acting on a correlation matrix, reshaped back to N x N."""
        vec = C.flatten(order="F")
        return (self.matrix @ vec).reshape((self.n_sites, self.n_sites), order="F")


def build_superoperator(h: Hamiltonian | np.ndarray, d: DissipationSpec) -> Superoperator:
    """M = i(I x h^T - h x I) + dissipator, column-stacking convention.

    For dephasing the dissipator is -(gamma/2) sum_s (I x E_s + E_s x I
    - 2 E_s x E_s); loss drops the last term. All three Kronecker factors
    are diagonal, so the dissipator is assembled directly on the diagonal.
    """
    hm = h.matrix if isinstance(h, Hamiltonian) else np.asarray(h)
    N = hm.shape[0]
    d.validate_for(N)
    eye = sp.identity(N, format="csr")
    hs = sp.csr_matrix(hm)
    M = (1j * (sp.kron(eye, hs.T) - sp.kron(hs, eye))).toarray()

    ind = np.zeros(N)
    ind[[s - 1 for s in d.sites]] = 1.0
    drates = -0.5 * d.gamma * (ind[:, None] + ind[None, :])
    if d.jump_type is JumpType.DEPHASING:
        drates[np.arange(N), np.arange(N)] += d.gamma * ind
    M[np.arange(N * N), np.arange(N * N)] += drates.flatten(order="F")
    return Superoperator(matrix=M, n_sites=N, dissipation=d.to_dict())


@dataclass(frozen=True)
class LiouvillianReport:
    """Classified spectrum with the extracted synchronization rates."""

    eigenvalues: np.ndarray
    classes: tuple[str, ...]
    overlaps: np.ndarray
    r_decay: float
    r_relax: float | None
    omega_sync: float
    protected_indices: tuple[int, ...]

    def count(self, cls: str) -> int:
        return sum(1 for c in self.classes if c == cls)

    def to_dict(self) -> dict:
        return {
            "r_decay": self.r_decay,
            "r_relax": self.r_relax,
            "omega_sync": self.omega_sync,
            "protected_indices": list(self.protected_indices),
            "counts": {c: self.count(c) for c in ("Sync", "Stationary", "Relaxing")},
            "eigenvalues": [[float(l.real), float(l.imag)] for l in self.eigenvalues],
            "classification": list(self.classes),
        }


def spectrum_and_classify(
    superop: Superoperator,
    es: EigenSystem,
    protected_indices,
    omega_sync_hint: float,
) -> LiouvillianReport:
    """Dense eigendecomposition of M and three-way mode classification.

    Each right eigenoperator R_k (unit Frobenius norm) is scored by its
    weight inside the protected single-particle subspace,
    ||P R_k P||_F^2 with P the projector on the edge states. Modes above
    the overlap threshold are Sync when |Im lambda| falls within 10% of
    the supplied frequency hint and Stationary otherwise; unprotected
    modes are Relaxing except for exactly conserved ones (|lambda| at
    numerical zero), which never relax and are counted Stationary.
    """
    if omega_sync_hint <= 0:
        raise ValueError("omega_sync_hint must be positive")
    protected = tuple(int(i) for i in protected_indices)
    N = superop.n_sites
    w, V = scipy.linalg.eig(superop.matrix)

    Up = es.states[:, list(protected)] if protected else np.zeros((N, 0))
    overlaps = np.empty(len(w))
    for k in range(len(w)):
        Rk = V[:, k].reshape((N, N), order="F")
        core = Up.T @ Rk @ Up
        overlaps[k] = np.sum(np.abs(core) ** 2)

    h_norm = float(np.max(np.abs(es.energies)))
    gamma = superop.dissipation["gamma"] if superop.dissipation else 0.0
    tol_im = 1e-8 * h_norm
    tol_conserved = 1e-11 * (h_norm + gamma + 1.0)

    classes = []
    for k, lam in enumerate(w):
        in_sync_window = abs(abs(lam.imag) - omega_sync_hint) < SYNC_WINDOW * omega_sync_hint
        if overlaps[k] > OVERLAP_THRESHOLD:
            classes.append("Sync" if in_sync_window else "Stationary")
        elif abs(lam.imag) < tol_im and abs(lam.real) < tol_conserved:
            classes.append("Stationary")
        else:
            classes.append("Relaxing")

    sync = [k for k, c in enumerate(classes) if c == "Sync"]
    if not sync:
        raise ClassificationError(
            f"no synchronization modes near Im lambda = +/-{omega_sync_hint:.6g} "
            "with protected-subspace support; parameters are outside the sync regime"
        )
    relaxing = [k for k, c in enumerate(classes) if c == "Relaxing"]
    r_decay = float(min(abs(w[k].real) for k in sync))
    r_relax = float(min(abs(w[k].real) for k in relaxing)) if relaxing else None
    k_best = min(sync, key=lambda k: abs(w[k].real))
    omega_sync = float(abs(w[k_best].imag))

    return LiouvillianReport(
        eigenvalues=w,
        classes=tuple(classes),
        overlaps=overlaps,
        r_decay=r_decay,
        r_relax=r_relax,
        omega_sync=omega_sync,
        protected_indices=protected,
    )
