"""Exact many-body reference dynamics for small chains.

Builds the full 2^N-dimensional Hamiltonian and jump operators through the
Jordan-Wigner mapping (parity strings included), propagates the vectorized
density matrix with the exact exponential of the many-body Liouvillian,
and samples the same observable channels as the correlation-matrix
integrator. This is the ground truth the fast path is tested against, and
it shares no evolution code with it.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .dynamics import DissipationSpec, JumpType, ProductStateSpec, TimeSeries
from .errors import CapabilityError
from .lattice import Hamiltonian

MAX_ORACLE_SITES = 8

_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])
_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
_I2 = np.eye(2)


def jordan_wigner_annihilators(N: int) -> list[sp.csr_matrix]:
    """Fermionic c_j (1-based order, site 1 = leftmost tensor factor)."""
    ops = []
    for j in range(N):
        factors = [_Z] * j + [_SIGMA_MINUS] + [_I2] * (N - j - 1)
        op = sp.csr_matrix(factors[0])
        for f in factors[1:]:
            op = sp.kron(op, sp.csr_matrix(f), format="csr")
        ops.append(op)
    return ops


def many_body_hamiltonian(h: Hamiltonian | np.ndarray, c_ops: list[sp.csr_matrix]) -> sp.csr_matrix:
    """H = sum_ij h_ij c_i^dag c_j from the single-particle matrix."""
    hm = h.matrix if isinstance(h, Hamiltonian) else np.asarray(h)
    N = hm.shape[0]
    dim = 2**N
    H = sp.csr_matrix((dim, dim))
    rows, cols = np.nonzero(hm)
    for i, j in zip(rows, cols):
        H = H + hm[i, j] * (c_ops[i].T.conj() @ c_ops[j])
    return H.tocsr()


def product_state_vector(spec: ProductStateSpec) -> np.ndarray:
    """State vector of prod_j (cos th_j + e^{i ph_j} sin th_j c_j^dag)|0>.

    Applied in descending site order the parity strings act on empty
    sites only, so the result is the plain tensor product of single-site
    spinors.
    """
    psi = np.array([1.0 + 0.0j])
    for th, ph in zip(spec.thetas, spec.phis):
        psi = np.kron(psi, np.array([math.cos(th), np.exp(1j * ph) * math.sin(th)]))
    return psi


def _liouvillian(H: sp.spmatrix, jumps: list[sp.spmatrix], gamma: float) -> sp.csr_matrix:
    """Column-stacked superoperator of the density-matrix master equation."""
    dim = H.shape[0]
    eye = sp.identity(dim, format="csr")
    M = -1j * (sp.kron(eye, H) - sp.kron(H.T, eye))
    for J in jumps:
        JdJ = (J.T.conj() @ J).tocsr()
        M = M + gamma * (
            sp.kron(J.conj(), J) - 0.5 * sp.kron(eye, JdJ) - 0.5 * sp.kron(JdJ.T, eye)
        )
    return M.tocsr()


def exact_oracle_evolve(
    spec: ProductStateSpec,
    h: Hamiltonian | np.ndarray,
    d: DissipationSpec,
    t_max: float,
    dt: float,
    channels: list[str],
) -> TimeSeries:
    """Exact Lindblad evolution of the full density matrix, N <= 8."""
    hm = h.matrix if isinstance(h, Hamiltonian) else np.asarray(h)
    N = hm.shape[0]
    if N > MAX_ORACLE_SITES:
        raise CapabilityError(f"oracle supports N <= {MAX_ORACLE_SITES}, got N={N}")
    if spec.N != N:
        raise ValueError(f"state has {spec.N} sites, Hamiltonian has {N}")
    d.validate_for(N)

    c_ops = jordan_wigner_annihilators(N)
    H = many_body_hamiltonian(hm, c_ops)
    if d.jump_type is JumpType.DEPHASING:
        jumps = [(c_ops[s - 1].T.conj() @ c_ops[s - 1]).tocsr() for s in d.sites]
    else:
        jumps = [c_ops[s - 1] for s in d.sites]
    M = _liouvillian(H, jumps, d.gamma)

    psi = product_state_vector(spec)
    rho = np.outer(psi, psi.conj())
    dim = rho.shape[0]

    n_samples = int(math.floor(t_max / dt + 1e-9))
    t_grid = dt * np.arange(n_samples + 1)
    states = expm_multiply(
        M, rho.flatten(order="F"), start=0.0, stop=float(t_grid[-1]), num=n_samples + 1, endpoint=True
    )

    observables = _channel_operators(channels, c_ops, N)
    traces = {name: np.empty(n_samples + 1) for name in channels}
    max_imag = 0.0
    for k in range(n_samples + 1):
        rho_t = states[k].reshape((dim, dim), order="F")
        for name, op in observables.items():
            val = (op.multiply(rho_t.T)).sum()
            max_imag = max(max_imag, abs(val.imag))
            traces[name][k] = val.real
    metadata = {
        "integrator": "exact-many-body",
        "dt": dt,
        "t_max": float(t_grid[-1]),
        "dissipation": d.to_dict(),
        "initial_state": spec.to_dict(),
        "max_observable_imag": max_imag,
    }
    return TimeSeries(t=t_grid, channels=traces, metadata=metadata)


def _channel_operators(channels: list[str], c_ops, N: int) -> dict:
    """Many-body operator for each supported channel name."""
    import re

    ops = {}
    for name in channels:
        m = re.match(r"^n_(\d+)$", name)
        site = None
        if m:
            site = int(m.group(1))
        elif name == "n_mid":
            site = (N + 1) // 2
        elif name == "n_N":
            site = N
        if site is not None:
            ops[name] = (c_ops[site - 1].T.conj() @ c_ops[site - 1]).tocsr()
            continue
        m = re.match(r"^(Re|Im)C_(\d+)_(\d+)$", name)
        if name in ("ReC_1N", "ImC_1N") or m:
            if m:
                part, i, j = m.group(1), int(m.group(2)), int(m.group(3))
            else:
                part, i, j = name[:2], 1, N
            corr = (c_ops[i - 1].T.conj() @ c_ops[j - 1]).tocsr()
            if part == "Re":
                ops[name] = ((corr + corr.T.conj()) * 0.5).tocsr()
            else:
                ops[name] = ((corr - corr.T.conj()) * (-0.5j)).tocsr()
            continue
        if name == "trace":
            dim = 2**N
            total = sp.csr_matrix((dim, dim))
            for c in c_ops:
                total = total + c.T.conj() @ c
            ops[name] = total.tocsr()
            continue
        raise ValueError(f"channel {name!r} not supported by the oracle")
    return ops
