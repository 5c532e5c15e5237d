"""Single-particle Hamiltonians for the generalized AAH chain family.

Three variants are supported:

* ``DiagonalAAH``: cosine-modulated on-site energies, uniform hopping.
* ``OffDiagonalAAH``: cosine-modulated hopping, zero on-site energies.
* ``FourBand``: period-4 bond pattern (g1, g2, -g2, -g1), zero on-site.

Sites are numbered j = 1..N in every interface; arrays are stored 0-based
internally. Energies are in units of the base hopping (g, or g1 for the
four-band variant); times in 1/g; rates in g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from enum import Enum

import numpy as np

from .errors import ConfigurationError

SYMMETRY_TOL = 1e-12


class ModelVariant(str, Enum):
    DIAGONAL_AAH = "DiagonalAAH"
    OFF_DIAGONAL_AAH = "OffDiagonalAAH"
    FOUR_BAND = "FourBand"


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of one chain Hamiltonian, plus optional perturbations.

    ``v`` and ``lam`` are dimensionless modulation amplitudes (V/g and the
    hopping modulation); ``alpha_p``/``alpha_q`` define the rational
    modulation frequency alpha = p/q; ``phi_V`` and ``phi_lambda`` are the
    diagonal and off-diagonal phases. ``g1``/``g2`` parameterize the
    four-band bond pattern and ``g3`` the next-nearest-neighbor hopping.
    ``disorder_amplitude`` W draws multiplicative bond noise in [-W, W]
    from ``disorder_seed`` (bulk bonds only).
    """

    variant: ModelVariant
    N: int
    g: float = 1.0
    v: float = 0.0
    lam: float = 0.0
    alpha_p: int = 1
    alpha_q: int = 3
    phi_V: float = 0.0
    phi_lambda: float = 0.0
    g1: float = 1.0
    g2: float = 0.0
    g3: float = 0.0
    disorder_amplitude: float = 0.0
    disorder_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variant", ModelVariant(self.variant))
        self.validate()

    def validate(self):
        if self.N < 2:
            raise ConfigurationError("N", f"site count must be >= 2, got {self.N}")
        if self.variant in (ModelVariant.DIAGONAL_AAH, ModelVariant.OFF_DIAGONAL_AAH):
            if self.alpha_q < 2:
                raise ConfigurationError("alpha_q", f"must be >= 2, got {self.alpha_q}")
            if math.gcd(self.alpha_p, self.alpha_q) != 1:
                raise ConfigurationError(
                    "alpha_p/alpha_q",
                    f"p={self.alpha_p}, q={self.alpha_q} are not co-prime",
                )
        if self.variant is ModelVariant.DIAGONAL_AAH and self.lam != 0.0:
            raise ConfigurationError("lam", "DiagonalAAH requires lambda = 0")
        if self.variant is ModelVariant.OFF_DIAGONAL_AAH and self.v != 0.0:
            raise ConfigurationError("v", "OffDiagonalAAH requires v = 0")
        if not -math.pi < self.phi_V <= math.pi:
            raise ConfigurationError("phi_V", f"must lie in (-pi, pi], got {self.phi_V}")
        if self.disorder_amplitude < 0:
            raise ConfigurationError("disorder_amplitude", "W must be >= 0")

    @property
    def alpha(self) -> float:
        return self.alpha_p / self.alpha_q

    @property
    def cell_size(self) -> int:
        """Unit-cell length q of the bond/onsite pattern."""
        return 4 if self.variant is ModelVariant.FOUR_BAND else self.alpha_q

    @property
    def energy_scale(self) -> float:
        """Base hopping used as the energy unit (g, or g1 for FourBand)."""
        return self.g1 if self.variant is ModelVariant.FOUR_BAND else self.g

    def to_dict(self) -> dict:
        d = asdict(self)
        d["variant"] = self.variant.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(**d)


@dataclass(frozen=True)
class Hamiltonian:
    """Real symmetric single-particle matrix h with its originating spec.

    h[j, j] is the on-site energy of site j+1, h[j, j+1] the bond between
    sites j+1 and j+2, h[j, j+2] the NNN coupling (when enabled).
    """

    matrix: np.ndarray
    spec: ModelSpec = field(compare=False, default=None)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    @property
    def bonds(self) -> np.ndarray:
        """Nearest-neighbor couplings g_j, j = 1..N-1."""
        return np.diag(self.matrix, k=1)

    def spectral_norm(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))


def _clean_bonds(spec: ModelSpec) -> np.ndarray:
    j = np.arange(1, spec.N)  # bond j couples sites j, j+1
    if spec.variant is ModelVariant.DIAGONAL_AAH:
        return np.full(spec.N - 1, spec.g, dtype=float)
    if spec.variant is ModelVariant.OFF_DIAGONAL_AAH:
        return spec.g * (1.0 + spec.lam * np.cos(2 * np.pi * spec.alpha * j + spec.phi_lambda))
    # FourBand: period-4 sequence starting at bond 1
    pattern = np.array([spec.g1, spec.g2, -spec.g2, -spec.g1])
    return pattern[(j - 1) % 4]


def _onsite(spec: ModelSpec) -> np.ndarray:
    if spec.variant is ModelVariant.DIAGONAL_AAH:
        j = np.arange(1, spec.N + 1)
        return spec.g * spec.v * np.cos(2 * np.pi * spec.alpha * j + spec.phi_V)
    return np.zeros(spec.N)


def build_hamiltonian(spec: ModelSpec) -> Hamiltonian:
    """Construct the single-particle matrix for a model spec.

    Bond disorder (W > 0) multiplies each bulk nearest-neighbor bond j by
    (1 + w_j) with w_j uniform in [-W, W], drawn from ``disorder_seed``;
    the two boundary bonds (j = 1 and j = N-1) stay clean so the edge
    modes are perturbed only through the bulk.
    """
    spec.validate()
    bonds = _clean_bonds(spec)
    if spec.disorder_amplitude > 0 and spec.N > 3:
        rng = np.random.default_rng(spec.disorder_seed)
        w = rng.uniform(-spec.disorder_amplitude, spec.disorder_amplitude, size=spec.N - 3)
        bonds[1:-1] *= 1.0 + w
    h = np.zeros((spec.N, spec.N))
    idx = np.arange(spec.N - 1)
    h[idx, idx + 1] = bonds
    h[idx + 1, idx] = bonds
    h[np.arange(spec.N), np.arange(spec.N)] = _onsite(spec)
    if spec.g3 != 0.0 and spec.N > 2:
        idx2 = np.arange(spec.N - 2)
        h[idx2, idx2 + 2] = spec.g3
        h[idx2 + 2, idx2] = spec.g3
    return Hamiltonian(matrix=h, spec=spec)


def _matrix_of(h) -> np.ndarray:
    return h.matrix if isinstance(h, Hamiltonian) else np.asarray(h)


def check_chiral(h) -> bool:
    """True iff Gamma h Gamma = -h with Gamma = diag((-1)^j), j = 1..N.

    Equivalent to a vanishing diagonal and vanishing even-distance
    couplings; broken by on-site terms and by NNN hopping.
    """
    m = _matrix_of(h)
    n = m.shape[0]
    signs = (-1.0) ** np.arange(1, n + 1)
    conj = signs[:, None] * m * signs[None, :]
    return bool(np.max(np.abs(conj + m)) < SYMMETRY_TOL)


def check_reflection(h, signed: bool = False) -> bool:
    """Reflection-symmetry check about the chain center.

    Unsigned: R h R = h with R the anti-diagonal permutation (palindromic
    bonds). Signed: R' h R' = h with R'_{ij} = (-1)^j delta_{i,N+1-j},
    i.e. a (-1)-graded palindrome as realized by the four-band pattern
    at N = 4l+1.
    """
    m = _matrix_of(h)
    n = m.shape[0]
    refl = m[::-1, ::-1]
    if signed:
        signs = (-1.0) ** np.arange(1, n + 1)
        refl = signs[:, None] * refl * signs[None, :]
    return bool(np.max(np.abs(refl - m)) < SYMMETRY_TOL)
