"""Dissipation-induced synchronization of topological edge states in 1D chains.

Simulates two-point correlation matrices of generalized Aubry-Andre-Harper
chains under local dephasing or loss, extracts Liouvillian decay and
relaxation rates, quantifies synchronization between the boundary sites,
and fits the size-scaling laws of those rates.
"""

from .dynamics import (
    DissipationSpec,
    JumpType,
    ProductStateSpec,
    TimeSeries,
    evolve,
    initial_correlation,
    lindblad_rhs,
    resolve_site_preset,
    unitary_reference,
)
from .errors import (
    CapabilityError,
    ClassificationError,
    ConfigurationError,
    EdgesyncError,
    IntegrationFailure,
    NoOscillationError,
)
from .fits import CrossoverResult, FitResult, detect_crossover, fit_exponential, fit_powerlaw
from .lattice import Hamiltonian, ModelSpec, ModelVariant, build_hamiltonian, check_chiral, check_reflection
from .liouvillian import LiouvillianReport, Superoperator, build_superoperator, spectrum_and_classify
from .metrics import (
    AmplitudeEstimate,
    FrequencyEstimate,
    MetricConfig,
    extract_amplitude,
    extract_frequency,
    pearson,
    sliding_pearson,
)
from .oracle import exact_oracle_evolve
from .runner import (
    ScenarioConfig,
    SweepConfig,
    cells_to_sites,
    load_scenario,
    run_robustness,
    run_scenario,
    run_sweep,
    theory_amplitude,
    theory_frequency,
)
from .spectral import (
    EdgeStateReport,
    EigenSystem,
    bulk_bands,
    edge_energies_diagonal,
    edge_energies_offdiagonal,
    edge_energy_fourband,
    eigensystem,
    identify_edge_states,
)

__version__ = "0.1.0"
