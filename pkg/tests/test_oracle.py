import numpy as np
import pytest

from edgesync.dynamics import DissipationSpec, ProductStateSpec, evolve, initial_correlation
from edgesync.errors import CapabilityError
from edgesync.lattice import ModelSpec, build_hamiltonian
from edgesync.oracle import exact_oracle_evolve, jordan_wigner_annihilators, product_state_vector

CHANNELS = ["n_1", "n_N", "ReC_1N", "ImC_1N", "trace"]


def test_single_site_dephasing_matches_fast_path():
    spec = ProductStateSpec((np.pi / 3,), (0.7,))
    h = np.zeros((1, 1))
    d = DissipationSpec(jump_type="Dephasing", sites=(1,), gamma=1.3)
    ts_o = exact_oracle_evolve(spec, h, d, 5.0, 0.25, ["n_1"])
    ts_f = evolve(initial_correlation(spec), h, d, 5.0, 0.25, ["n_1"])
    assert np.max(np.abs(ts_o["n_1"] - ts_f["n_1"])) < 1e-10


def test_five_site_dephasing_agreement():
    spec5 = ModelSpec(variant="FourBand", N=5, g1=1.0, g2=0.7)
    h = build_hamiltonian(spec5)
    state = ProductStateSpec.random(5, seed=3)
    d = DissipationSpec(jump_type="Dephasing", sites=(3,), gamma=1.0)
    ts_f = evolve(initial_correlation(state), h, d, 10.0, 0.1, CHANNELS)
    ts_o = exact_oracle_evolve(state, h, d, 10.0, 0.1, CHANNELS)
    for ch in CHANNELS:
        assert np.max(np.abs(ts_f[ch] - ts_o[ch])) < 1e-8


def test_four_site_loss_monotone_and_agrees():
    spec4 = ModelSpec(variant="FourBand", N=4, g1=1.0, g2=0.7)
    h = build_hamiltonian(spec4)
    state = ProductStateSpec.plus_ends(4)
    d = DissipationSpec(jump_type="Loss", sites=(2,), gamma=0.5)
    ts_o = exact_oracle_evolve(state, h, d, 10.0, 0.1, CHANNELS)
    assert np.all(np.diff(ts_o["trace"]) <= 1e-10)
    ts_f = evolve(initial_correlation(state), h, d, 10.0, 0.1, CHANNELS)
    for ch in CHANNELS:
        assert np.max(np.abs(ts_f[ch] - ts_o[ch])) < 1e-8


def test_initial_state_vector_reproduces_correlation_formula():
    state = ProductStateSpec.random(6, seed=11)
    psi = product_state_vector(state)
    cs = jordan_wigner_annihilators(6)
    C = np.empty((6, 6), dtype=complex)
    for i in range(6):
        for j in range(6):
            C[i, j] = psi.conj() @ (cs[i].T.conj() @ (cs[j] @ psi))
    assert np.allclose(C, initial_correlation(state), atol=1e-12)


def test_capability_limit():
    state = ProductStateSpec.vacuum(9)
    with pytest.raises(CapabilityError):
        exact_oracle_evolve(state, np.zeros((9, 9)),
                            DissipationSpec(jump_type="Loss", sites=(1,), gamma=1.0),
                            1.0, 0.1, ["n_1"])
