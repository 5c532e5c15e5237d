import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import edgesync.dynamics as dyn
from edgesync.dynamics import (
    DissipationSpec,
    ProductStateSpec,
    TimeSeries,
    channel_extractor,
    evolve,
    initial_correlation,
    lindblad_rhs,
    resolve_site_preset,
    unitary_reference,
)
from edgesync.errors import ConfigurationError, IntegrationFailure
from edgesync.lattice import ModelSpec, build_hamiltonian


def fock_correlation(thetas, phis):
    """Brute-force <c_i^dag c_j> in the full 2^N Fock space (independent oracle)."""
    N = len(thetas)
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])
    z = np.diag([1.0, -1.0])
    eye = np.eye(2)

    def op(j):
        mats = [z] * j + [sm] + [eye] * (N - j - 1)
        out = np.array([[1.0]])
        for m in mats:
            out = np.kron(out, m)
        return out

    psi = np.array([1.0 + 0j])
    for th, ph in zip(thetas, phis):
        psi = np.kron(psi, np.array([math.cos(th), np.exp(1j * ph) * math.sin(th)]))
    cs = [op(j) for j in range(N)]
    C = np.empty((N, N), dtype=complex)
    for i in range(N):
        for j in range(N):
            C[i, j] = psi.conj() @ (cs[i].conj().T @ cs[j] @ psi)
    return C


def test_vacuum_initial_correlation():
    assert np.array_equal(initial_correlation(ProductStateSpec.vacuum(6)), np.zeros((6, 6)))


def test_one_plus_initial_correlation():
    C = initial_correlation(ProductStateSpec.one_plus(5))
    expected = np.diag([1.0, 0, 0, 0, 0.5]).astype(complex)
    assert np.allclose(C, expected, atol=1e-15)


def test_plus_ends_matches_fock_oracle():
    spec = ProductStateSpec.plus_ends(4)
    C = initial_correlation(spec)
    assert C[0, 0] == pytest.approx(0.5)
    assert C[3, 3] == pytest.approx(0.5)
    assert C[0, 3] == pytest.approx(0.25)
    assert np.allclose(C, fock_correlation(spec.thetas, spec.phis), atol=1e-12)


@given(seed=st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_random_product_state_matches_fock_oracle(seed):
    spec = ProductStateSpec.random(5, seed)
    C = initial_correlation(spec)
    assert np.allclose(C, fock_correlation(spec.thetas, spec.phis), atol=1e-12)
    assert np.max(np.abs(C - C.conj().T)) < 1e-12
    eigs = np.linalg.eigvalsh(C)
    assert eigs.min() > -1e-12 and eigs.max() < 1 + 1e-12


def test_rhs_gamma_zero_is_traceless_commutator():
    rng = np.random.default_rng(0)
    C = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    C = (C + C.conj().T) / 2
    h = build_hamiltonian(ModelSpec(variant="DiagonalAAH", N=6, v=0.7, phi_V=0.2))
    d = DissipationSpec(jump_type="Dephasing", sites=(3,), gamma=0.0)
    dC = lindblad_rhs(C, h, d)
    assert abs(np.trace(dC)) < 1e-12


def test_rhs_single_site_population_invariant():
    C = np.array([[0.37]], dtype=complex)
    d = DissipationSpec(jump_type="Dephasing", sites=(1,), gamma=2.3)
    dC = lindblad_rhs(C, np.zeros((1, 1)), d)
    assert abs(dC[0, 0]) < 1e-15


def test_rhs_two_site_dephasing_rate():
    # exact two-site statement: coherence damped at gamma/2 when one site is dephased
    C = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    C = C + C.conj().T * 0
    d = DissipationSpec(jump_type="Dephasing", sites=(1,), gamma=1.0)
    dC = lindblad_rhs(C, np.zeros((2, 2)), d)
    assert dC[0, 1] == pytest.approx(-0.5 * C[0, 1])


def test_rhs_dimension_mismatch():
    with pytest.raises(ValueError):
        lindblad_rhs(np.zeros((3, 3), dtype=complex), np.zeros((2, 2)),
                     DissipationSpec(jump_type="Loss", sites=(1,), gamma=1.0))


def test_two_site_rabi_oscillation():
    h = np.array([[0.0, 1.0], [1.0, 0.0]])
    C0 = np.diag([1.0, 0.0]).astype(complex)
    d = DissipationSpec(jump_type="Dephasing", sites=(), gamma=0.0)
    ts = evolve(C0, h, d, 10.0, 0.05, ["n_1"])
    assert np.max(np.abs(ts["n_1"] - np.cos(ts.t) ** 2)) < 1e-8


def test_free_evolution_matches_unitary_map():
    spec = ModelSpec(variant="DiagonalAAH", N=20, v=0.7, phi_V=0.9)
    h = build_hamiltonian(spec)
    C0 = initial_correlation(ProductStateSpec.plus_ends(20))
    d = DissipationSpec(jump_type="Dephasing", sites=(10,), gamma=0.0)
    ts = evolve(C0, h, d, 10.0, 0.5, ["n_1", "ReC_1N", "ImC_1N", "n_mid"])
    Cex = unitary_reference(C0, h, 10.0)
    assert abs(ts["n_1"][-1] - Cex[0, 0].real) < 1e-8
    assert abs(ts["ReC_1N"][-1] - Cex[0, 19].real) < 1e-8
    assert abs(ts["ImC_1N"][-1] - Cex[0, 19].imag) < 1e-8


def test_single_occupied_site_is_stationary():
    C0 = np.array([[1.0]], dtype=complex)
    d = DissipationSpec(jump_type="Dephasing", sites=(1,), gamma=2.0)
    ts = evolve(C0, np.zeros((1, 1)), d, 5.0, 0.1, ["n_1"])
    assert np.max(np.abs(ts["n_1"] - 1.0)) < 1e-12


def test_dephasing_conserves_particle_number():
    spec = ModelSpec(variant="FourBand", N=13, g1=1.0, g2=0.7)
    h = build_hamiltonian(spec)
    C0 = initial_correlation(ProductStateSpec.one_plus(13))
    d = DissipationSpec(jump_type="Dephasing", sites=resolve_site_preset("CenterFive", 13), gamma=1.5)
    ts = evolve(C0, h, d, 20.0, 0.1, ["trace", "min_eig", "max_eig"])
    assert np.max(np.abs(ts["trace"] - ts["trace"][0])) < 1e-9
    assert ts["min_eig"].min() > -1e-8
    assert ts["max_eig"].max() < 1 + 1e-8
    assert ts.metadata["hermiticity_violation"] < 1e-9


def test_loss_trace_monotone():
    spec = ModelSpec(variant="FourBand", N=9, g1=1.0, g2=0.7)
    h = build_hamiltonian(spec)
    C0 = initial_correlation(ProductStateSpec.one_plus(9))
    d = DissipationSpec(jump_type="Loss", sites=(4, 5), gamma=0.8)
    ts = evolve(C0, h, d, 15.0, 0.1, ["trace"])
    assert np.all(np.diff(ts["trace"]) <= 1e-12)


def test_step_size_convergence_small_chain(monkeypatch):
    spec = ModelSpec(variant="FourBand", N=13, g1=1.0, g2=0.7)
    h = build_hamiltonian(spec)
    C0 = initial_correlation(ProductStateSpec.one_plus(13))
    d = DissipationSpec(jump_type="Dephasing", sites=(6, 7), gamma=1.0)
    ts_fine = evolve(C0, h, d, 10.0, 0.1, ["n_1", "ReC_1N"])
    monkeypatch.setattr(dyn, "RK4_STEP_CAP", 2 * dyn.RK4_STEP_CAP)
    ts_coarse = evolve(C0, h, d, 10.0, 0.1, ["n_1", "ReC_1N"])
    for ch in ("n_1", "ReC_1N"):
        assert np.max(np.abs(ts_fine[ch] - ts_coarse[ch])) < 1e-7


def test_fig2_step_size_convergence(fig2_run, monkeypatch):
    """Doubling the internal step leaves the fig2 observables within 1e-7."""
    cfg = fig2_run.cfg
    from edgesync.dynamics import TimeSeries

    fine = TimeSeries.from_csv(fig2_run.path / "timeseries.csv")
    monkeypatch.setattr(dyn, "RK4_STEP_CAP", 2 * dyn.RK4_STEP_CAP)
    coarse = evolve(initial_correlation(cfg.initial_state), build_hamiltonian(cfg.model),
                    cfg.dissipation, cfg.t_max, cfg.dt, list(cfg.channels))
    worst = max(np.max(np.abs(fine[ch] - coarse[ch])) for ch in cfg.channels)
    assert worst < 1e-7, f"doubled dt_int changes fig2 observables by {worst:.2e}"


def test_integration_failure_reports_time():
    C0 = np.full((2, 2), np.nan, dtype=complex)
    d = DissipationSpec(jump_type="Loss", sites=(1,), gamma=1.0)
    with pytest.raises(IntegrationFailure):
        evolve(C0, np.array([[0.0, 1.0], [1.0, 0.0]]), d, 1.0, 0.1, ["n_1"])


def test_channel_validation():
    with pytest.raises(ConfigurationError):
        channel_extractor("n_99", 10)
    with pytest.raises(ConfigurationError):
        channel_extractor("bogus", 10)
    f = channel_extractor("ReC_2_3", 5)
    X = np.arange(25.0).reshape(5, 5)
    assert f(X, X) == X[1, 2]


def test_site_presets():
    assert resolve_site_preset("CenterTwo", 59) == (29, 30)
    assert resolve_site_preset("CenterFive", 41) == (19, 20, 21, 22, 23)
    bulk = resolve_site_preset("BulkHalf", 41)
    assert bulk == tuple(range(11, 32))
    assert len(bulk) == 21
    with pytest.raises(ConfigurationError):
        resolve_site_preset("CenterFive", 40)
    with pytest.raises(ConfigurationError):
        resolve_site_preset("BulkHalf", 40)


def test_timeseries_csv_roundtrip(tmp_path):
    ts = TimeSeries(t=np.linspace(0, 1, 11),
                    channels={"a": np.linspace(0, 2, 11), "b": np.random.default_rng(0).normal(size=11)})
    path = tmp_path / "ts.csv"
    ts.to_csv(path)
    back = TimeSeries.from_csv(path)
    assert np.array_equal(back.t, ts.t)
    for ch in ts.channels:
        assert np.array_equal(back[ch], ts[ch])


def test_snapshots_recorded():
    h = np.array([[0.0, 1.0], [1.0, 0.0]])
    C0 = np.diag([1.0, 0.0]).astype(complex)
    d = DissipationSpec(jump_type="Dephasing", sites=(), gamma=0.0)
    ts = evolve(C0, h, d, 1.0, 0.1, ["n_1"], snapshot_every=5)
    snaps = ts.metadata["snapshots"]
    assert len(snaps) == 3  # samples 0, 5, 10
    assert snaps[0][1].shape == (2, 2)
