import numpy as np
import pytest
import scipy.linalg

import polarxfer as px
from polarxfer.liouville import vec, unvec
from polarxfer.system import molecule_state

from oracles import EigenLevels


def small_problem(omega_vd=None, omega_va=None, amplitude=1e-4, kappa=0.01,
                  n=4, profile="second", layout="separated"):
    ensemble, cavity = px.make_system(n_donors=n, n_acceptors=n, kappa=kappa,
                                      profile=profile, layout=layout)
    dec = px.decompose(ensemble, cavity)
    gaps = dec.resonance_gaps()
    baths = px.make_baths(omega_vd or gaps["up_minus_donor"],
                          omega_va or gaps["mp_minus_acceptor"])
    drive = px.DriveParams(amplitude=amplitude)
    return px.LiouvilleProblem.build(ensemble, cavity, baths, drive)


def random_density(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / rho.trace()


# ---------------------------------------------------------------- generators

def test_zero_dephasing_gives_zero_generator(small_system):
    ensemble, cavity = small_system
    h = px.build_hamiltonian(ensemble, cavity)
    baths = px.make_baths(0.2, 0.13, gamma_phi=0.0)
    r = px.build_redfield_generator(h, ensemble, baths)
    assert np.max(np.abs(r)) == 0.0


def test_decoupled_molecule_contributes_nothing():
    # donor 2 has zero coupling: its site state is an exact eigenstate and its
    # bath cannot move population anywhere (the spectral density vanishes at
    # zero gap).
    entries = (
        px.Emitter(px.Species.DONOR, 10.0, 2.1, 0.1, 0.0),
        px.Emitter(px.Species.DONOR, 20.0, 2.1, 0.0, 0.0),
        px.Emitter(px.Species.ACCEPTOR, 90.0, 1.88, 0.1, 0.0),
    )
    ensemble = px.EmitterEnsemble(entries)
    cavity = px.CavityConfig(frequency=2.1, loss_kappa=0.01)
    h = px.build_hamiltonian(ensemble, cavity)
    r = px.build_redfield_generator(h, ensemble, px.make_baths(0.2, 0.13))
    d = ensemble.dimension
    site = np.zeros((d, d), dtype=complex)
    site[molecule_state(1), molecule_state(1)] = 1.0
    assert np.max(np.abs(px.apply_superop(r, site))) < 1e-15


def test_generator_trace_and_hermiticity_preservation(rng):
    for _ in range(10):
        n_d = int(rng.integers(1, 5))
        n_a = int(rng.integers(1, 5))
        ensemble, cavity = px.make_system(
            n_donors=n_d, n_acceptors=n_a, rabi=float(rng.uniform(0.05, 0.3)))
        h = px.build_hamiltonian(ensemble, cavity)
        baths = px.make_baths(float(rng.uniform(0.05, 0.5)), float(rng.uniform(0.05, 0.5)))
        gen = px.build_redfield_generator(h, ensemble, baths) \
            + px.build_lindblad_generator(ensemble, cavity)
        for _ in range(10):
            rho = random_density(rng, ensemble.dimension)
            out = px.apply_superop(gen, rho)
            assert abs(out.trace()) <= 1e-12 * np.linalg.norm(rho)
            assert np.max(np.abs(out - out.conj().T)) < 1e-12


def test_lindblad_photon_decay_rate(small_system):
    # kappa-only channel, no Hamiltonian: photon population decays as exp(-kappa t)
    ensemble, _ = small_system
    d = ensemble.dimension
    kappa = 0.01
    gen = px.lindblad_from_channels(d, [(1, kappa)])
    rho0 = np.zeros((d, d), dtype=complex)
    rho0[1, 1] = 1.0
    t = 37.0
    rho_t = unvec(scipy.linalg.expm(gen * t) @ vec(rho0))
    assert rho_t[1, 1].real == pytest.approx(np.exp(-kappa * t), rel=1e-10)
    assert rho_t[0, 0].real == pytest.approx(1 - np.exp(-kappa * t), rel=1e-10)


def test_lindblad_all_rates_zero_is_zero():
    gen = px.lindblad_from_channels(5, [(1, 0.0), (2, 0.0)])
    assert np.max(np.abs(gen)) == 0.0


def test_lindblad_annihilates_ground_state(small_system):
    ensemble, cavity = small_system
    gen = px.build_lindblad_generator(ensemble, cavity)
    rho = np.zeros((ensemble.dimension,) * 2, dtype=complex)
    rho[0, 0] = 1.0
    assert np.max(np.abs(px.apply_superop(gen, rho))) == 0.0


def test_lindblad_rejects_negative_rate():
    with pytest.raises(px.ModelError):
        px.lindblad_from_channels(4, [(1, -0.1)])


def test_redfield_dimension_mismatch(small_system):
    ensemble, _ = small_system
    with pytest.raises(px.ModelError):
        px.build_redfield_generator(np.eye(3), ensemble, px.make_baths(0.2, 0.13))


# ------------------------------------------------------- assembled generator

def test_liouvillian_preserves_trace():
    problem = small_problem()
    d = problem.ensemble.dimension
    trace_vector = np.zeros(d * d)
    trace_vector[np.arange(d) * (d + 1)] = 1.0
    assert np.max(np.abs(trace_vector @ problem.liouvillian)) < 1e-12


def test_drive_requires_frequency(small_system):
    ensemble, cavity = small_system
    h = px.build_hamiltonian(ensemble, cavity)
    with pytest.raises(px.ModelError):
        px.assemble_liouvillian(h, px.DriveParams(amplitude=1e-4, frequency=None))


def test_strong_drive_warns(small_system):
    ensemble, cavity = small_system
    dec = px.decompose(ensemble, cavity)
    baths = px.make_baths(0.2, 0.13)
    with pytest.warns(UserWarning):
        px.LiouvilleProblem.build(ensemble, cavity, baths,
                                  px.DriveParams(amplitude=0.005))


def test_undriven_steady_state_is_ground_projector():
    problem = small_problem(amplitude=0.0)
    state = problem.solve()
    d = problem.ensemble.dimension
    expected = np.zeros((d, d))
    expected[0, 0] = 1.0
    assert np.max(np.abs(state.density_matrix - expected)) < 1e-12
    assert state.transfer_efficiency is None
    with pytest.raises(px.NoEmissionError):
        px.transfer_efficiency(state, problem.decomposition)


def test_resonant_pumping_dominates_with_detuned_baths():
    # vibrational baths far off every gap: pumping at the UP leaves it the
    # most populated polariton
    problem = small_problem(omega_vd=1.4, omega_va=1.5)
    state = problem.solve()
    assert state.populations["up"] > state.populations["mp"]
    assert state.populations["up"] > state.populations["lp"]


def test_weak_drive_quadratic_scaling():
    state1 = small_problem(amplitude=1e-5).solve()
    state2 = small_problem(amplitude=2e-5).solve()
    for level in ("lp", "mp", "up", "dark_donor", "dark_acceptor"):
        p1, p2 = state1.populations[level], state2.populations[level]
        assert p2 == pytest.approx(4 * p1, rel=0.01)
    assert abs(state1.transfer_efficiency - state2.transfer_efficiency) < 1e-3


def test_steady_state_physicality():
    state = small_problem().solve()
    rho = state.density_matrix
    assert abs(rho.trace().real - 1.0) < 1e-10
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
    assert np.linalg.eigvalsh(rho).min() >= -1e-10
    assert min(state.populations.values()) >= -1e-12
    assert 0.0 <= state.transfer_efficiency <= 1.0


def test_singular_generator_rejected(small_system):
    # no losses and no drive: every eigenstate projector is steady, so the
    # nullspace is not one-dimensional
    ensemble, cavity = small_system
    h = px.build_hamiltonian(ensemble, cavity)
    liouvillian = px.assemble_liouvillian(h, px.DriveParams(amplitude=0.0, frequency=2.1))
    with pytest.raises(px.SteadyStateError):
        px.solve_steady_density(liouvillian)


def test_secular_rates_match_generator_extraction(small_system):
    # golden-rule elements of the non-secular generator equal the closed-form
    # network rates (here: the UP -> dark-donor channel; the acceptance suite
    # sweeps all nine)
    ensemble, cavity = small_system
    dec = px.decompose(ensemble, cavity)
    baths = px.make_baths(dec.resonance_gaps()["up_minus_donor"],
                          dec.resonance_gaps()["mp_minus_acceptor"])
    h = px.build_hamiltonian(ensemble, cavity)
    r = px.build_redfield_generator(h, ensemble, baths)
    levels = EigenLevels(h, dec.energies, 2.1, 1.88)
    extracted = levels.manifold_rate_from_polariton(r, levels.polaritons[2],
                                                    levels.dark_donor)
    analytic = px.rate_polariton_to_dark("up", px.Species.DONOR, dec, baths)
    assert extracted == pytest.approx(analytic, rel=1e-8)


# ------------------------------------------------------------- efficiencies

def make_state(populations):
    return px.SteadyState(density_matrix=np.eye(2), populations=populations,
                          transfer_efficiency=None, residual_norm=0.0)


def test_transfer_efficiency_limits(baseline_decomposition):
    dec = baseline_decomposition
    only_lp = make_state({"lp": 1e-3, "mp": 0.0, "up": 0.0})
    assert px.transfer_efficiency(only_lp, dec) == 1.0
    no_lp = make_state({"lp": 0.0, "mp": 1e-3, "up": 2e-3})
    assert px.transfer_efficiency(no_lp, dec) == 0.0


def test_transfer_efficiency_equal_weights():
    dec_stub = type("Dec", (), {"cavity_weight": staticmethod(lambda a: 0.25)})()
    state = make_state({"lp": 1e-3, "mp": 1e-3, "up": 1e-3})
    assert px.transfer_efficiency(state, dec_stub) == pytest.approx(1 / 3, rel=1e-12)


def test_transfer_efficiency_no_emission(baseline_decomposition):
    state = make_state({"lp": 0.0, "mp": 0.0, "up": 0.0})
    with pytest.raises(px.NoEmissionError):
        px.transfer_efficiency(state, baseline_decomposition)


# ------------------------------------------------ cross-engine sanity checks

def test_secular_consistency_at_resonance_lines(baseline_system, baseline_decomposition):
    ensemble, cavity = baseline_system
    dec = baseline_decomposition
    gaps = dec.resonance_gaps()
    points = [
        (gaps["up_minus_donor"], gaps["mp_minus_acceptor"]),
        (gaps["up_minus_donor"], 0.30),
        (0.30, gaps["up_minus_acceptor"]),
        (gaps["up_minus_lp"], 0.30),
        (0.30, gaps["mp_minus_acceptor"]),
    ]
    for omega_vd, omega_va in points:
        baths = px.make_baths(omega_vd, omega_va)
        state = px.LiouvilleProblem.build(ensemble, cavity, baths, px.DriveParams()).solve()
        network = px.build_rate_network(dec, baths, kappa=cavity.loss_kappa,
                                        gamma_donor=1.3e-6, gamma_acceptor=1.3e-6)
        solution = px.solve_network(network)
        assert abs(state.transfer_efficiency - solution.transfer_efficiency) <= 0.05


def test_arrangement_independence_single_point():
    state_sep = small_problem(n=8, profile="second", layout="separated").solve()
    state_mix = small_problem(n=8, profile="fundamental", layout="intermixed").solve()
    assert abs(state_sep.transfer_efficiency - state_mix.transfer_efficiency) <= 1e-6
