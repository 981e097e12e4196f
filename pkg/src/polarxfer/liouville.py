"""Open-system dynamics: Redfield relaxation, Lindblad losses, driven steady state.

Vibrational relaxation follows the full (non-secular) Redfield construction
with the local excitation-number operator |n><n| of each molecule as the
system side of the coupling and the one-sided, zero-temperature spectral
density of its species as the bath side.  Imaginary (frequency-shift) parts
are dropped; the resulting generator is trace preserving and maps Hermitian
matrices to Hermitian matrices.  Cavity leakage and radiative decay enter as
standard Lindblad dissipators.  Coherent pumping of the cavity is treated in
the frame rotating at the drive frequency, where the whole generator is time
independent: every dissipative coupling operator either conserves or lowers
the total excitation number, so the dissipators keep their lab-frame form.

Superoperators are dense (d^2, d^2) matrices acting on row-major flattened
density matrices.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .baths import BathSet, spectral_density
from .polaritons import POLARITON_NAMES, PolaritonDecomposition, decompose
from .system import (GROUND, PHOTON, CavityConfig, EmitterEnsemble, ModelError,
                     Species, build_hamiltonian, molecule_state)

RATE_FLOOR = -1e-14
RESIDUAL_TOL = 1e-10
TRACE_TOL = 1e-10
HERMITICITY_TOL = 1e-12
POSITIVITY_TOL = -1e-10
POPULATION_TOL = -1e-12
EMISSION_FLOOR = 1e-14


class SteadyStateError(RuntimeError):
    """Steady-state solve failed or violated a physicality bound."""


class NoEmissionError(RuntimeError):
    """All cavity-weighted polariton populations vanish."""


def vec(rho: np.ndarray) -> np.ndarray:
    """Row-major flattening of a density matrix."""
    return np.asarray(rho).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    d = math.isqrt(v.size)
    return np.asarray(v).reshape(d, d)


def apply_superop(superop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return unvec(superop @ vec(rho))


@dataclass(frozen=True)
class DriveParams:
    """Coherent cavity pump: amplitude and laser frequency (eV).

    ``frequency=None`` means "lock to the upper polariton"; it is resolved
    once the polariton energies are known.
    """

    amplitude: float = 1e-4
    frequency: float | None = None

    def __post_init__(self):
        if self.amplitude < 0:
            raise ModelError("drive amplitude must be >= 0")
        if self.frequency is not None and self.frequency <= 0:
            raise ModelError("drive frequency must be > 0")


def _checked_rates(values: np.ndarray) -> np.ndarray:
    """Clamp roundoff-negative rates to zero; larger negatives are a bug."""
    if np.any(values < RATE_FLOOR):
        raise ModelError(f"spectral density produced a negative rate < {RATE_FLOOR}")
    return np.where(values < 0.0, 0.0, values)


def build_redfield_generator(hamiltonian: np.ndarray, ensemble: EmitterEnsemble,
                             baths: BathSet) -> np.ndarray:
    """Non-secular Redfield superoperator for the molecular vibrational baths.

    Built in the Hamiltonian eigenbasis and returned in the site basis.  With
    half-transformed bath operators L_n the generator acts as

        rho -> sum_n [L_n rho, A_n] + [A_n, rho L_n^dag],

    where A_n = |n><n| and (L_n)_ab = A_ab * S_n(w_b - w_a) / 2.  Rates for
    uphill gaps vanish (zero-temperature closure), so populations only flow
    downward in energy.
    """
    h = np.asarray(hamiltonian)
    d = h.shape[0]
    if h.shape != (d, d) or d != ensemble.dimension:
        raise ModelError("Hamiltonian dimension does not match the ensemble")
    energies, vecs = np.linalg.eigh(h)
    gaps = energies[None, :] - energies[:, None]  # gaps[a, b] = w_b - w_a
    smat = {
        sp: _checked_rates(spectral_density(gaps, baths.for_species(sp)))
        for sp in (Species.DONOR, Species.ACCEPTOR)
        if ensemble.species_mask(sp).any()
    }

    gen = np.zeros((d, d, d, d), dtype=complex)
    ktot = np.zeros((d, d), dtype=complex)
    idx = np.arange(d)
    for n, emitter in enumerate(ensemble.entries):
        s = molecule_state(n)
        row = vecs[s, :]
        a_eig = np.outer(row.conj(), row)
        lam = vecs @ (0.5 * a_eig * smat[emitter.species]) @ vecs.conj().T
        gen[:, s, :, s] += lam            # L_n rho A_n
        gen[s, :, s, :] += lam.conj()     # A_n rho L_n^dag
        ktot[s, :] += lam[s, :]           # sum_n A_n L_n (row n of L_n)
    gen[:, idx, :, idx] -= ktot[None, :, :]        # -(sum A L) rho
    gen[idx, :, idx, :] -= ktot.conj()[None, :, :]  # -rho (sum L^dag A)
    return gen.reshape(d * d, d * d)


def lindblad_from_channels(dim: int, channels) -> np.ndarray:
    """Lindblad superoperator for decay channels (excited index, rate) to ground.

    Each channel is the dissipator of the lowering operator |ground><m| with
    the given rate; trace preserving by construction.
    """
    gen = np.zeros((dim, dim, dim, dim), dtype=complex)
    idx = np.arange(dim)
    for m, rate in channels:
        if rate < 0:
            raise ModelError("Lindblad rates must be >= 0")
        gen[GROUND, GROUND, m, m] += rate
        gen[m, idx, m, idx] -= rate / 2.0
        gen[idx, m, idx, m] -= rate / 2.0
    return gen.reshape(dim * dim, dim * dim)


def build_lindblad_generator(ensemble: EmitterEnsemble, cavity: CavityConfig) -> np.ndarray:
    """Lindblad dissipators for cavity leakage and radiative molecular decay.

    Jump operators are the photon annihilation (rate kappa) and each molecular
    lowering operator (its radiative rate); in the single-excitation space all
    of them map one excited state onto the ground state.
    """
    channels = [(PHOTON, cavity.loss_kappa)]
    channels += [(molecule_state(n), e.radiative_rate) for n, e in enumerate(ensemble.entries)]
    return lindblad_from_channels(ensemble.dimension, channels)


def assemble_liouvillian(hamiltonian: np.ndarray, drive: DriveParams,
                         redfield: np.ndarray | None = None,
                         lindblad: np.ndarray | None = None) -> np.ndarray:
    """Total generator in the frame rotating at the drive frequency.

    The coherent part is H - w_P * (excitation number) plus the pump term
    coupling ground and photon states with strength ``drive.amplitude``; the
    dissipative parts are added unchanged (frame invariant, see module
    docstring).
    """
    if drive.frequency is None:
        raise ModelError("drive frequency must be resolved before assembling the generator")
    h = np.array(hamiltonian, dtype=complex)
    d = h.shape[0]
    number = np.ones(d)
    number[GROUND] = 0.0
    h_rot = h - drive.frequency * np.diag(number)
    h_rot[GROUND, PHOTON] += drive.amplitude
    h_rot[PHOTON, GROUND] += drive.amplitude

    eye = np.eye(d)
    total = -1j * (np.kron(h_rot, eye) - np.kron(eye, h_rot.T))
    for part in (redfield, lindblad):
        if part is not None:
            if part.shape != (d * d, d * d):
                raise ModelError("superoperator dimension mismatch")
            total = total + part
    return total


def solve_steady_density(liouvillian: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit-trace null vector of the generator via a dense linear solve.

    One scalar equation (the ground-population row) is replaced by the trace
    constraint.  The residual of the untouched generator is verified against
    RESIDUAL_TOL times its Frobenius norm; failure of either the solve or the
    residual check signals a nullspace that is not one-dimensional.
    """
    dim2 = liouvillian.shape[0]
    d = math.isqrt(dim2)
    if d * d != dim2:
        raise ModelError("superoperator size is not a perfect square")
    m = liouvillian.copy()
    m[0, :] = 0.0
    m[0, np.arange(d) * (d + 1)] = 1.0
    rhs = np.zeros(dim2, dtype=complex)
    rhs[0] = 1.0
    try:
        x = scipy.linalg.solve(m, rhs)
    except scipy.linalg.LinAlgError as exc:
        raise SteadyStateError(f"steady-state system is singular ({exc}); "
                               "generator nullspace is not one-dimensional") from exc
    residual = float(np.linalg.norm(liouvillian @ x))
    scale = float(np.linalg.norm(liouvillian, "fro"))
    if residual > RESIDUAL_TOL * scale:
        raise SteadyStateError(
            f"steady-state residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e} * |L| = "
            f"{RESIDUAL_TOL * scale:.3e}")
    return unvec(x), residual


def _validate_density(rho: np.ndarray) -> None:
    trace = float(rho.trace().real)
    if abs(trace - 1.0) > TRACE_TOL:
        raise SteadyStateError(f"steady-state trace {trace} deviates from 1")
    herm = float(np.abs(rho - rho.conj().T).max())
    if herm > HERMITICITY_TOL:
        raise SteadyStateError(f"steady state not Hermitian (max asymmetry {herm:.3e})")
    lowest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2.0).min())
    if lowest < POSITIVITY_TOL:
        raise SteadyStateError(f"steady state has negative eigenvalue {lowest:.3e}")


@dataclass(frozen=True)
class SteadyState:
    """Steady density matrix with polariton/dark populations and efficiency."""

    density_matrix: np.ndarray
    populations: dict[str, float]
    transfer_efficiency: float | None
    residual_norm: float

    def population(self, name: str) -> float:
        return self.populations[name]

    def to_report(self, decomposition: PolaritonDecomposition) -> dict:
        b2 = decomposition.hopfield_squares
        return {
            "energies_ev": {a: decomposition.energy(a) for a in POLARITON_NAMES},
            "hopfield_squares": {
                a: {c: float(b2[i, j]) for j, c in enumerate(("cavity", "donor", "acceptor"))}
                for i, a in enumerate(POLARITON_NAMES)
            },
            "populations": dict(self.populations),
            "transfer_efficiency": self.transfer_efficiency,
            "residual_norm": self.residual_norm,
        }


def polariton_populations(rho: np.ndarray, decomposition: PolaritonDecomposition,
                          ensemble: EmitterEnsemble) -> dict[str, float]:
    """Diagonal weights on polaritons, dark manifolds and the ground state."""
    pops = {}
    for i, alpha in enumerate(POLARITON_NAMES):
        v = decomposition.bright_vectors[i]
        pops[alpha] = float((v.conj() @ rho @ v).real)
    for species, name in ((Species.DONOR, "dark_donor"), (Species.ACCEPTOR, "dark_acceptor")):
        mask = ensemble.species_mask(species)
        if not mask.any():
            pops[name] = 0.0
            continue
        site_sum = sum(rho[molecule_state(n), molecule_state(n)].real
                       for n in range(len(ensemble)) if mask[n])
        bright = ensemble.bright_weights(species)
        pops[name] = float(site_sum - (bright.conj() @ rho @ bright).real)
    pops["ground"] = float(rho[GROUND, GROUND].real)
    return pops


def steady_state(liouvillian: np.ndarray, decomposition: PolaritonDecomposition,
                 ensemble: EmitterEnsemble) -> SteadyState:
    """Solve for the steady state and derive populations and efficiency."""
    rho, residual = solve_steady_density(liouvillian)
    _validate_density(rho)
    pops = polariton_populations(rho, decomposition, ensemble)
    if min(pops.values()) < POPULATION_TOL:
        raise SteadyStateError(f"negative population beyond tolerance: {pops}")
    state = SteadyState(density_matrix=rho, populations=pops,
                        transfer_efficiency=None, residual_norm=residual)
    try:
        efficiency = transfer_efficiency(state, decomposition)
    except NoEmissionError:
        efficiency = None
    return SteadyState(density_matrix=rho, populations=pops,
                       transfer_efficiency=efficiency, residual_norm=residual)


def transfer_efficiency(state: SteadyState, decomposition: PolaritonDecomposition) -> float:
    """Fraction of the cavity-filtered emission exiting via the lower polariton.

    T = b_LC^2 P_L / sum_alpha b_aC^2 P_a; the cavity loss rate multiplies
    numerator and denominator alike and cancels.
    """
    weighted = [decomposition.cavity_weight(a) * max(state.populations[a], 0.0)
                for a in POLARITON_NAMES]
    denominator = sum(weighted)
    if denominator < EMISSION_FLOOR:
        raise NoEmissionError("no emission: cavity-weighted polariton populations all vanish")
    return weighted[0] / denominator


@dataclass(frozen=True)
class LiouvilleProblem:
    """Assembled open-system problem; ``solve`` yields the steady state."""

    ensemble: EmitterEnsemble
    cavity: CavityConfig
    baths: BathSet
    drive: DriveParams
    hamiltonian: np.ndarray
    decomposition: PolaritonDecomposition
    redfield: np.ndarray
    lindblad: np.ndarray
    liouvillian: np.ndarray

    @classmethod
    def build(cls, ensemble: EmitterEnsemble, cavity: CavityConfig, baths: BathSet,
              drive: DriveParams) -> "LiouvilleProblem":
        hamiltonian = build_hamiltonian(ensemble, cavity)
        decomposition = decompose(ensemble, cavity)
        if drive.frequency is None:
            drive = DriveParams(amplitude=drive.amplitude,
                                frequency=decomposition.omega_up)
        if drive.amplitude > cavity.loss_kappa / 10.0:
            warnings.warn("drive amplitude exceeds kappa/10; the single-excitation "
                          "truncation assumes a weak pump", stacklevel=2)
        redfield = build_redfield_generator(hamiltonian, ensemble, baths)
        lindblad = build_lindblad_generator(ensemble, cavity)
        liouvillian = assemble_liouvillian(hamiltonian, drive, redfield, lindblad)
        return cls(ensemble=ensemble, cavity=cavity, baths=baths, drive=drive,
                   hamiltonian=hamiltonian, decomposition=decomposition,
                   redfield=redfield, lindblad=lindblad, liouvillian=liouvillian)

    def solve(self) -> SteadyState:
        return steady_state(self.liouvillian, self.decomposition, self.ensemble)
