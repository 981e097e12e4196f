"""Physical system definition: donor/acceptor emitters in a single-mode cavity.

Two species of two-level emitters (donors at frequency ``omega_d``, acceptors
at ``omega_a``) couple to one cavity mode via position-dependent strengths
``g_n``.  Everything here lives in the subspace with at most one excitation,
spanned by the shared ground state, the one-photon state, and one excited
state per molecule.  All energies are in eV, all lengths in nm.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

# Fixed basis ordering for the single-excitation space:
# index 0 = ground, index 1 = photon, index 2+n = molecule n (ensemble order).
GROUND = 0
PHOTON = 1


def molecule_state(n: int) -> int:
    """Basis index of the state where only molecule ``n`` is excited."""
    return 2 + n


class Species(enum.Enum):
    DONOR = "donor"
    ACCEPTOR = "acceptor"


class ModelError(ValueError):
    """Invalid physical configuration."""


def _sin_pi(u):
    """sin(pi*u), exact zero when u is an integer.

    np.sin(np.pi) is ~1.2e-16 rather than 0; reducing the argument first makes
    standing-wave profiles vanish identically at their nodes.
    """
    u = np.asarray(u, dtype=float)
    half = np.mod(u, 2.0)
    sign = np.where(half < 1.0, 1.0, -1.0)
    return sign * np.sin(np.pi * np.mod(half, 1.0))


@dataclass(frozen=True)
class Emitter:
    species: Species
    position: float
    transition_frequency: float
    coupling_g: float
    radiative_rate: float


@dataclass(frozen=True)
class EmitterEnsemble:
    """Ordered collection of emitters; order fixes the Hamiltonian basis."""

    entries: tuple[Emitter, ...]

    def __post_init__(self):
        if self.n_donors < 1:
            raise ModelError("need at least one donor")
        for sp, name in ((Species.DONOR, "donor"), (Species.ACCEPTOR, "acceptor")):
            freqs = {e.transition_frequency for e in self.entries if e.species is sp}
            if len(freqs) > 1:
                raise ModelError(f"all {name}s must share one transition frequency, got {sorted(freqs)}")
        for e in self.entries:
            if e.coupling_g < 0 or not math.isfinite(e.coupling_g):
                raise ModelError(f"coupling must be finite and >= 0, got {e.coupling_g}")
            if e.radiative_rate < 0:
                raise ModelError("radiative rate must be >= 0")
        if not any(e.coupling_g > 0 for e in self.entries if e.species is Species.DONOR):
            raise ModelError("at least one donor must couple to the cavity")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def dimension(self) -> int:
        """Hilbert-space dimension of the single-excitation problem."""
        return len(self.entries) + 2

    @property
    def n_donors(self) -> int:
        return sum(e.species is Species.DONOR for e in self.entries)

    @property
    def n_acceptors(self) -> int:
        return sum(e.species is Species.ACCEPTOR for e in self.entries)

    def species_mask(self, species: Species) -> np.ndarray:
        return np.array([e.species is species for e in self.entries])

    def positions(self) -> np.ndarray:
        return np.array([e.position for e in self.entries])

    def couplings(self) -> np.ndarray:
        return np.array([e.coupling_g for e in self.entries])

    def frequencies(self) -> np.ndarray:
        return np.array([e.transition_frequency for e in self.entries])

    def radiative_rates(self) -> np.ndarray:
        return np.array([e.radiative_rate for e in self.entries])

    def transition_frequency(self, species: Species) -> float:
        for e in self.entries:
            if e.species is species:
                return e.transition_frequency
        raise ModelError(f"no {species.value}s present")

    def collective_coupling(self, species: Species) -> float:
        """sqrt(sum g_n^2) over one species."""
        g = self.couplings()[self.species_mask(species)]
        return float(np.sqrt((g**2).sum()))

    def rabi_frequency(self) -> float:
        """Collective donor coupling sqrt(sum_donors g_n^2)."""
        return self.collective_coupling(Species.DONOR)

    def participation(self, species: Species) -> float:
        """Inverse participation ratio sum g^4 / (sum g^2)^2 of one species.

        Equals 1/N for uniform couplings; enters the secular transition rates
        in place of 1/N for non-uniform mode profiles.
        """
        g = self.couplings()[self.species_mask(species)]
        s2 = (g**2).sum()
        if s2 == 0.0:
            raise ModelError(f"{species.value} collective coupling is zero")
        return float((g**4).sum() / s2**2)

    def bright_weights(self, species: Species) -> np.ndarray:
        """Full-space unit vector of the g-weighted collective state of one species."""
        v = np.zeros(self.dimension)
        mask = self.species_mask(species)
        g = self.couplings()
        norm = self.collective_coupling(species)
        if norm == 0.0:
            raise ModelError(f"{species.value} collective coupling is zero")
        for n, on in enumerate(mask):
            if on:
                v[molecule_state(n)] = g[n] / norm
        return v


@dataclass(frozen=True)
class CavityConfig:
    """Single cavity mode: frequency, loss and spatial coupling profile.

    ``mode_profile`` is one of the strings "fundamental" (half sine over the
    region), "second" (full sine period, node at the region center), "uniform",
    or an explicit sequence of per-molecule weights.
    """

    frequency: float
    loss_kappa: float
    mode_profile: str | tuple[float, ...] = "fundamental"
    region_length: float = 100.0
    wall_width: float = 10.0
    wall_center: float | None = None

    def __post_init__(self):
        if self.loss_kappa <= 0:
            raise ModelError("cavity loss kappa must be > 0")
        if self.region_length <= 0:
            raise ModelError("region length must be > 0")
        if not 0 <= self.wall_width < self.region_length:
            raise ModelError("wall width must satisfy 0 <= d < L")
        if isinstance(self.mode_profile, str):
            if self.mode_profile not in ("fundamental", "second", "uniform"):
                raise ModelError(f"unknown mode profile {self.mode_profile!r}")
        else:
            object.__setattr__(self, "mode_profile", tuple(float(w) for w in self.mode_profile))
        if self.mode_profile == "second" and self.wall_width > 0:
            w = profile_weights("second", np.array([self.barrier_position]), self.region_length)
            if abs(w[0]) > 1e-12:
                raise ModelError("second-mode profile must vanish at the dividing wall")

    @property
    def barrier_position(self) -> float:
        return self.region_length / 2.0 if self.wall_center is None else self.wall_center


def profile_weights(mode_profile, positions: np.ndarray, region_length: float) -> np.ndarray:
    """Evaluate the (non-negative) coupling weight of a mode profile.

    The sign of a standing-wave lobe is a local gauge of the emitter operators
    and does not affect the spectrum, so the magnitude is returned.
    """
    positions = np.asarray(positions, dtype=float)
    if np.any(positions < 0) or np.any(positions > region_length):
        raise ModelError("emitter positions must lie inside [0, region_length]")
    if isinstance(mode_profile, str):
        if mode_profile == "fundamental":
            return np.abs(_sin_pi(positions / region_length))
        if mode_profile == "second":
            return np.abs(_sin_pi(2.0 * positions / region_length))
        if mode_profile == "uniform":
            return np.ones_like(positions)
        raise ModelError(f"unknown mode profile {mode_profile!r}")
    weights = np.asarray(mode_profile, dtype=float)
    if weights.shape != positions.shape:
        raise ModelError("explicit profile must provide one weight per molecule")
    if np.any(weights < 0):
        raise ModelError("explicit profile weights must be >= 0")
    return weights


def coupling_profile(mode_profile, positions, donor_mask, target_rabi: float,
                     region_length: float) -> np.ndarray:
    """Per-molecule couplings g_n following a mode profile.

    One proportionality constant (shared by both species) is fixed so that the
    donor collective coupling sqrt(sum_donors g_n^2) equals ``target_rabi``
    exactly.
    """
    if target_rabi <= 0:
        raise ModelError("target Rabi frequency must be > 0")
    positions = np.asarray(positions, dtype=float)
    donor_mask = np.asarray(donor_mask, dtype=bool)
    w = profile_weights(mode_profile, positions, region_length)
    donor_norm = np.sqrt((w[donor_mask] ** 2).sum())
    if donor_norm == 0.0:
        raise ModelError("mode profile vanishes on every donor; cannot normalize")
    return (target_rabi / donor_norm) * w


def separated_positions(n_donors: int, n_acceptors: int, length: float,
                        wall_width: float) -> tuple[np.ndarray, np.ndarray]:
    """Donors on [0, (L-d)/2), acceptors mirrored on ((L+d)/2, L], evenly spaced."""
    half = (length - wall_width) / 2.0
    donors = (np.arange(n_donors) + 0.5) * half / n_donors
    acceptors = length - donors[::-1] if n_acceptors == n_donors else \
        length - ((np.arange(n_acceptors)[::-1] + 0.5) * half / n_acceptors)
    return donors, acceptors


def intermixed_positions(n_donors: int, n_acceptors: int, length: float,
                         wall_width: float) -> tuple[np.ndarray, np.ndarray]:
    """Donors and acceptors interleaved over the full cavity length.

    Each separated-layout position is dilated by 2, which maps the second-mode
    weight at x onto the fundamental-mode weight at 2x.  Both default layouts
    therefore realize the same multiset of couplings, so observables that
    depend on the couplings only through collective quantities are unchanged,
    and ones that do not are still directly comparable.
    """
    sep_d, _ = separated_positions(n_donors, n_acceptors, length, wall_width)
    sep_a_src, _ = separated_positions(n_acceptors, n_donors, length, wall_width)
    donors = 2.0 * sep_d
    acceptors = np.sort(length - 2.0 * sep_a_src)
    return donors, acceptors


def make_system(n_donors: int = 16, n_acceptors: int = 16, omega_d: float = 2.1,
                omega_a: float = 1.88, omega_c: float = 2.1, rabi: float = 0.16,
                kappa: float = 0.01, gamma_rad: float = 1.3e-6,
                layout: str = "separated", profile: str = "second",
                length: float = 100.0, wall_width: float = 10.0,
                ) -> tuple[EmitterEnsemble, CavityConfig]:
    """Assemble the standard two-species system for a given geometry.

    ``layout`` is "separated" (donors and acceptors on opposite sides of a
    wall of width ``wall_width``) or "intermixed" (interleaved over the full
    length).  ``profile`` selects the coupling profile: "second" pairs
    naturally with the separated layout (node at the wall), "fundamental"
    with the intermixed one, "uniform" ignores positions.
    """
    if layout == "separated":
        xd, xa = separated_positions(n_donors, n_acceptors, length, wall_width)
    elif layout == "intermixed":
        xd, xa = intermixed_positions(n_donors, n_acceptors, length, wall_width)
    else:
        raise ModelError(f"unknown layout {layout!r}")

    cavity = CavityConfig(frequency=omega_c, loss_kappa=kappa, mode_profile=profile,
                          region_length=length, wall_width=wall_width)

    if layout == "intermixed":
        order = np.argsort(np.concatenate([xd, xa]), kind="stable")
    else:
        order = np.arange(n_donors + n_acceptors)
    species = [Species.DONOR] * n_donors + [Species.ACCEPTOR] * n_acceptors
    positions = np.concatenate([xd, xa])
    species = [species[i] for i in order]
    positions = positions[order]

    donor_mask = np.array([sp is Species.DONOR for sp in species])
    g = coupling_profile(profile, positions, donor_mask, rabi, length)

    entries = tuple(
        Emitter(species=sp, position=float(x),
                transition_frequency=omega_d if sp is Species.DONOR else omega_a,
                coupling_g=float(gn), radiative_rate=gamma_rad)
        for sp, x, gn in zip(species, positions, g)
    )
    return EmitterEnsemble(entries), cavity


def single_excitation_hamiltonian(omega_c: float, frequencies, couplings) -> np.ndarray:
    """Single-excitation Hamiltonian from raw arrays (no ensemble validation).

    Basis: ground, photon, molecules.  Diagonal carries 0, omega_c and the
    molecular frequencies; the photon row/column carries the couplings.  The
    ground-state energy is fixed at zero (number-operator form of the emitter
    energies), and there is no direct molecule-molecule coupling.
    """
    frequencies = np.asarray(frequencies, dtype=float)
    couplings = np.asarray(couplings, dtype=float)
    if frequencies.shape != couplings.shape:
        raise ModelError("frequencies and couplings must have matching shapes")
    if not (np.all(np.isfinite(frequencies)) and np.all(np.isfinite(couplings))
            and math.isfinite(omega_c)):
        raise ModelError("non-finite Hamiltonian input")
    n = len(frequencies)
    h = np.zeros((n + 2, n + 2), dtype=complex)
    h[PHOTON, PHOTON] = omega_c
    for i in range(n):
        m = molecule_state(i)
        h[m, m] = frequencies[i]
        h[PHOTON, m] = couplings[i]
        h[m, PHOTON] = couplings[i]
    return h


def build_hamiltonian(ensemble: EmitterEnsemble, cavity: CavityConfig) -> np.ndarray:
    """Rotating-wave Hamiltonian of the coupled cavity-emitter system."""
    return single_excitation_hamiltonian(cavity.frequency, ensemble.frequencies(),
                                         ensemble.couplings())
