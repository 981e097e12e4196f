"""Vibrational reservoir spectral densities.

Each molecule couples to a local vibrational bath described by a Lorentzian
profile that vanishes at zero frequency,

    S(w) = gamma_phi * (w / omega_v) * xi^2 / ((w - omega_v)^2 + xi^2),

taken at zero temperature: S(w) = 0 for w <= 0, so only downhill transitions
occur.  At the peak w = omega_v the prefactor is 1 and S = gamma_phi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .system import ModelError, Species


@dataclass(frozen=True)
class SpectralDensityParams:
    gamma_phi: float
    omega_v: float
    xi: float
    species: Species

    def __post_init__(self):
        if self.gamma_phi < 0:
            raise ModelError("gamma_phi must be >= 0")
        if self.omega_v <= 0:
            raise ModelError("omega_v must be > 0")
        if self.xi <= 0:
            raise ModelError("xi must be > 0")


def spectral_density(omega, params: SpectralDensityParams):
    """Bath spectral density at frequency ``omega`` (scalar or array, eV)."""
    om = np.asarray(omega, dtype=float)
    value = params.gamma_phi * (om / params.omega_v) * params.xi**2 \
        / ((om - params.omega_v) ** 2 + params.xi**2)
    out = np.where(om > 0.0, value, 0.0)
    return float(out) if np.isscalar(omega) else out


@dataclass(frozen=True)
class BathSet:
    """One spectral density per species."""

    donor: SpectralDensityParams
    acceptor: SpectralDensityParams

    def __post_init__(self):
        if self.donor.species is not Species.DONOR or self.acceptor.species is not Species.ACCEPTOR:
            raise ModelError("bath species labels do not match their slots")

    def for_species(self, species: Species) -> SpectralDensityParams:
        return self.donor if species is Species.DONOR else self.acceptor


def make_baths(omega_vd: float, omega_va: float, gamma_phi: float = 0.013,
               xi: float = 0.01) -> BathSet:
    return BathSet(
        donor=SpectralDensityParams(gamma_phi, omega_vd, xi, Species.DONOR),
        acceptor=SpectralDensityParams(gamma_phi, omega_va, xi, Species.ACCEPTOR),
    )
