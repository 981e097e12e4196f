"""Bright-subspace diagonalization: polariton energies and Hopfield weights.

The cavity state together with the two g-weighted collective molecular states
spans an invariant three-dimensional subspace of the full Hamiltonian, so the
three polaritons (lower/middle/upper) come from a 3x3 arrowhead matrix.  The
remaining molecular eigenstates are dark: N-1 per species, degenerate at the
bare transition frequencies, with no photon amplitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .system import CavityConfig, EmitterEnsemble, ModelError, Species, build_hamiltonian

POLARITON_NAMES = ("lp", "mp", "up")
COMPONENT_NAMES = ("cavity", "donor", "acceptor")


@dataclass(frozen=True)
class PolaritonDecomposition:
    """Energies and composition of the three polaritons plus dark-manifold data.

    ``hopfield`` holds real amplitudes, rows ordered (LP, MP, UP) and columns
    (cavity, donor, acceptor); squared entries are the contents plotted in the
    usual polariton-composition diagrams.  ``bright_vectors`` are the same
    eigenvectors embedded in the full single-excitation space, one per row.
    """

    energies: np.ndarray
    hopfield: np.ndarray
    dark_donor_dim: int
    dark_donor_energy: float
    dark_acceptor_dim: int
    dark_acceptor_energy: float
    bright_vectors: np.ndarray
    collective_couplings: tuple[float, float]
    participation: tuple[float, float]

    @property
    def omega_lp(self) -> float:
        return float(self.energies[0])

    @property
    def omega_mp(self) -> float:
        return float(self.energies[1])

    @property
    def omega_up(self) -> float:
        return float(self.energies[2])

    @property
    def hopfield_squares(self) -> np.ndarray:
        return self.hopfield**2

    def cavity_weight(self, alpha: str) -> float:
        """Squared cavity content b_{alpha,C}^2 of polariton ``alpha``."""
        return float(self.hopfield[POLARITON_NAMES.index(alpha), 0] ** 2)

    def energy(self, alpha: str) -> float:
        return float(self.energies[POLARITON_NAMES.index(alpha)])

    def resonance_gaps(self) -> dict[str, float]:
        """Energy differences that act as resonance conditions for vibration-driven decay."""
        return {
            "up_minus_donor": self.omega_up - self.dark_donor_energy,
            "up_minus_acceptor": self.omega_up - self.dark_acceptor_energy,
            "up_minus_lp": self.omega_up - self.omega_lp,
            "mp_minus_acceptor": self.omega_mp - self.dark_acceptor_energy,
        }


def reduce_to_bright(ensemble: EmitterEnsemble, cavity: CavityConfig) -> np.ndarray:
    """3x3 arrowhead matrix governing the bright (polariton) subspace.

    Rows/columns are ordered cavity, donor-collective, acceptor-collective;
    its eigenvalues are exactly the three non-degenerate eigenvalues of the
    full Hamiltonian.
    """
    omega_d = ensemble.transition_frequency(Species.DONOR)
    omega_a = ensemble.transition_frequency(Species.ACCEPTOR)
    om_d = ensemble.collective_coupling(Species.DONOR)
    om_a = ensemble.collective_coupling(Species.ACCEPTOR)
    if om_d == 0.0 or om_a == 0.0:
        raise ModelError("bright-subspace reduction needs nonzero collective coupling for both species")
    return np.array([
        [cavity.frequency, om_d, om_a],
        [om_d, omega_d, 0.0],
        [om_a, 0.0, omega_a],
    ])


def decompose(ensemble: EmitterEnsemble, cavity: CavityConfig) -> PolaritonDecomposition:
    """Diagonalize the bright subspace and collect Hopfield and dark-state data."""
    bright = reduce_to_bright(ensemble, cavity)
    energies, vecs = np.linalg.eigh(bright)
    hopfield = np.ascontiguousarray(vecs.T)
    # Deterministic sign: cavity amplitude >= 0, falling back to the first
    # nonzero matter amplitude.
    for row in hopfield:
        lead = row[0] if row[0] != 0.0 else (row[1] if row[1] != 0.0 else row[2])
        if lead < 0:
            row *= -1.0

    basis = np.vstack([
        _photon_vector(ensemble.dimension),
        ensemble.bright_weights(Species.DONOR),
        ensemble.bright_weights(Species.ACCEPTOR),
    ])
    bright_vectors = hopfield @ basis

    return PolaritonDecomposition(
        energies=energies,
        hopfield=hopfield,
        dark_donor_dim=ensemble.n_donors - 1,
        dark_donor_energy=ensemble.transition_frequency(Species.DONOR),
        dark_acceptor_dim=ensemble.n_acceptors - 1,
        dark_acceptor_energy=ensemble.transition_frequency(Species.ACCEPTOR),
        bright_vectors=bright_vectors,
        collective_couplings=(ensemble.collective_coupling(Species.DONOR),
                              ensemble.collective_coupling(Species.ACCEPTOR)),
        participation=(ensemble.participation(Species.DONOR),
                       ensemble.participation(Species.ACCEPTOR)),
    )


def _photon_vector(dim: int) -> np.ndarray:
    v = np.zeros(dim)
    v[1] = 1.0
    return v


class SweepPointError(RuntimeError):
    """A sweep aborted at a specific grid point."""

    def __init__(self, axis, value, index, cause):
        super().__init__(f"sweep failed at {axis}[{index}] = {value}: {cause}")
        self.axis = axis
        self.value = value
        self.index = index


def sweep_decomposition(axis: str, grid, fixed: dict) -> list[dict]:
    """Polariton decomposition along a grid of Rabi or cavity frequencies.

    ``axis`` is "rabi" or "cavity"; ``fixed`` holds keyword arguments for
    :func:`polarxfer.system.make_system` that stay constant.  Returns one row
    per grid value (grid order) with energies and squared Hopfield weights.
    A failure at any point aborts the sweep, identifying the point.
    """
    from .system import make_system

    if axis not in ("rabi", "cavity"):
        raise ModelError(f"unknown sweep axis {axis!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ModelError("sweep grid must be non-empty")
    if np.any(np.diff(grid) < 0):
        raise ModelError("sweep grid must be ascending")

    rows = []
    for i, value in enumerate(grid):
        params = dict(fixed)
        params["rabi" if axis == "rabi" else "omega_c"] = float(value)
        try:
            dec = decompose(*make_system(**params))
        except Exception as exc:
            raise SweepPointError(axis, float(value), i, exc) from exc
        rows.append(decomposition_row(float(value), dec))
    return rows


def decomposition_row(axis_value: float, dec: PolaritonDecomposition) -> dict:
    b2 = dec.hopfield_squares
    row = {"axis_value": axis_value,
           "e_lp": dec.omega_lp, "e_mp": dec.omega_mp, "e_up": dec.omega_up}
    for i, alpha in enumerate(POLARITON_NAMES):
        for j, comp in enumerate("cda"):
            row[f"b2_{alpha[0]}{comp}"] = float(b2[i, j])
    return row


DECOMPOSITION_COLUMNS = ("axis_value", "e_lp", "e_mp", "e_up",
                         "b2_lc", "b2_ld", "b2_la",
                         "b2_mc", "b2_md", "b2_ma",
                         "b2_uc", "b2_ud", "b2_ua")


def write_decomposition_csv(path, rows) -> None:
    """Write sweep rows as CSV with 12 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(DECOMPOSITION_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(f"{row[c]:.12g}" for c in DECOMPOSITION_COLUMNS) + "\n")
