"""Independent oracles used by the tests.

Everything here recomputes expected values from first principles (dense
diagonalization, golden-rule extraction from the assembled generator, direct
matrix construction) without going through the code paths under test.
"""

from __future__ import annotations

import numpy as np

from polarxfer import apply_superop


def dense_spectrum(hamiltonian) -> np.ndarray:
    """Full eigenvalue list of the single-excitation Hamiltonian."""
    return np.linalg.eigvalsh(hamiltonian)


def brute_hamiltonian(omega_c, frequencies, couplings) -> np.ndarray:
    """Direct construction of the single-excitation matrix, independent of the package."""
    n = len(frequencies)
    h = np.zeros((n + 2, n + 2))
    h[1, 1] = omega_c
    h[2:, 2:] = np.diag(frequencies)
    h[1, 2:] = couplings
    h[2:, 1] = couplings
    return h


class EigenLevels:
    """Classified eigensystem of a two-species single-excitation Hamiltonian."""

    def __init__(self, hamiltonian, bright_energies, omega_d, omega_a, tol=1e-9):
        w, v = np.linalg.eigh(hamiltonian)
        self.energies = w
        self.vectors = v
        self.ground = int(np.argmin(np.abs(w)))
        self.polaritons = [int(np.argmin(np.abs(w - e))) for e in bright_energies]
        taken = set(self.polaritons) | {self.ground}
        self.dark_donor = [i for i in range(len(w))
                           if abs(w[i] - omega_d) < tol and i not in taken]
        self.dark_acceptor = [i for i in range(len(w))
                              if abs(w[i] - omega_a) < tol and i not in taken]

    def population_rate(self, superop, i_from, i_to) -> float:
        """Golden-rule element: d rho_toto / dt for rho = |from><from|."""
        rho = np.outer(self.vectors[:, i_from], self.vectors[:, i_from].conj())
        out = apply_superop(superop, rho)
        vec_to = self.vectors[:, i_to]
        return float((vec_to.conj() @ out @ vec_to).real)

    def manifold_rate_from_polariton(self, superop, i_pol, manifold) -> float:
        """Total transfer rate from one polariton into a dark manifold."""
        return sum(self.population_rate(superop, i_pol, k) for k in manifold)

    def mean_rate_from_manifold(self, superop, manifold, i_pol) -> float:
        """Per-state rate from a maximally mixed dark manifold to one polariton."""
        d = len(self.energies)
        rho = np.zeros((d, d), dtype=complex)
        for k in manifold:
            rho += np.outer(self.vectors[:, k], self.vectors[:, k].conj())
        rho /= len(manifold)
        out = apply_superop(superop, rho)
        vec_to = self.vectors[:, i_pol]
        return float((vec_to.conj() @ out @ vec_to).real)


def random_two_species_system(rng, max_each=32):
    """Random frequencies/couplings for a valid donor-acceptor system."""
    n_d = int(rng.integers(1, max_each + 1))
    n_a = int(rng.integers(1, max_each + 1))
    omega_d = float(rng.uniform(1.5, 3.0))
    omega_a = float(rng.uniform(0.8, omega_d - 0.1))
    omega_c = float(rng.uniform(1.0, 3.2))
    g_d = rng.uniform(0.01, 1.0, n_d) * rng.uniform(0.02, 0.3)
    g_a = rng.uniform(0.01, 1.0, n_a) * rng.uniform(0.02, 0.3)
    frequencies = np.concatenate([np.full(n_d, omega_d), np.full(n_a, omega_a)])
    couplings = np.concatenate([g_d, g_a])
    return n_d, n_a, omega_c, omega_d, omega_a, frequencies, couplings
