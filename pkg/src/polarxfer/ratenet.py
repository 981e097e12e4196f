"""Secular rate network over the polariton and dark levels.

When coherences decouple from populations, the driven system reduces to a
kinetic network on six levels: ground, the three polaritons and the two dark
manifolds.  The downhill transition rates follow from the Redfield generator
in closed form, written with Hopfield weights, the bath spectral densities and
per-species participation factors:

  polariton -> polariton :  sum_i  kappa_i * b_bi^2 * b_ai^2 * S_i(gap)
  polariton -> dark      :  (1 - kappa_i) * b_ai^2 * S_i(gap)     (manifold total)
  dark -> polariton      :  (1 - kappa_i) / (N_i - 1) * b_ai^2 * S_i(gap)   (per state)

where kappa_i = sum g^4 / (sum g^2)^2 is 1/N_i for uniform couplings.  In the
uniform limit these reduce to the familiar 1/N and (N-1)/N prefactors; the
first group therefore vanishes as 1/N with growing ensembles while the
polariton-to-dark rates do not.  Transitions between the two dark manifolds
vanish identically (the local coupling operators of the two species act on
disjoint states) and are omitted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baths import BathSet, spectral_density
from .polaritons import POLARITON_NAMES, PolaritonDecomposition
from .system import ModelError, Species

DARK_LEVELS = {Species.DONOR: "dark_donor", Species.ACCEPTOR: "dark_acceptor"}
_COMPONENT = {Species.DONOR: 1, Species.ACCEPTOR: 2}
FLUX_TOL = 1e-12

ROUTES = {
    "via_dark_donor": ("up", "dark_donor"),
    "via_dark_acceptor": ("up", "dark_acceptor"),
    "via_middle": ("up", "mp"),
    "direct_lp": ("up", "lp"),
}


class RateError(ValueError):
    """Requested transition is not available (uphill or missing level)."""


def _species_factors(decomposition: PolaritonDecomposition, species: Species,
                     n_override: int | None) -> tuple[float, int]:
    """(participation, N) for one species, optionally forced to uniform size n."""
    if n_override is not None:
        if n_override < 1:
            raise RateError("molecule count must be >= 1")
        return 1.0 / n_override, n_override
    if species is Species.DONOR:
        return decomposition.participation[0], decomposition.dark_donor_dim + 1
    return decomposition.participation[1], decomposition.dark_acceptor_dim + 1


def _dark_energy(decomposition: PolaritonDecomposition, species: Species) -> float:
    return (decomposition.dark_donor_energy if species is Species.DONOR
            else decomposition.dark_acceptor_energy)


def rate_polariton_to_polariton(alpha: str, beta: str, decomposition: PolaritonDecomposition,
                                baths: BathSet, n_donors: int | None = None,
                                n_acceptors: int | None = None) -> float:
    """Transition rate from polariton ``beta`` down to polariton ``alpha``."""
    gap = decomposition.energy(beta) - decomposition.energy(alpha)
    if gap <= 0:
        raise RateError(f"{beta} -> {alpha} is not downhill")
    b2 = decomposition.hopfield_squares
    ia, ib = POLARITON_NAMES.index(alpha), POLARITON_NAMES.index(beta)
    total = 0.0
    for species, n_over in ((Species.DONOR, n_donors), (Species.ACCEPTOR, n_acceptors)):
        part, _ = _species_factors(decomposition, species, n_over)
        c = _COMPONENT[species]
        total += part * b2[ib, c] * b2[ia, c] * spectral_density(gap, baths.for_species(species))
    return total


def rate_polariton_to_dark(alpha: str, dark_species: Species,
                           decomposition: PolaritonDecomposition, baths: BathSet,
                           n: int | None = None) -> float:
    """Total rate from polariton ``alpha`` into the dark manifold of one species."""
    gap = decomposition.energy(alpha) - _dark_energy(decomposition, dark_species)
    if gap <= 0:
        raise RateError(f"{alpha} -> {DARK_LEVELS[dark_species]} is not downhill")
    part, _ = _species_factors(decomposition, dark_species, n)
    b2 = decomposition.hopfield_squares[POLARITON_NAMES.index(alpha), _COMPONENT[dark_species]]
    return (1.0 - part) * b2 * spectral_density(gap, baths.for_species(dark_species))


def rate_dark_to_polariton(dark_species: Species, alpha: str,
                           decomposition: PolaritonDecomposition, baths: BathSet,
                           n: int | None = None) -> float:
    """Per-state decay rate from the dark manifold of one species to polariton ``alpha``."""
    gap = _dark_energy(decomposition, dark_species) - decomposition.energy(alpha)
    if gap <= 0:
        raise RateError(f"{DARK_LEVELS[dark_species]} -> {alpha} is not downhill")
    part, count = _species_factors(decomposition, dark_species, n)
    if count < 2:
        raise RateError(f"{DARK_LEVELS[dark_species]} is empty for N = {count}")
    b2 = decomposition.hopfield_squares[POLARITON_NAMES.index(alpha), _COMPONENT[dark_species]]
    return (1.0 - part) / (count - 1) * b2 * spectral_density(gap, baths.for_species(dark_species))


@dataclass(frozen=True)
class RateNetwork:
    """Directed downhill rate graph over {ground, lp, dark_acceptor, mp, dark_donor, up}."""

    level_energies: dict[str, float]
    multiplicities: dict[str, int]
    rates: dict[tuple[str, str], float]
    loss: dict[str, float]
    cavity_weights: dict[str, float]
    pump_level: str = "up"
    pump_rate: float = 1.0

    @property
    def excited_levels(self) -> list[str]:
        return sorted(self.level_energies, key=lambda k: -self.level_energies[k])


def build_rate_network(decomposition: PolaritonDecomposition, baths: BathSet,
                       kappa: float, gamma_donor: float, gamma_acceptor: float,
                       n_donors: int | None = None, n_acceptors: int | None = None,
                       pump_rate: float = 1.0) -> RateNetwork:
    """Assemble every downhill channel plus loss and pump for the level scheme.

    Polariton losses combine the cavity channel b_C^2 * kappa with the
    radiative channels b_i^2 * gamma_i; dark manifolds lose at the bare
    radiative rate of their species.
    """
    overrides = {Species.DONOR: n_donors, Species.ACCEPTOR: n_acceptors}
    gammas = {Species.DONOR: gamma_donor, Species.ACCEPTOR: gamma_acceptor}

    energies = {a: decomposition.energy(a) for a in POLARITON_NAMES}
    multiplicities = {a: 1 for a in POLARITON_NAMES}
    loss = {}
    b2 = decomposition.hopfield_squares
    for i, alpha in enumerate(POLARITON_NAMES):
        loss[alpha] = (b2[i, 0] * kappa + b2[i, 1] * gamma_donor + b2[i, 2] * gamma_acceptor)

    dark_counts = {}
    for species in (Species.DONOR, Species.ACCEPTOR):
        _, count = _species_factors(decomposition, species, overrides[species])
        dark_counts[species] = count
        if count > 1:
            name = DARK_LEVELS[species]
            energies[name] = _dark_energy(decomposition, species)
            multiplicities[name] = count - 1
            loss[name] = gammas[species]

    rates: dict[tuple[str, str], float] = {}
    for ib, beta in enumerate(POLARITON_NAMES):
        for ia, alpha in enumerate(POLARITON_NAMES[:ib]):
            rates[(beta, alpha)] = rate_polariton_to_polariton(
                alpha, beta, decomposition, baths, n_donors, n_acceptors)
    for species in (Species.DONOR, Species.ACCEPTOR):
        if dark_counts[species] < 2:
            continue
        name = DARK_LEVELS[species]
        omega_dark = energies[name]
        for alpha in POLARITON_NAMES:
            if energies[alpha] > omega_dark:
                rates[(alpha, name)] = rate_polariton_to_dark(
                    alpha, species, decomposition, baths, overrides[species])
            elif energies[alpha] < omega_dark:
                rates[(name, alpha)] = rate_dark_to_polariton(
                    species, alpha, decomposition, baths, overrides[species])

    return RateNetwork(level_energies=energies, multiplicities=multiplicities,
                       rates=rates, loss=loss,
                       cavity_weights={a: float(b2[i, 0]) for i, a in enumerate(POLARITON_NAMES)},
                       pump_rate=pump_rate)


@dataclass(frozen=True)
class NetworkSolution:
    populations: dict[str, float]
    transfer_efficiency: float
    edge_fluxes: dict[tuple[str, str], float]
    loss_fluxes: dict[str, float]
    route_fluxes: dict[str, float]
    pump_rate: float

    def to_report(self, network: RateNetwork) -> dict:
        return {
            "rates_ev": {f"{src}->{dst}": rate for (src, dst), rate in network.rates.items()},
            "level_losses_ev": dict(network.loss),
            "populations": dict(self.populations),
            "route_fluxes": dict(self.route_fluxes),
            "transfer_efficiency": self.transfer_efficiency,
        }


def solve_network(network: RateNetwork) -> NetworkSolution:
    """Steady-state populations of the kinetic network and the efficiency.

    Balances pump inflow against downhill transfer and loss on every excited
    level; the ground state is the sink.  The linear solve gets one step of
    iterative refinement so the pump-versus-loss flux balance closes at the
    1e-12 relative level even with rates spanning many decades.
    """
    if network.pump_rate <= 0:
        raise ModelError("pump rate must be > 0")
    names = network.excited_levels
    index = {name: i for i, name in enumerate(names)}
    n = len(names)

    outflow = {name: network.loss.get(name, 0.0) for name in names}
    for (src, dst), rate in network.rates.items():
        outflow[src] += rate
    dead = [name for name in names if outflow[name] <= 0.0]
    if dead:
        raise ModelError(f"singular balance: level(s) {dead} have zero total outflow")

    a = np.zeros((n, n))
    for name in names:
        a[index[name], index[name]] = outflow[name]
    for (src, dst), rate in network.rates.items():
        a[index[dst], index[src]] -= rate
    b = np.zeros(n)
    b[index[network.pump_level]] = network.pump_rate

    p = np.linalg.solve(a, b)
    p += np.linalg.solve(a, b - a @ p)  # one refinement step
    populations = {name: float(p[index[name]]) for name in names}

    edge_fluxes = {edge: rate * populations[edge[0]] for edge, rate in network.rates.items()}
    loss_fluxes = {name: network.loss[name] * populations[name] for name in names}
    into_ground = sum(loss_fluxes.values())
    if abs(into_ground - network.pump_rate) > FLUX_TOL * network.pump_rate:
        raise ModelError(f"flux not conserved: pump {network.pump_rate} vs loss {into_ground}")

    weighted = [network.cavity_weights[a_] * populations[a_] for a_ in POLARITON_NAMES]
    denominator = sum(weighted)
    if denominator <= 0.0:
        raise ModelError("no cavity emission from any polariton level")
    efficiency = weighted[0] / denominator

    route_fluxes = {route: edge_fluxes.get(edge, 0.0) for route, edge in ROUTES.items()}
    return NetworkSolution(populations=populations, transfer_efficiency=float(efficiency),
                           edge_fluxes=edge_fluxes, loss_fluxes=loss_fluxes,
                           route_fluxes=route_fluxes, pump_rate=network.pump_rate)
