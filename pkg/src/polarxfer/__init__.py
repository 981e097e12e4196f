"""Polariton-mediated long-range energy transfer between donors and acceptors.

A numpy/scipy toolkit for a collection of donor and acceptor molecules
strongly coupled to one lossy cavity mode: polariton structure (energies,
Hopfield weights, dark manifolds), driven Bloch-Redfield steady states with
vibrational baths, the equivalent secular rate network, and batch sweeps of
the transfer efficiency.
"""

__version__ = "0.1.0"

from .baths import BathSet, SpectralDensityParams, make_baths, spectral_density
from .config import ConfigError, FullConfig, parse_config
from .liouville import (DriveParams, LiouvilleProblem, NoEmissionError, SteadyState,
                        SteadyStateError, apply_superop, assemble_liouvillian,
                        build_lindblad_generator, build_redfield_generator,
                        lindblad_from_channels, solve_steady_density, steady_state,
                        transfer_efficiency)
from .polaritons import (PolaritonDecomposition, decompose, reduce_to_bright,
                         sweep_decomposition, write_decomposition_csv)
from .ratenet import (NetworkSolution, RateError, RateNetwork, build_rate_network,
                      rate_dark_to_polariton, rate_polariton_to_dark,
                      rate_polariton_to_polariton, solve_network)
from .sweeps import (run_polariton_scan, run_single_point, run_size_scan, run_sweep,
                     run_vibrational_map, transfer_point)
from .system import (CavityConfig, Emitter, EmitterEnsemble, ModelError, Species,
                     build_hamiltonian, coupling_profile, make_system,
                     single_excitation_hamiltonian)

__all__ = [
    "BathSet", "CavityConfig", "ConfigError", "DriveParams", "Emitter",
    "EmitterEnsemble", "FullConfig", "LiouvilleProblem", "ModelError",
    "NetworkSolution", "NoEmissionError", "PolaritonDecomposition", "RateError",
    "RateNetwork", "Species", "SpectralDensityParams", "SteadyState",
    "SteadyStateError", "apply_superop", "assemble_liouvillian",
    "build_hamiltonian", "build_lindblad_generator", "build_rate_network",
    "build_redfield_generator", "coupling_profile", "decompose",
    "lindblad_from_channels", "make_baths",
    "make_system", "parse_config", "rate_dark_to_polariton",
    "rate_polariton_to_dark", "rate_polariton_to_polariton", "reduce_to_bright",
    "run_polariton_scan", "run_single_point", "run_size_scan", "run_sweep",
    "run_vibrational_map", "solve_network", "solve_steady_density",
    "spectral_density", "steady_state", "sweep_decomposition", "transfer_efficiency",
    "transfer_point", "write_decomposition_csv",
]
