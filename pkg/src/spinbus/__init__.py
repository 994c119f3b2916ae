"""spinbus: exact-diagonalization toolkit for spin-chain quantum channels.

Four protocols share one numerical core:

* perfect state transfer through engineered XY couplings,
* Gaussian wavepacket transfer in a parabolic field,
* qubit-qubit exchange mediated by a gapped spin ladder,
* a magnon memory that stores an electron spin in a nuclear-spin ring.
"""

from .basis import SectorBasis, SpinConfiguration, enumerate_sector, mirror_permutation
from .dynamics import (
    FidelityTrace,
    WavepacketSpec,
    analytic_packet_fidelity,
    packet_transfer_trace,
    scan_field_scale,
    transfer_fidelity,
)
from .errors import CapacityError, ConvergenceError, DomainError, RegimeError, SpinbusError
from .ladder import (
    exact_spin_gap,
    jeff_scaling_fit,
    lieb_ground_spin,
    perturbative_jeff,
    reduced_coefficients,
)
from .memory import (
    analytic_storage_fidelity,
    chi_profile,
    decay_rate,
    dispersion,
    exact_ring_validation,
    simulate_inhomogeneous,
    simulate_storage_map,
)
from .models import (
    CouplingProfile,
    FieldProfile,
    HamiltonianMatrix,
    LadderSpec,
    MemoryParams,
    engineered_couplings,
    heisenberg_ladder_hamiltonian,
    magnon_mode_hamiltonian,
    parabolic_chain_single_excitation,
    ring_with_central_spin_hamiltonian,
    xy_chain_single_excitation,
)
from .spectral import analyze_spectrum, evolution_is_mirror, lowest_eigenpairs

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConvergenceError",
    "CouplingProfile",
    "DomainError",
    "FidelityTrace",
    "FieldProfile",
    "HamiltonianMatrix",
    "LadderSpec",
    "MemoryParams",
    "RegimeError",
    "SectorBasis",
    "SpinConfiguration",
    "SpinbusError",
    "WavepacketSpec",
    "analytic_packet_fidelity",
    "analytic_storage_fidelity",
    "analyze_spectrum",
    "chi_profile",
    "decay_rate",
    "dispersion",
    "engineered_couplings",
    "enumerate_sector",
    "evolution_is_mirror",
    "exact_ring_validation",
    "exact_spin_gap",
    "heisenberg_ladder_hamiltonian",
    "jeff_scaling_fit",
    "lieb_ground_spin",
    "lowest_eigenpairs",
    "magnon_mode_hamiltonian",
    "mirror_permutation",
    "packet_transfer_trace",
    "parabolic_chain_single_excitation",
    "perturbative_jeff",
    "reduced_coefficients",
    "ring_with_central_spin_hamiltonian",
    "scan_field_scale",
    "simulate_inhomogeneous",
    "simulate_storage_map",
    "transfer_fidelity",
    "xy_chain_single_excitation",
    "__version__",
]
