"""Capacities of the lossy bosonic memory channel built from a beam-splitter cascade."""

__version__ = "0.1.0"

from .allocation import (
    INFINITE,
    PhotonAllocation,
    classical_allocation_continuous,
    classical_allocation_discrete,
    coherent_info,
    coherent_info_unconstrained,
    g_function,
    is_infinite,
    quantum_allocation_continuous,
    quantum_allocation_discrete,
)
from .capacity import (
    CapacityResult,
    Kind,
    capacity_grid,
    classical_capacity,
    classical_capacity_bounds,
    quantum_capacity,
    quantum_capacity_unconstrained,
)
from .errors import ConvergenceError
from .gaussian import GaussianState, ModeRotation, cascade_apply, unraveled_apply, verify_equivalence
from .model import (
    CascadeCoefficients,
    ChannelParams,
    MemoryMatrix,
    Setup,
    build_cascade,
    eta_k_sequence,
    eta_limit,
    memory_matrix,
    memory_matrix_ee_formula,
    retention_amplitude_probability,
)
from .spectral import (
    EffectiveTransmissivities,
    SpectralSymbol,
    diagonalize,
    spectrum_endpoints,
    symbol_tau,
    szego_average,
)
