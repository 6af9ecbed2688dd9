"""Equilibrium thermodynamics of pseudo-Hermitian Hamiltonians."""

from .bloch import (
    DensityMatrix,
    DysonExpansion,
    density_matrix,
    dyson_expand,
    dyson_expand_hamiltonian,
    observable_mean,
    partition_exact,
    partition_perturbative,
    partition_trace,
    picture_invariance_check,
    propagator,
)
from .linalg import EigenSystem, adjoint, cholesky_factor, eig, expm, inverse, matmul
from .models import GridHamiltonian, TwoLevelParams, cubic_oscillator, two_level, two_level_closed_form_B
from .pseudoherm import (
    MetricPair,
    SpectrumClass,
    SpectrumKind,
    build_metric,
    classify_spectrum,
    pseudo_residual,
    to_hermitian_picture,
    transform_observable,
)
from .thermo import (
    ThermoPoint,
    equation_of_state,
    free_energy,
    thermo_point_numeric,
    two_level_entropy,
    two_level_internal_energy,
    two_level_specific_heat,
)

__version__ = "0.1.0"
