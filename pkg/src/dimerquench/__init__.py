"""Exact quench dynamics of the fully dimerized XXZ chain in the Bell basis."""

from .bell_basis import (
    BellExpansion,
    Boundary,
    ConfigError,
    ModelParams,
    ObcExpansion,
    bell_amplitudes,
    brute_force_coefficient,
    build_expansion,
    coefficient,
    config_energy,
    dimer_energy,
    enumerate_active_configs,
    obc_expansion,
    psi0_statevector,
)
from .closed_forms import (
    UncoveredCaseError,
    echo_closed_form,
    entropy_closed_form,
    entropy_n2,
    rdm_eigenvalues_n2,
)
from .dynamics import (
    EvolvedState,
    ReducedDensityMatrix,
    evolve,
    find_loschmidt_zeros,
    half_chain_entropies,
    loschmidt_echo,
    reduced_density_matrix,
    return_rate,
    to_statevector,
    von_neumann_entropy,
)
from .randomized import (
    Estimate,
    MeasurementDataset,
    collect,
    overlap_hamming,
    purity_hamming,
    renyi_from_purity,
    sample_unitaries,
    shadow_loschmidt,
    shadow_purity,
)

__version__ = "0.1.0"

__all__ = [
    "BellExpansion",
    "Boundary",
    "ConfigError",
    "Estimate",
    "EvolvedState",
    "MeasurementDataset",
    "ModelParams",
    "ObcExpansion",
    "ReducedDensityMatrix",
    "UncoveredCaseError",
    "bell_amplitudes",
    "brute_force_coefficient",
    "build_expansion",
    "coefficient",
    "collect",
    "config_energy",
    "dimer_energy",
    "echo_closed_form",
    "entropy_closed_form",
    "entropy_n2",
    "enumerate_active_configs",
    "evolve",
    "find_loschmidt_zeros",
    "half_chain_entropies",
    "loschmidt_echo",
    "obc_expansion",
    "overlap_hamming",
    "psi0_statevector",
    "purity_hamming",
    "rdm_eigenvalues_n2",
    "reduced_density_matrix",
    "renyi_from_purity",
    "return_rate",
    "sample_unitaries",
    "shadow_loschmidt",
    "shadow_purity",
    "to_statevector",
    "von_neumann_entropy",
]
