"""Envariance laboratory: state-vector experiments with entanglement symmetries.

The heavy lifting lives in the compiled ``_envlab`` extension; this package
re-exports its public surface.
"""

from ._envlab import (  # noqa: F401
    BornResult,
    ContractViolation,
    CounterResult,
    Cut,
    DensityMatrix,
    Detectability,
    EnsembleDistribution,
    EnvariantDescription,
    FineGraining,
    LocalUnitary,
    PureState,
    SchmidtDecomposition,
    SwapSpec,
    ValidationError,
    apply_cshift,
    apply_local,
    build_fine_grained_state,
    default_denominator,
    derive_born,
    derive_born_multi,
    descriptions_match,
    dimension_cap,
    ensemble_counts,
    ensemble_oracle,
    ensemble_probabilities,
    envariance_fidelity,
    envariance_residual,
    envariant_description,
    equal_coeff_probabilities,
    gaussian_approx,
    is_envariant,
    load_state,
    optimal_counter,
    overlap,
    parse_inline_state,
    phase_rotation_pair,
    rational_approximation,
    reduced_density,
    relabel,
    run_selftest,
    save_state,
    schmidt,
    set_dimension_cap,
    state_to_json,
    subset_probability,
    swap_detectability,
    swap_pair,
    tensor,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
