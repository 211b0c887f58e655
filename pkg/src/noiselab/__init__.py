"""Logical-noise estimation from syndrome statistics of stabilizer-type codes.

The package decides whether a factorized Pauli noise model can be estimated
up to logical equivalence from the syndrome measurements of a stabilizer,
subsystem or data-syndrome code, and carries out the estimation from exact or
simulated syndrome statistics, with an independent brute-force oracle for
verification.
"""

from .codes import (
    CodeGroups,
    DataSyndromeSpec,
    build_data_syndrome_code,
    build_stabilizer_code,
    build_subsystem_code,
    builtin_code,
    coset_transversal,
    distance,
    is_correctable_region,
)
from .config import RunConfig, load_config, parse_config
from .errors import (
    AmbientMismatchError,
    CapExceededError,
    ConfigError,
    NoiseLabError,
    NonPositiveMomentError,
    NotIdentifiableError,
)
from .estimation import (
    DesignMatrix,
    EstimationResult,
    IdentifiabilityReport,
    adjusted_data_syndrome_model,
    build_design_matrix,
    cleaning_count_check,
    ds_postprocess,
    estimate_logical_moments,
    exact_measured_moments,
    gram,
    identifiability_check,
    logical_channel_probabilities,
    solve_logical_moments,
)
from .estimator import LogicalNoiseEstimator
from .noise import (
    GammaPrime,
    LocalChannel,
    MomentTable,
    NoiseModel,
    exact_moment,
    gamma_prime,
    is_correctable_noise,
    local_channel,
    local_moments,
    noise_model,
    sample_error,
)
from .oracle import brute_fourier, coset_logical_channel, full_distribution
from .pauli import (
    GroupElement,
    Region,
    SubgroupBasis,
    annihilator,
    bicharacter,
    element_to_string,
    enumerate_group,
    identity,
    in_span,
    intersect,
    is_substring,
    multiply,
    parse_element,
    restrict_to_region,
    span,
    support,
    weight,
)
from .reduction import ReducedProblem, reduce_problem
from .simulate import (
    SyndromeDataset,
    dataset_to_csv,
    empirical_moments,
    load_dataset,
    run_rounds,
    save_dataset,
)
from .transforms import (
    CanonicalMomentVector,
    DistributionTable,
    canonical_from_moments,
    convolve,
    fourier,
    fourier_fast,
    inverse_fourier,
    mobius,
    moments_from_canonical,
    read_moments_csv,
    write_moments_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AmbientMismatchError",
    "CanonicalMomentVector",
    "CapExceededError",
    "CodeGroups",
    "ConfigError",
    "DataSyndromeSpec",
    "DesignMatrix",
    "DistributionTable",
    "EstimationResult",
    "GammaPrime",
    "GroupElement",
    "IdentifiabilityReport",
    "LocalChannel",
    "LogicalNoiseEstimator",
    "MomentTable",
    "NoiseLabError",
    "NoiseModel",
    "NonPositiveMomentError",
    "NotIdentifiableError",
    "ReducedProblem",
    "Region",
    "RunConfig",
    "SubgroupBasis",
    "SyndromeDataset",
    "adjusted_data_syndrome_model",
    "annihilator",
    "bicharacter",
    "brute_fourier",
    "build_data_syndrome_code",
    "build_design_matrix",
    "build_stabilizer_code",
    "build_subsystem_code",
    "builtin_code",
    "canonical_from_moments",
    "cleaning_count_check",
    "convolve",
    "coset_logical_channel",
    "coset_transversal",
    "dataset_to_csv",
    "distance",
    "ds_postprocess",
    "element_to_string",
    "empirical_moments",
    "enumerate_group",
    "estimate_logical_moments",
    "exact_measured_moments",
    "exact_moment",
    "fourier",
    "fourier_fast",
    "full_distribution",
    "gamma_prime",
    "gram",
    "identifiability_check",
    "identity",
    "in_span",
    "intersect",
    "inverse_fourier",
    "is_correctable_noise",
    "is_correctable_region",
    "is_substring",
    "load_config",
    "load_dataset",
    "local_channel",
    "local_moments",
    "logical_channel_probabilities",
    "mobius",
    "moments_from_canonical",
    "multiply",
    "noise_model",
    "parse_config",
    "parse_element",
    "read_moments_csv",
    "reduce_problem",
    "restrict_to_region",
    "run_rounds",
    "sample_error",
    "save_dataset",
    "solve_logical_moments",
    "span",
    "support",
    "weight",
    "write_moments_csv",
    "__version__",
]
