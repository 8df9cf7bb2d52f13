"""Expected real zeros of random trigonometric polynomials with dependent
Gaussian coefficients, three independent ways: exact density quadrature,
Monte Carlo counting, and closed asymptotic laws."""

__version__ = "0.1.0"

from .errors import (
    DegenerateInput,
    EmptyInterval,
    FactorUnavailable,
    InvalidConfig,
    NearSingularArgument,
    NonIntegerZeroCount,
    NotBracketed,
    QuadratureNotConverged,
    TrigZerosError,
    UnsupportedScheme,
    VanishingA,
)
from .schemes import (
    CoefficientVector,
    EffectiveBasis,
    SchemeSpec,
    TrigKind,
    Variant,
    block_layout,
    det_factor_zero_count,
    effective_basis,
    equality_classes,
    free_values,
    free_variable_count,
    mix64,
    sample,
)
from .polyeval import EvalRequest, TrigSeries, evaluate, evaluate_derivative, evaluate_grid
from .kernels import (
    BoundReport,
    KernelTriple,
    asymptotic_expected_zeros,
    check_sum_bounds,
    dirichlet_cos_sum,
    dirichlet_sin_sum,
    kernel_asymptotic,
    kernel_exact,
    kernel_series,
    verify_identity_f16,
)
from .rootcount import ZeroCountResult, count_zeros, count_zeros_factored, refine_zero
from .kacrice import (
    KacRiceResult,
    QuadratureConfig,
    density,
    density_profile,
    expected_zeros_numeric,
    integrate_density,
)
from .montecarlo import (
    ExperimentConfig,
    ExperimentReport,
    RatioFit,
    run_experiment,
    small_interval_check,
    sweep,
)
