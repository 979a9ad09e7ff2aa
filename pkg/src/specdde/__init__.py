"""Spectral solver and diagnostics for 2*pi-periodic solutions of neutral
delay integro-differential equations in finite-dimensional state spaces."""

__version__ = "0.1.0"

from .besov import (
    BesovParams,
    DyadicPartition,
    apply_multiplier,
    besov_norm,
    besov_norm_report,
    derivative_shift_check,
    fourier_type_ratio,
    partition_eval,
)
from .config import RunConfig, parse_config
from .exceptions import (
    AliasingError,
    ConfigError,
    DimensionError,
    InvalidKernelError,
    OffGridLagError,
    PeriodizationError,
    SingularModeError,
    SingularSystemError,
    TruncationWarning,
)
from .oracle import (
    OracleComparison,
    PeriodizedKernel,
    collocation_solve,
    compare,
    periodize_kernel,
)
from .resolvent import (
    MBoundReport,
    ResolventFamily,
    SequenceDiagnostics,
    assemble_modal_matrix,
    m_bounded_diagnostics,
    resolvent_family,
    telescoping_check,
    verify_modal_identity,
)
from .solver import (
    SpectralSolution,
    SweepResult,
    convergence_sweep,
    residual,
    solve_periodic,
)
from .symbols import (
    DelayFunctional,
    DistributedDelay,
    KernelSpec,
    PeriodicGridFunction,
    ProblemSpec,
    ScaledDifferences,
    analyze,
    delay_symbol,
    difference_sequences,
    laplace_symbol,
    laplace_symbol_quadrature,
    mode_range,
    synthesize,
)

__all__ = [
    "__version__",
    "AliasingError",
    "BesovParams",
    "ConfigError",
    "DelayFunctional",
    "DimensionError",
    "DistributedDelay",
    "DyadicPartition",
    "InvalidKernelError",
    "KernelSpec",
    "MBoundReport",
    "OffGridLagError",
    "OracleComparison",
    "PeriodicGridFunction",
    "PeriodizationError",
    "PeriodizedKernel",
    "ProblemSpec",
    "ResolventFamily",
    "RunConfig",
    "ScaledDifferences",
    "SequenceDiagnostics",
    "SingularModeError",
    "SingularSystemError",
    "SpectralSolution",
    "SweepResult",
    "TruncationWarning",
    "analyze",
    "apply_multiplier",
    "assemble_modal_matrix",
    "besov_norm",
    "besov_norm_report",
    "collocation_solve",
    "compare",
    "convergence_sweep",
    "delay_symbol",
    "derivative_shift_check",
    "difference_sequences",
    "fourier_type_ratio",
    "laplace_symbol",
    "laplace_symbol_quadrature",
    "m_bounded_diagnostics",
    "mode_range",
    "parse_config",
    "partition_eval",
    "periodize_kernel",
    "residual",
    "resolvent_family",
    "solve_periodic",
    "synthesize",
    "telescoping_check",
    "verify_modal_identity",
]
