"""Pseudospectral fast-slow reaction-diffusion laboratory (Python bindings)."""

from ._fastreact import (  # noqa: F401
    AssumptionError,
    ConfigError,
    DegenerateSplittingError,
    DivergenceError,
    DomainError,
    Grid,
    GapReport,
    HorizonError,
    LipschitzConstants,
    ModeSpectrum,
    ModelKind,
    ModelParams,
    ShapeError,
    SplittingParams,
    closed_form_solution,
    convergence_study,
    critical_u,
    lyapunov_perron,
    mode_spectrum,
    run_config,
    simulate,
    sobolev_norm,
    solve_limit_system,
    splitting_parameters,
    square,
    validate_assumptions,
)

__all__ = [name for name in dir() if not name.startswith("_")]
