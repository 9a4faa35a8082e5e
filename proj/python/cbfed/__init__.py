"""MINI element solver for stationary CBFeD flow with a nonsmooth slip law."""

from ._cbfed import (
    FrictionLaw,
    ProblemParams,
    SolverConfig,
    case_params,
    check_monotonicity,
    convergence_study,
    exact_solution,
    forcing,
    inf_sup_constant,
    project_lambda,
    run_checks,
    solve,
)

__all__ = [
    "FrictionLaw",
    "ProblemParams",
    "SolverConfig",
    "case_params",
    "check_monotonicity",
    "convergence_study",
    "exact_solution",
    "forcing",
    "inf_sup_constant",
    "project_lambda",
    "run_checks",
    "solve",
]
