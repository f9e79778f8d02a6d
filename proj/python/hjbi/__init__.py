"""Robust ergodic control of a logistic jump-diffusion population model."""

from ._hjbi import (
    Coefficient,
    JumpDensity,
    ProblemSpec,
    apply_expectation,
    apply_nonlocal,
    hamiltonian,
    interp_weights,
    mc_check,
    optimal_lambda,
    optimal_q,
    paper_spec,
    run_config,
    solve,
    validate_spec,
)

__all__ = [
    "Coefficient",
    "JumpDensity",
    "ProblemSpec",
    "apply_expectation",
    "apply_nonlocal",
    "hamiltonian",
    "interp_weights",
    "mc_check",
    "optimal_lambda",
    "optimal_q",
    "paper_spec",
    "run_config",
    "solve",
    "validate_spec",
]
