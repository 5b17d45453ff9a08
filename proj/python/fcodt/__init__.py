"""Oblique regression trees with feature concatenation (C++ core)."""

from ._fcodt import (
    ContractViolation,
    Model,
    NumericalError,
    ParseError,
    fit,
    grid_search,
    mse,
    r2,
    rank_sum_test,
    simulate,
    solve_ridge,
    stump_check,
)

__all__ = [
    "ContractViolation",
    "Model",
    "NumericalError",
    "ParseError",
    "fit",
    "grid_search",
    "mse",
    "r2",
    "rank_sum_test",
    "simulate",
    "solve_ridge",
    "stump_check",
]
