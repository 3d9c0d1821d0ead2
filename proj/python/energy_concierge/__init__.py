"""Household energy decisions as convex optimization problems."""

from ._core import (
    Conversation,
    EcError,
    battery_sizing_closed_form,
    compile,
    estimate_p,
    estimate_q,
    expected_generations,
    format_document,
    golden_document,
    improvement_over_baseline,
    optimality_gap,
    oracle,
    reference_params,
    run_benchmark,
    schemas,
    solve,
    solve_document,
)

__all__ = [
    "Conversation",
    "EcError",
    "battery_sizing_closed_form",
    "compile",
    "estimate_p",
    "estimate_q",
    "expected_generations",
    "format_document",
    "golden_document",
    "improvement_over_baseline",
    "optimality_gap",
    "oracle",
    "reference_params",
    "run_benchmark",
    "schemas",
    "solve",
    "solve_document",
]
