"""Python bindings for the asynet simulator."""

from ._core import (
    ParseError,
    Scenario,
    ScenarioError,
    check,
    compare_filippov,
    decompose,
    list_models,
    load_scenario,
    parse_scenario,
    run_model,
)

__all__ = [
    "ParseError",
    "Scenario",
    "ScenarioError",
    "check",
    "compare_filippov",
    "decompose",
    "list_models",
    "load_scenario",
    "parse_scenario",
    "run_model",
]
