"""Maximal bin occupancy when r balls go into n distinct bins per round.

Exact distributions and expectations, recurrence guessing for the centered
expectation A(n, r; T), long-range evaluation, asymptotic constants and a
Monte Carlo cross-check.
"""

from .asymptotics import AsymptoticFit, compare_report, estimate_constant, ladder
from .evaluate import EvaluationResult, PrecisionPolicy, extend_exact, extend_float
from .exact import (
    MaxPmf,
    ProblemSpec,
    RationalSequence,
    StateTable,
    a_sequence,
    brute_force_oracle,
    closed_form_n2,
    heuristic_constant,
    initial_state,
    max_pmf,
    step,
)
from .guess import GuessReport, RecurrenceOperator, annihilates, fit, search, search_stable

__version__ = "0.1.0"

__all__ = [
    "AsymptoticFit",
    "EvaluationResult",
    "GuessReport",
    "MaxPmf",
    "PrecisionPolicy",
    "ProblemSpec",
    "RationalSequence",
    "RecurrenceOperator",
    "StateTable",
    "a_sequence",
    "annihilates",
    "brute_force_oracle",
    "closed_form_n2",
    "compare_report",
    "estimate_constant",
    "extend_exact",
    "extend_float",
    "fit",
    "heuristic_constant",
    "initial_state",
    "ladder",
    "max_pmf",
    "search",
    "search_stable",
    "step",
]
