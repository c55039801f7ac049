"""Numerical laboratory for Besov spaces with power weights."""

from .core import Numerics, SummandSequence
from .diagnostics import (
    classify,
    predict_membership,
    run_composition_experiment,
    run_membership_experiment,
    run_regularity_scan,
)
from .params import LogParams, ParameterError, SpaceParams
from .testfns import compose_power, parse_function

__all__ = [
    "Numerics",
    "SummandSequence",
    "SpaceParams",
    "LogParams",
    "ParameterError",
    "parse_function",
    "compose_power",
    "classify",
    "predict_membership",
    "run_membership_experiment",
    "run_composition_experiment",
    "run_regularity_scan",
]
