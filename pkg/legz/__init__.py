from legz import exceptions
from legz.descent import DescentStep, DescentTrace, holzer_reduce
from legz.gaussint import GaussianInt, GaussianRational
from legz.normform import LegendreEquation, NormalizationTrace, Solution, normalize
from legz.solvecheck import brute_force_search, check_solution, samet_solvable

__all__ = [
    "DescentStep",
    "DescentTrace",
    "GaussianInt",
    "GaussianRational",
    "LegendreEquation",
    "NormalizationTrace",
    "Solution",
    "brute_force_search",
    "check_solution",
    "exceptions",
    "holzer_reduce",
    "normalize",
    "samet_solvable",
]
