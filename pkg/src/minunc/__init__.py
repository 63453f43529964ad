"""Minimum-uncertainty states, entanglement and the HUR/SR gap."""

from .errors import MinUncError
from .linalg import BipartiteState, DensityMatrix, StateVector, schmidt
from .mixedstate import d_curve, equivalence_check, purity_bounds, saturator
from .models import EPRGaussian, FockSystem, Grid1D, SpinSystem
from .search import SearchProblem, SearchResult, minimize_gap, saturation_hunt
from .uncertainty import Mode, TwoBranchState, Verdict, evaluate, saturation_analysis

__version__ = "0.1.0"

__all__ = [
    "BipartiteState",
    "DensityMatrix",
    "EPRGaussian",
    "FockSystem",
    "Grid1D",
    "MinUncError",
    "Mode",
    "SearchProblem",
    "SearchResult",
    "SpinSystem",
    "StateVector",
    "TwoBranchState",
    "Verdict",
    "d_curve",
    "equivalence_check",
    "evaluate",
    "minimize_gap",
    "purity_bounds",
    "saturation_analysis",
    "saturation_hunt",
    "saturator",
    "schmidt",
]
