from .engine import (
    ALGORITHMS,
    BARTER,
    GKPS,
    OutcomeTree,
    RoundingResult,
    TooManyOutcomes,
    barter_dr,
    enumerate_outcomes,
    gkps_dr,
    preprocess_cycles,
)
from .state import DefectError, RandomDecider, RoundingState, ScriptedDecider, TraceStep, write_trace
from .step import Coloring, compute_alpha_beta, round_pathseq, roundable_coloring
from .walks import CCC, CCW, PathSeq, cc_walk, check_pathseq, find_ccc, find_cycle

__all__ = [
    "ALGORITHMS",
    "BARTER",
    "CCC",
    "CCW",
    "GKPS",
    "Coloring",
    "DefectError",
    "OutcomeTree",
    "PathSeq",
    "RandomDecider",
    "RoundingResult",
    "RoundingState",
    "ScriptedDecider",
    "TooManyOutcomes",
    "TraceStep",
    "barter_dr",
    "cc_walk",
    "check_pathseq",
    "compute_alpha_beta",
    "enumerate_outcomes",
    "find_ccc",
    "find_cycle",
    "gkps_dr",
    "preprocess_cycles",
    "round_pathseq",
    "roundable_coloring",
    "write_trace",
]
