from .encode import NondetSymbol, SsaFormula, encode_ssa
from .engine import (MODEL, UNREACHABLE, BmcConfig, BmcResult, Verdict, run_incremental,
                     solve_goal, tape_from_model)
from .passes import constant_fold, slice_formula
from .unroll import Inlined, LoopFreeProgram, Unwound, unroll

__all__ = ["NondetSymbol", "SsaFormula", "encode_ssa", "MODEL", "UNREACHABLE", "BmcConfig",
           "BmcResult", "Verdict", "run_incremental", "solve_goal", "tape_from_model",
           "constant_fold", "slice_formula", "Inlined", "LoopFreeProgram", "Unwound", "unroll"]
