from .cdcl import SAT, UNKNOWN, UNSAT, SatResult, Solver, SolverConfig, solve_cnf
from .cnf import Cnf, parse_dimacs, to_dimacs

__all__ = ["SAT", "UNSAT", "UNKNOWN", "SatResult", "Solver", "SolverConfig", "solve_cnf",
           "Cnf", "parse_dimacs", "to_dimacs"]
