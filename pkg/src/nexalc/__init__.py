"""Decision procedure for fuzzy ALC with Zadeh connectives and constant shifts."""

from .grid import Grid, associated_assertion, compute_grid
from .model import ModelError, extract_model
from .oracle import Outcome, brute_force_sat, classical_decide, crispify
from .parser import parse, parse_assertion, parse_concept, parse_gci, parse_kb
from .semantics import Interpretation, evaluate
from .solver import Verdict, is_satisfiable, is_valid, solve_on_the_fly
from .syntax import ABox, Assertion, CmpOp, GCI, KB, Sequent
from .tableau import RulePolicy

__all__ = [
    "ABox", "Assertion", "CmpOp", "GCI", "Grid", "Interpretation", "KB", "ModelError", "Outcome",
    "RulePolicy", "Sequent", "Verdict", "associated_assertion", "brute_force_sat", "classical_decide",
    "compute_grid", "crispify", "evaluate", "extract_model", "is_satisfiable", "is_valid", "parse",
    "parse_assertion", "parse_concept", "parse_gci", "parse_kb", "solve_on_the_fly",
]
