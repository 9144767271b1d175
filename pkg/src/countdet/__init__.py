"""Counting automata: regex compilation, determinisation into deterministic
counting automata, and a naive DFA baseline."""
from .alphabet import CharClass
from .automaton import CountingAutomaton, Dca, accepts, run_dca, validate_mca
from .config import Limits
from .frontend import compile_pattern
from .generaldet import determinise, determinise_reachable
from .monadicdet import determinise_monadic
from .naive import determinise as determinise_naive

__all__ = [
    "CharClass",
    "CountingAutomaton",
    "Dca",
    "Limits",
    "accepts",
    "compile_pattern",
    "determinise",
    "determinise_monadic",
    "determinise_naive",
    "determinise_reachable",
    "run_dca",
    "validate_mca",
]
