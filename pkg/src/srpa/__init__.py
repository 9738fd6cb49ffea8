"""Decide language equivalence of series-rational expressions and of states in
fork-acyclic pomset automata."""

from srpa.automaton import (
    Pa,
    PaError,
    accepts_empty,
    check_structure,
    is_fork_acyclic,
    leadsto,
    load,
    loads,
    membership,
    restrict,
    save,
    support_analysis,
    support_closure,
    validate,
)
from srpa.equiv import build_atom_nfa, nfa_atoms, pa_atoms, state_equiv
from srpa.expr import Expr, lang_up_to, nullable, parse_expr, simplify
from srpa.kleene import compile_exprs, delta_derivative, expr_equiv, expr_support, extract, gamma_derivative
from srpa.multiset import Multiset
from srpa.oracle import enumerate_sp, oracle_equiv, pa_lang_up_to
from srpa.pomset import EMPTY, SpTerm, parse_pomset
from srpa.wellstruct import flatten_forks, parsimonize, remove_nullary_forks, remove_unary_forks, strengthen, well_structure

__version__ = "0.1.0"
