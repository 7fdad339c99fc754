"""Stratified lattices, stratified least fixed points, and an
infinite-valued solver for propositional logic programs with negation."""

__version__ = "0.1.0"

from stratfix.axioms import AxiomReport, check_axioms
from stratfix.fixpoint import dagger, inner_fix, stratified_fix
from stratfix.models import FiniteModel
from stratfix.programs import (
    Program,
    Rule,
    collapse_wfs,
    immediate_consequence,
    parse_program,
    solve,
    wfs_oracle,
)
from stratfix.values import Interpretation, TruthValue

__all__ = [
    "AxiomReport",
    "FiniteModel",
    "Interpretation",
    "Program",
    "Rule",
    "TruthValue",
    "check_axioms",
    "collapse_wfs",
    "dagger",
    "immediate_consequence",
    "inner_fix",
    "parse_program",
    "solve",
    "stratified_fix",
    "wfs_oracle",
]
