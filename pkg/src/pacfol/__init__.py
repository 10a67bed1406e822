"""Implicit learning and limited reasoning over proper+ first-order knowledge bases."""

from .grounding import fresh_names, gnd_minus, gnd_with_names, gnd_z
from .implicit import LearnConfig, Estimate, decide, estimate, sample_size
from .limited import entails_z, entails_z_formula, up_closure
from .models import PartialModel, WorldModel, evaluate, restrict, witness_eval
from .parser import parse_kb, parse_query
from .sat import check_entailment, entails, satisfiable
from .syntax import ForallClause, ProperPlusKB

__all__ = [
    "Estimate", "ForallClause", "LearnConfig", "PartialModel", "ProperPlusKB", "WorldModel",
    "check_entailment", "decide", "entails", "entails_z", "entails_z_formula", "estimate",
    "evaluate", "fresh_names", "gnd_minus", "gnd_with_names", "gnd_z", "parse_kb",
    "parse_query", "restrict", "sample_size", "satisfiable", "up_closure", "witness_eval",
]

__version__ = "0.1.0"
