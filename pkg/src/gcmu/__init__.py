"""Global-caching satisfiability checking for the alternation-free mu-calculus."""

from gcmu.formula import (
    And, Box, Bot, Diamond, Formula, Mu, NegProp, Nu, Or, Prop, Top, Var,
    desugar, negate_nnf, normalize, to_str,
)
from gcmu.parser import ParseError, parse

__version__ = "0.1.0"

__all__ = [
    "And", "Box", "Bot", "Diamond", "Formula", "Mu", "NegProp", "Nu", "Or",
    "ParseError", "Prop", "Top", "Var", "desugar", "negate_nnf", "normalize",
    "parse", "to_str",
]
