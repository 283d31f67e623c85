"""DATR lexical knowledge representation: parser, evaluator and reference oracle."""

from .evaluator import (
    Context, EvalConfig, LimitExceeded, TraceEvent, Undefined, Value, evaluate_query,
    format_outcome,
)
from .model import (
    Atom, AtomSym, DefSentence, DuplicateError, GlobalNode, GlobalNodePath, GlobalPath,
    GoalSentence, LocalNodePath, NodeSym, Theory, path,
)
from .parser import ParseError, parse_goals, parse_query, parse_theory, render_sentence

__version__ = "0.1.0"
