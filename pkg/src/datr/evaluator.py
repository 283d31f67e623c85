"""Query evaluation with global context threading.

Two modes share one interpreter:

``default``
    A lookup at node ``N`` for path ``p`` uses the longest explicitly
    defined prefix of ``p``; the leftover suffix is handed to every
    descriptor on the matched right-hand side and appended to the paths
    they look up.
``strict``
    Only exact paths are defined and no suffix is ever passed down.

Evaluation is step-bounded so that cyclic theories terminate with
:class:`LimitExceeded` instead of running forever.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from . import _trampoline
from .model import (
    Atom, Descriptor, GlobalNode, GlobalNodePath, GlobalPath, LocalNodePath,
    NodeSym, NotFound, Path, Theory, ValueSeq, longest_prefix_lookup,
)
from .parser import render_descriptor, render_location, render_path, render_value

__all__ = [
    "STRICT", "DEFAULT", "DEFAULT_MAX_STEPS", "NO_PREFIX", "UNKNOWN_NODE",
    "Context", "EvalConfig", "Value", "Undefined", "LimitExceeded", "EvalOutcome",
    "TraceEvent", "evaluate_query", "eval_local", "eval_descriptor", "eval_sequence",
    "format_outcome",
]

STRICT = "strict"
DEFAULT = "default"
DEFAULT_MAX_STEPS = 10_000

NO_PREFIX = "no-prefix"
UNKNOWN_NODE = "unknown-node"


@dataclass(frozen=True)
class Context:
    global_node: NodeSym
    global_path: ValueSeq


@dataclass(frozen=True)
class EvalConfig:
    mode: str = DEFAULT
    max_steps: int = DEFAULT_MAX_STEPS
    trace_enabled: bool = False

    def __post_init__(self) -> None:
        if self.mode not in (STRICT, DEFAULT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")


@dataclass(frozen=True)
class Value:
    value: ValueSeq


@dataclass(frozen=True)
class Undefined:
    reason: str
    node: NodeSym
    path: Path


@dataclass(frozen=True)
class LimitExceeded:
    steps: int


EvalOutcome = Union[Value, Undefined, LimitExceeded]


def format_outcome(outcome: EvalOutcome) -> str:
    if isinstance(outcome, Value):
        return render_value(outcome.value)
    if isinstance(outcome, Undefined):
        return f"UNDEFINED ({outcome.reason} at {render_location(outcome.node, outcome.path)})"
    return f"LIMIT EXCEEDED ({outcome.steps} steps)"


@dataclass(frozen=True)
class TraceEvent:
    step: int
    kind: str  # "lookup" | "descriptor" | "context-switch"
    global_ctx: Context
    local_node: NodeSym
    local_path: ValueSeq
    detail: str

    def format(self) -> str:
        g = render_location(self.global_ctx.global_node, self.global_ctx.global_path)
        loc = render_location(self.local_node, self.local_path)
        return f"{self.step}\t{self.kind}\tglobal={g}\tlocal={loc}\t{self.detail}"


class _Abort(Exception):
    def __init__(self, outcome: EvalOutcome):
        self.outcome = outcome


class _Run:
    """State for one evaluation: step counter and trace buffer."""

    def __init__(self, theory: Theory, cfg: EvalConfig):
        self.theory = theory
        self.cfg = cfg
        self.strict = cfg.mode == STRICT
        self.steps = 0
        self.events: List[TraceEvent] = []

    def emit(self, kind: str, c: Context, n: NodeSym, p: ValueSeq, detail: str) -> None:
        if self.cfg.trace_enabled:
            self.events.append(TraceEvent(len(self.events) + 1, kind, c, n, p, detail))

    def local(self, c: Context, n: NodeSym, p: ValueSeq):
        node_def = self.theory.definition(n)
        if not node_def:
            raise _Abort(Undefined(UNKNOWN_NODE, n, p))
        if self.strict:
            rhs = node_def.entries.get(p)
            if rhs is None:
                raise _Abort(Undefined(NO_PREFIX, n, p))
            explicit, suffix = p, ()
        else:
            try:
                explicit, rhs, suffix = longest_prefix_lookup(node_def, p)
            except NotFound:
                raise _Abort(Undefined(NO_PREFIX, n, p)) from None
        self.emit("lookup", c, n, p, render_path(explicit))
        return (yield self.sequence(c, rhs, suffix, n, p))

    def sequence(self, c: Context, rhs: Iterable[Descriptor], ext: ValueSeq,
                 n: NodeSym, p: ValueSeq):
        out: list = []
        for d in rhs:
            out.extend((yield self.descriptor(c, d, ext, n, p)))
        return tuple(out)

    def descriptor(self, c: Context, d: Descriptor, ext: ValueSeq, n: NodeSym, p: ValueSeq):
        self.steps += 1
        if self.steps > self.cfg.max_steps:
            raise _Abort(LimitExceeded(self.steps))
        if self.cfg.trace_enabled:
            self.emit("descriptor", c, n, p, render_descriptor(d))
        if isinstance(d, Atom):
            return (d.sym,)
        if isinstance(d, GlobalNode):
            # no descriptor path to extend: the global path is reused as is
            c2 = Context(d.node, c.global_path)
            self.emit("context-switch", c2, n, p, '"%s"' % d.node)
            return (yield self.local(c2, d.node, c2.global_path))
        # subterms are always evaluated at the empty extension
        target = (yield self.sequence(c, d.path, (), n, p)) + ext
        if isinstance(d, LocalNodePath):
            return (yield self.local(c, d.node, target))
        if isinstance(d, GlobalNodePath):
            c2 = Context(d.node, target)
        elif isinstance(d, GlobalPath):
            c2 = Context(c.global_node, target)
        else:
            raise TypeError(f"not a descriptor: {d!r}")
        self.emit("context-switch", c2, n, p, render_location(c2.global_node, target))
        return (yield self.local(c2, c2.global_node, target))


def _execute(run: _Run, comp) -> EvalOutcome:
    try:
        return Value(_trampoline.run(comp))
    except _Abort as abort:
        return abort.outcome


def evaluate_query(theory: Theory, n: NodeSym, p: Sequence[str],
                   cfg: Optional[EvalConfig] = None) -> Tuple[EvalOutcome, List[TraceEvent]]:
    """Evaluate ``n:p`` with the global context seeded to ``(n, p)``."""
    cfg = cfg or EvalConfig()
    p = tuple(p)
    run = _Run(theory, cfg)
    outcome = _execute(run, run.local(Context(n, p), n, p))
    return outcome, run.events


def eval_local(theory: Theory, c: Context, n: NodeSym, p: Sequence[str],
               cfg: Optional[EvalConfig] = None) -> EvalOutcome:
    run = _Run(theory, cfg or EvalConfig())
    return _execute(run, run.local(c, n, tuple(p)))


def eval_descriptor(theory: Theory, c: Context, d: Descriptor, ext: Sequence[str] = (),
                    cfg: Optional[EvalConfig] = None) -> EvalOutcome:
    run = _Run(theory, cfg or EvalConfig())
    return _execute(run, run.descriptor(c, d, tuple(ext), c.global_node, c.global_path))


def eval_sequence(theory: Theory, c: Context, phi: Iterable[Descriptor], ext: Sequence[str] = (),
                  cfg: Optional[EvalConfig] = None) -> EvalOutcome:
    run = _Run(theory, cfg or EvalConfig())
    return _execute(run, run.sequence(c, tuple(phi), tuple(ext), c.global_node, c.global_path))
