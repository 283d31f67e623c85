"""Brute-force reference semantics for the default mechanism.

Nothing here calls the evaluator's lookup machinery.  Two formulations are
provided:

* :func:`closure_sentences` expands every explicit sentence into the
  family of implicit sentences it stands for (paths extended on both
  sides by the same suffix, unless a more specific explicit sentence
  shadows it), up to a fixed suffix length.  :class:`Oracle` then
  evaluates queries by exact-match lookup in that finite table.
* :func:`delta_evaluate` interprets descriptors as functions from path
  extensions to values and applies :func:`delta` (longest defined prefix,
  found by scanning prefixes) at every node lookup.

:func:`cross_check` compares the evaluator against the closure oracle over
every query up to a given path length.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import (
    Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple,
)

from . import _trampoline, evaluator
from .evaluator import (
    NO_PREFIX, UNKNOWN_NODE, Context, EvalConfig, EvalOutcome, LimitExceeded, Undefined, Value,
    format_outcome,
)
from .model import (
    Atom, AtomSym, DefSentence, Descriptor, GlobalNode, GlobalNodePath, GlobalPath,
    LocalNodePath, NodeSym, Path, Theory,
)
from .parser import render_path

__all__ = [
    "PAD", "ClosureParams", "CrossCheckReport", "HorizonError",
    "default_alphabet", "extend_descriptor", "closure_table", "closure_sentences",
    "Oracle", "oracle_evaluate", "delta", "delta_evaluate", "cross_check", "random_theory",
    "random_theories",
]

PAD = AtomSym("_pad")


@dataclass(frozen=True)
class ClosureParams:
    """Truncation of the implicit-sentence family.

    ``alphabet=None`` means the theory's atoms plus :data:`PAD`.
    ``horizon`` is the suffix length used to build the closure table and
    defaults to ``depth``; a larger horizon lets more deep lookups be
    checked instead of skipped.
    """
    depth: int = 2
    alphabet: Optional[FrozenSet[AtomSym]] = None
    step_budget: int = 10_000
    horizon: Optional[int] = None

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.step_budget < 1:
            raise ValueError("step_budget must be >= 1")
        if self.alphabet is not None:
            object.__setattr__(self, "alphabet", frozenset(AtomSym(a) for a in self.alphabet))
            if self.depth > 0 and not self.alphabet:
                raise ValueError("alphabet must be non-empty when depth > 0")

    @property
    def closure_depth(self) -> int:
        return self.depth if self.horizon is None else max(self.horizon, self.depth)


class HorizonError(Exception):
    """The lookup needs a suffix the truncated closure does not contain."""

    def __init__(self, node: NodeSym, p: Path):
        self.node = node
        self.path = p
        super().__init__(f"{node}:{render_path(p)} lies beyond the closure horizon")


def default_alphabet(theory: Theory, extra: Iterable[str] = ()) -> FrozenSet[AtomSym]:
    return frozenset(theory.atoms()) | {AtomSym(a) for a in extra} | {PAD}


def extend_descriptor(d: Descriptor, suffix: Path) -> Descriptor:
    """Append ``suffix`` to the path of an inheritance descriptor.

    Atoms are constant and a quoted bare node has no path, so both come
    back unchanged.
    """
    if not suffix or isinstance(d, (Atom, GlobalNode)):
        return d
    tail = tuple(Atom(a) for a in suffix)
    if isinstance(d, LocalNodePath):
        return LocalNodePath(d.node, d.path + tail)
    if isinstance(d, GlobalNodePath):
        return GlobalNodePath(d.node, d.path + tail)
    return GlobalPath(d.path + tail)


def closure_table(theory: Theory, params: ClosureParams,
                  depth: Optional[int] = None) -> Dict[Tuple[NodeSym, Path], Tuple[Descriptor, ...]]:
    explicit = theory.sentences
    alphabet = sorted(params.alphabet if params.alphabet is not None else default_alphabet(theory))
    depth = params.depth if depth is None else depth
    table = {}
    for (n, lhs), rhs in explicit.items():
        for k in range(depth + 1):
            for suffix in itertools.product(alphabet, repeat=k):
                full = lhs + suffix
                shadowed = any((n, full[:j]) in explicit for j in range(len(lhs) + 1, len(full) + 1))
                if not shadowed:
                    table[(n, full)] = tuple(extend_descriptor(d, suffix) for d in rhs)
    return table


def closure_sentences(theory: Theory, params: ClosureParams) -> Set[DefSentence]:
    return {DefSentence(n, p, rhs) for (n, p), rhs in closure_table(theory, params).items()}


class _OutOfSteps(Exception):
    pass


class _Undef(Exception):
    def __init__(self, outcome: Undefined):
        self.outcome = outcome


class Oracle:
    """Exact-match evaluation over a materialised closure table."""

    def __init__(self, theory: Theory, params: ClosureParams):
        self.theory = theory
        self.params = params
        self.table = closure_table(theory, params, params.closure_depth)
        self._explicit = theory.sentences
        self._defined = set(theory.node_order)

    def evaluate(self, n: NodeSym, p: Sequence[str]) -> EvalOutcome:
        """Raises :class:`HorizonError` if the answer depends on a path the
        truncated closure cannot see."""
        p = tuple(p)
        self._steps = 0
        try:
            return Value(_trampoline.run(self._lookup(Context(n, p), n, p)))
        except _Undef as u:
            return u.outcome
        except _OutOfSteps:
            return LimitExceeded(self._steps)

    def _lookup(self, c: Context, n: NodeSym, v: Path):
        rhs = self.table.get((n, v))
        if rhs is None:
            if n not in self._defined:
                raise _Undef(Undefined(UNKNOWN_NODE, n, v))
            if any((n, v[:j]) in self._explicit for j in range(len(v) + 1)):
                raise HorizonError(n, v)
            raise _Undef(Undefined(NO_PREFIX, n, v))
        out: list = []
        for d in rhs:
            out.extend((yield self._desc(c, d)))
        return tuple(out)

    def _desc(self, c: Context, d: Descriptor):
        self._steps += 1
        if self._steps > self.params.step_budget:
            raise _OutOfSteps
        if isinstance(d, Atom):
            return (d.sym,)
        if isinstance(d, GlobalNode):
            return (yield self._lookup(Context(d.node, c.global_path), d.node, c.global_path))
        q: list = []
        for sub in d.path:
            q.extend((yield self._desc(c, sub)))
        q = tuple(q)
        if isinstance(d, LocalNodePath):
            return (yield self._lookup(c, d.node, q))
        if isinstance(d, GlobalNodePath):
            return (yield self._lookup(Context(d.node, q), d.node, q))
        return (yield self._lookup(Context(c.global_node, q), c.global_node, q))


def oracle_evaluate(theory: Theory, n: NodeSym, p: Sequence[str],
                    params: Optional[ClosureParams] = None) -> EvalOutcome:
    """One-off oracle query.

    Without explicit params the closure covers suffixes up to ``len(p)``
    over the query's own atoms plus :data:`PAD`, which keeps the table
    small; pass params to widen it.
    """
    p = tuple(p)
    if params is None:
        params = ClosureParams(depth=len(p), alphabet=frozenset(p) | {PAD})
    return Oracle(theory, params).evaluate(n, p)


# -- direct default interpretation -----------------------------------------

def delta(f: Mapping[Path, Callable[[Path], object]]) -> Callable[[Path], object]:
    """Default interpretation of a node definition.

    ``f`` maps explicit paths to functions of the path extension.  The
    result maps ``v`` to ``f[v1](v2)`` where ``v1`` is the longest prefix
    of ``v`` in ``f`` and ``v = v1 + v2``; it raises ``KeyError`` when no
    prefix is defined.
    """
    def apply(v: Path):
        for i in range(len(v), -1, -1):
            family = f.get(v[:i])
            if family is not None:
                return family(v[i:])
        raise KeyError(v)
    return apply


class _DeltaSemantics:
    def __init__(self, theory: Theory, step_budget: int):
        self.theory = theory
        self.budget = step_budget
        self.steps = 0

    def node_function(self, c: Context, n: NodeSym) -> Dict[Path, Callable]:
        return {p: (lambda v, rhs=rhs: self.sequence(c, rhs, v))
                for (m, p), rhs in self.theory.sentences.items() if m == n}

    def node(self, c: Context, n: NodeSym, v: Path):
        f = self.node_function(c, n)
        if not f:
            raise _Undef(Undefined(UNKNOWN_NODE, n, v))
        try:
            comp = delta(f)(v)
        except KeyError:
            raise _Undef(Undefined(NO_PREFIX, n, v)) from None
        return (yield comp)

    def sequence(self, c: Context, phi, v: Path):
        out: list = []
        for d in phi:
            out.extend((yield self.meaning(c, d)(v)))
        return tuple(out)

    def meaning(self, c: Context, d: Descriptor) -> Callable[[Path], object]:
        """The path-indexed family of values ``d`` denotes in context ``c``."""
        def fam(v: Path):
            self.steps += 1
            if self.steps > self.budget:
                raise _OutOfSteps
            if isinstance(d, Atom):
                return (d.sym,)
            if isinstance(d, GlobalNode):
                return (yield self.node(Context(d.node, c.global_path), d.node, c.global_path))
            q = (yield self.sequence(c, d.path, ())) + v
            if isinstance(d, LocalNodePath):
                return (yield self.node(c, d.node, q))
            c2 = Context(d.node if isinstance(d, GlobalNodePath) else c.global_node, q)
            return (yield self.node(c2, c2.global_node, q))
        return fam


def delta_evaluate(theory: Theory, n: NodeSym, p: Sequence[str],
                   step_budget: int = 10_000) -> EvalOutcome:
    p = tuple(p)
    sem = _DeltaSemantics(theory, step_budget)
    try:
        return Value(_trampoline.run(sem.node(Context(n, p), n, p)))
    except _Undef as u:
        return u.outcome
    except _OutOfSteps:
        return LimitExceeded(sem.steps)


# -- cross checking ---------------------------------------------------------

@dataclass
class CrossCheckReport:
    queries_checked: int = 0
    skipped: int = 0
    mismatches: List[Tuple[NodeSym, Path, EvalOutcome, EvalOutcome]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def merge(self, other: "CrossCheckReport") -> None:
        self.queries_checked += other.queries_checked
        self.skipped += other.skipped
        self.mismatches.extend(other.mismatches)

    def lines(self, label: str = "theory") -> List[str]:
        out = [f"summary\t{label}\tchecked={self.queries_checked}\tskipped={self.skipped}"
               f"\tmismatches={len(self.mismatches)}"]
        for n, p, ev, orc in self.mismatches:
            out.append(f"{n}\t{render_path(p)}\t{format_outcome(ev)}\t{format_outcome(orc)}")
        return out


def cross_check(theory: Theory, params: ClosureParams,
                evaluate: Optional[Callable] = None) -> CrossCheckReport:
    """Compare default-mode evaluation with the closure oracle.

    Every defined node is queried at every path over the alphabet of
    length at most ``params.depth``.  Queries where either side runs out
    of steps, or where the oracle's closure is too shallow, count as
    skipped.  ``evaluate`` replaces :func:`evaluator.evaluate_query`,
    which is how mutation tests inject a faulty evaluator.
    """
    evaluate = evaluate or evaluator.evaluate_query
    alphabet = params.alphabet if params.alphabet is not None else default_alphabet(theory)
    params = ClosureParams(params.depth, alphabet, params.step_budget, params.horizon)
    oracle = Oracle(theory, params)
    cfg = EvalConfig(max_steps=params.step_budget)
    report = CrossCheckReport()
    ordered = sorted(alphabet)
    for n in theory.node_order:
        for k in range(params.depth + 1):
            for p in itertools.product(ordered, repeat=k):
                ev, _ = evaluate(theory, n, p, cfg)
                if isinstance(ev, LimitExceeded):
                    report.skipped += 1
                    continue
                try:
                    orc = oracle.evaluate(n, p)
                except HorizonError:
                    report.skipped += 1
                    continue
                if isinstance(orc, LimitExceeded):
                    report.skipped += 1
                    continue
                report.queries_checked += 1
                if ev != orc:
                    report.mismatches.append((n, p, ev, orc))
    return report


# -- random theories --------------------------------------------------------

_PATH_ATOMS = tuple(AtomSym(a) for a in "abc")
_VALUE_ATOMS = _PATH_ATOMS + (AtomSym("x"),)


def _random_subterms(rng: random.Random, targets: Sequence[NodeSym], use_globals: bool,
                     nest: int) -> Tuple[Descriptor, ...]:
    out = []
    for _ in range(rng.choice((0, 0, 1, 1, 2))):
        if use_globals and nest > 0 and rng.random() < 0.2:
            out.append(_random_descriptor(rng, targets, use_globals, nest - 1))
        else:
            out.append(Atom(rng.choice(_PATH_ATOMS)))
    return tuple(out)


def _random_descriptor(rng: random.Random, targets: Sequence[NodeSym], use_globals: bool,
                       nest: int = 1) -> Descriptor:
    roll = rng.random()
    if roll < 0.35 or not targets:
        return Atom(rng.choice(_VALUE_ATOMS))
    if roll < 0.7 or not use_globals:
        return LocalNodePath(rng.choice(targets), _random_subterms(rng, targets, use_globals, nest))
    if roll < 0.8:
        return GlobalNodePath(rng.choice(targets), _random_subterms(rng, targets, use_globals, nest))
    if roll < 0.9:
        return GlobalPath(_random_subterms(rng, targets, use_globals, nest))
    return GlobalNode(rng.choice(targets))


def random_theory(seed: int, size: int, fanout: int, use_globals: bool = False) -> Theory:
    """Deterministic random theory with ``size`` nodes ``N1``..``Nsize``.

    Each node gets between 1 and ``fanout`` sentences on distinct paths of
    length at most 2 over ``a b c``.  Inheritance mostly points at
    later-numbered nodes, but back edges (and so cycles) do occur.
    """
    if size < 1 or fanout < 1:
        raise ValueError("size and fanout must be >= 1")
    rng = random.Random(seed)
    nodes = [NodeSym(f"N{i}") for i in range(1, size + 1)]
    candidates = [p for k in (1, 2) for p in itertools.product(_PATH_ATOMS, repeat=k)]
    sentences = []
    for i, n in enumerate(nodes):
        count = rng.randint(1, fanout)
        paths: List[Path] = [()] if rng.random() < 0.7 else []
        paths += rng.sample(candidates, max(0, count - len(paths)))
        for p in paths[:count]:
            targets = nodes if rng.random() < 0.1 else nodes[i + 1:]
            length = rng.choice((0, 1, 1, 1, 2, 2, 3))
            rhs = tuple(_random_descriptor(rng, targets, use_globals) for _ in range(length))
            sentences.append(DefSentence(n, p, rhs))
    return Theory(sentences)


def random_theories(first_seed: int, count: int, max_size: int = 6, fanout: int = 3,
                    use_globals: bool = True) -> Iterable[Tuple[int, Theory]]:
    """``count`` consecutive seeds, node counts cycling through 1..max_size."""
    for seed in range(first_seed, first_seed + count):
        yield seed, random_theory(seed, 1 + (seed - 1) % max_size, fanout, use_globals)
