"""Concrete syntax for ``.dtr`` theory files and ``.dtg`` goal files.

Theory files::

    % comment to end of line
    Verb: <syn cat> == verb .
          <mor past> == "<mor root>" ed .
    Walk: <> == Verb .
          <mor root> == walk .

A clause that starts with ``<`` continues the most recent node block.  On
the right-hand side a lone node ``N`` abbreviates ``N:<lhs path>`` and a
lone path ``<...>`` abbreviates ``Current:<...>``.  Quoted forms are kept
as written; their missing halves come from the global context at
evaluation time.

Goal files hold one extensional sentence per goal::

    Walk:<mor past> = walk ed .
    Walk:<mor form> = UNDEFINED .
    Walk:<syn cat> ?
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .model import (
    Atom, AtomSym, DefSentence, Descriptor, DuplicateError, GlobalNode,
    GlobalNodePath, GlobalPath, GoalSentence, LocalNodePath, NodeSym, Path,
    Theory,
)

__all__ = [
    "SourceSpan", "Diagnostic", "ParseError",
    "parse_theory", "parse_goals", "parse_query",
    "render_path", "render_descriptor", "render_rhs", "render_sentence",
    "render_theory", "render_value", "render_location",
]


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 0

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"bad span {self!r}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    span: SourceSpan
    message: str
    code: str

    def __str__(self) -> str:
        return (f"{self.span.line}:{self.span.column}: {self.severity}: "
                f"{self.message} [{self.code}]")


class ParseError(Exception):
    """Raised when the input has at least one error diagnostic."""

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        errors = [d for d in self.diagnostics if d.severity == "error"]
        super().__init__(str(errors[0]) if errors else "parse error")


# -- lexer --------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<defeq>==)
  | (?P<punct>[<>":=.?]|⟨|⟩)
  | (?P<ident>[A-Za-z0-9_]+)
  | (?P<bad>.)
""", re.VERBOSE)

_PUNCT_ALIASES = {"⟨": "<", "⟩": ">"}


@dataclass(frozen=True)
class _Tok:
    kind: str   # "atom", "node", punctuation text, or "eof"
    text: str
    line: int
    col: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.col, len(self.text))


def _tokenize(text: str, diags: List[Diagnostic]) -> List[_Tok]:
    toks: List[_Tok] = []
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        s = m.group()
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind in ("ws", "comment"):
            continue
        elif kind == "bad":
            diags.append(Diagnostic("error", SourceSpan(line, col, 1),
                                    f"unexpected character {s!r}", "bad-character"))
        elif kind == "ident":
            toks.append(_Tok("node" if s[0].isupper() else "atom", s, line, col))
        else:
            s = _PUNCT_ALIASES.get(s, s)
            toks.append(_Tok(s, s, line, col))
    toks.append(_Tok("eof", "", line, max(1, len(text) - line_start + 1)))
    return toks


class _Syntax(Exception):
    def __init__(self, tok: _Tok, message: str, code: str):
        self.diagnostic = Diagnostic("error", tok.span, message, code)


class _Parser:

    def __init__(self, text: str):
        self.diags: List[Diagnostic] = []
        self.toks = _tokenize(text, self.diags)
        self.i = 0
        self.node_refs: List[Tuple[NodeSym, SourceSpan]] = []

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str, message: str, code: str) -> _Tok:
        if self.tok.kind != kind:
            raise _Syntax(self.tok, message, code)
        return self.advance()

    def error(self, exc: _Syntax) -> None:
        self.diags.append(exc.diagnostic)
        # resynchronise just past the next terminator
        while self.tok.kind not in (".", "eof"):
            self.advance()
        self.advance()

    def node(self, tok: _Tok) -> NodeSym:
        n = NodeSym(tok.text)
        self.node_refs.append((n, tok.span))
        return n

    # -- paths

    def atom_path(self) -> Path:
        self.expect("<", "expected '<' to open a path", "expected-path")
        atoms = []
        while self.tok.kind == "atom":
            atoms.append(AtomSym(self.advance().text))
        if self.tok.kind != ">":
            if self.tok.kind in (".", "eof", "=", "==", "?"):
                raise _Syntax(self.tok, "unterminated path", "unterminated-path")
            raise _Syntax(self.tok, f"only atoms may appear in this path, got {self.tok.text!r}",
                          "bad-path-element")
        self.advance()
        return tuple(atoms)

    def descriptor_path(self) -> Tuple[Descriptor, ...]:
        self.expect("<", "expected '<' to open a path", "expected-path")
        elems = []
        while self.tok.kind != ">":
            if self.tok.kind in (".", "eof", "==", "="):
                raise _Syntax(self.tok, "unterminated path", "unterminated-path")
            elems.append(self.path_element())
        self.advance()
        return tuple(elems)

    def path_element(self) -> Descriptor:
        t = self.tok
        if t.kind == "atom":
            self.advance()
            return Atom(AtomSym(t.text))
        if t.kind == '"':
            return self.quoted()
        if t.kind == "node":
            if self.peek().kind != ":":
                raise _Syntax(t, f"bare node {t.text!r} is not allowed inside a path",
                              "bare-node-in-path")
            self.advance()
            self.advance()
            return LocalNodePath(self.node(t), self.descriptor_path())
        if t.kind == "<":
            raise _Syntax(t, "bare path is not allowed inside a path", "bare-path-in-path")
        raise _Syntax(t, f"unexpected {t.text!r} in path", "unexpected-token")

    def quoted(self) -> Descriptor:
        self.expect('"', "expected '\"'", "unexpected-token")
        t = self.tok
        if t.kind == "node":
            self.advance()
            n = self.node(t)
            if self.tok.kind == ":":
                self.advance()
                d: Descriptor = GlobalNodePath(n, self.descriptor_path())
            else:
                d = GlobalNode(n)
        elif t.kind == "<":
            d = GlobalPath(self.descriptor_path())
        else:
            raise _Syntax(t, "expected a node or path after '\"'", "bad-quoted")
        self.expect('"', "unterminated quoted descriptor", "unterminated-quote")
        return d

    # -- sentences

    def rhs(self, current: NodeSym, lhs: Path) -> Tuple[Descriptor, ...]:
        out: List[Descriptor] = []
        while self.tok.kind != ".":
            t = self.tok
            if t.kind == "eof":
                raise _Syntax(t, "missing '.' at end of sentence", "missing-terminator")
            if t.kind in ("==", "="):
                raise _Syntax(t, "missing '.' before this clause", "missing-terminator")
            if t.kind == "node" and self.peek().kind != ":":
                self.advance()
                out.append(LocalNodePath(self.node(t), tuple(Atom(a) for a in lhs)))
            elif t.kind == "<":
                out.append(LocalNodePath(current, self.descriptor_path()))
            else:
                out.append(self.path_element())
        self.advance()
        return tuple(out)

    def theory(self) -> List[Tuple[DefSentence, SourceSpan]]:
        sentences = []
        current: Optional[NodeSym] = None
        while self.tok.kind != "eof":
            start = self.tok
            try:
                if start.kind == "node" and self.peek().kind == ":":
                    current = NodeSym(start.text)
                    self.advance()
                    self.advance()
                elif start.kind != "<":
                    raise _Syntax(start, f"expected a node header or a path, got {start.text!r}",
                                  "unexpected-token")
                elif current is None:
                    raise _Syntax(start, "clause without a node header", "missing-node")
                lhs = self.atom_path()
                self.expect("==", "expected '=='", "missing-defeq")
                sentences.append((DefSentence(current, lhs, self.rhs(current, lhs)), start.span))
            except _Syntax as exc:
                self.error(exc)
        return sentences

    def goals(self) -> List[GoalSentence]:
        out = []
        while self.tok.kind != "eof":
            start = self.tok
            try:
                t = self.expect("node", "expected a node name", "expected-node")
                self.expect(":", "expected ':' after node", "expected-colon")
                p = self.atom_path()
                if self.tok.kind == "?":
                    self.advance()
                    out.append(GoalSentence(NodeSym(t.text), p, line=start.line))
                    continue
                if self.tok.kind == "==":
                    raise _Syntax(self.tok, "definitional sentence in a goal file", "definition-in-goals")
                self.expect("=", "expected '=' or '?'", "missing-eq")
                if self.tok.kind == "node" and self.tok.text == "UNDEFINED":
                    self.advance()
                    self.expect(".", "missing '.' at end of goal", "missing-terminator")
                    out.append(GoalSentence(NodeSym(t.text), p, expect_undefined=True,
                                            line=start.line))
                    continue
                vals = []
                while self.tok.kind == "atom":
                    vals.append(AtomSym(self.advance().text))
                self.expect(".", "missing '.' at end of goal", "missing-terminator")
                out.append(GoalSentence(NodeSym(t.text), p, tuple(vals), line=start.line))
            except _Syntax as exc:
                self.error(exc)
        return out


def parse_theory(text: str) -> Tuple[Theory, List[Diagnostic]]:
    """Parse and desugar theory source.

    Returns the theory together with any warnings.  Raises
    :class:`ParseError` carrying every diagnostic if there are errors,
    including functionality violations.
    """
    p = _Parser(text)
    sentences = p.theory()
    theory = Theory()
    for s, span in sentences:
        try:
            theory._insert(s)
        except DuplicateError as exc:
            p.diags.append(Diagnostic("error", span, str(exc), "duplicate-definition"))
    if any(d.severity == "error" for d in p.diags):
        raise ParseError(p.diags)
    defined = set(theory.node_order)
    warned = set()
    for n, span in p.node_refs:
        if n not in defined and n not in warned:
            warned.add(n)
            p.diags.append(Diagnostic("warning", span, f"node {n} has no definition",
                                      "undefined-node"))
    return theory, p.diags


def parse_goals(text: str) -> Tuple[List[GoalSentence], List[Diagnostic]]:
    """Parse a goal file; malformed goals become diagnostics, the rest are kept."""
    p = _Parser(text)
    goals = p.goals()
    return goals, p.diags


def parse_query(text: str) -> Tuple[NodeSym, Path]:
    """Parse ``Node:<a b c>`` as typed on a command line."""
    p = _Parser(text)
    try:
        t = p.expect("node", "expected a node name", "expected-node")
        p.expect(":", "expected ':' after node", "expected-colon")
        path = p.atom_path()
        if p.tok.kind in (".", "?"):
            p.advance()
        if p.tok.kind != "eof":
            raise _Syntax(p.tok, f"trailing input {p.tok.text!r}", "unexpected-token")
    except _Syntax as exc:
        p.diags.append(exc.diagnostic)
    if p.diags:
        raise ParseError(p.diags)
    return NodeSym(t.text), path


# -- rendering ----------------------------------------------------------

def render_path(p: Iterable[str]) -> str:
    return "<" + " ".join(p) + ">"


def _render_subterms(ds: Iterable[Descriptor]) -> str:
    return "<" + " ".join(render_descriptor(d) for d in ds) + ">"


def render_descriptor(d: Descriptor) -> str:
    if isinstance(d, Atom):
        return d.sym
    if isinstance(d, LocalNodePath):
        return f"{d.node}:{_render_subterms(d.path)}"
    if isinstance(d, GlobalNodePath):
        return f'"{d.node}:{_render_subterms(d.path)}"'
    if isinstance(d, GlobalPath):
        return f'"{_render_subterms(d.path)}"'
    if isinstance(d, GlobalNode):
        return f'"{d.node}"'
    raise TypeError(f"not a descriptor: {d!r}")


def render_rhs(rhs: Iterable[Descriptor]) -> str:
    return " ".join(render_descriptor(d) for d in rhs)


def render_sentence(s: DefSentence) -> str:
    parts = [f"{s.node}:", render_path(s.lhs_path), "=="]
    parts.extend(render_descriptor(d) for d in s.rhs)
    parts.append(".")
    return " ".join(parts)


def render_theory(theory: Theory) -> str:
    return "".join(render_sentence(s) + "\n" for s in theory)


def render_value(v: Sequence[str]) -> str:
    return " ".join(v) if v else "()"


def render_location(node: str, p: Iterable[str]) -> str:
    return f"{node}:{render_path(p)}"
