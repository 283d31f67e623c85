"""Abstract syntax and theory store.

Symbols are ``str`` subclasses whose constructors enforce the lexical split
between nodes (initial uppercase) and atoms (anything else), so the two
namespaces can never overlap.  Paths and values are plain tuples of
:class:`AtomSym`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Tuple, Union

__all__ = [
    "AtomSym", "NodeSym", "Path", "ValueSeq",
    "Atom", "LocalNodePath", "GlobalNodePath", "GlobalPath", "GlobalNode",
    "Descriptor", "DefSentence", "GoalSentence", "Theory", "NodeDef",
    "PathTrie", "DuplicateError", "NotFound",
    "theory_add_sentence", "node_definition", "longest_prefix_lookup",
    "path", "descriptor_nodes", "descriptor_atoms",
]

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")


class AtomSym(str):
    __slots__ = ()

    def __new__(cls, name: str) -> "AtomSym":
        if not _IDENT.match(name) or name[0].isupper():
            raise ValueError(f"not an atom symbol: {name!r}")
        return super().__new__(cls, name)

    def __repr__(self) -> str:
        return f"AtomSym({str(self)!r})"


class NodeSym(str):
    __slots__ = ()

    def __new__(cls, name: str) -> "NodeSym":
        if not _IDENT.match(name) or not name[0].isupper():
            raise ValueError(f"not a node symbol: {name!r}")
        return super().__new__(cls, name)

    def __repr__(self) -> str:
        return f"NodeSym({str(self)!r})"


Path = Tuple[AtomSym, ...]
ValueSeq = Tuple[AtomSym, ...]


def path(text: str) -> Path:
    """``path("mor root")`` -> ``(AtomSym('mor'), AtomSym('root'))``."""
    return tuple(AtomSym(a) for a in text.split())


# -- descriptors ------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    sym: AtomSym


@dataclass(frozen=True)
class LocalNodePath:
    """``N:<d1 ... dn>``; leaves the global context alone."""
    node: NodeSym
    path: Tuple["Descriptor", ...] = ()


@dataclass(frozen=True)
class GlobalNodePath:
    """``"N:<d1 ... dn>"``; overwrites the global context."""
    node: NodeSym
    path: Tuple["Descriptor", ...] = ()


@dataclass(frozen=True)
class GlobalPath:
    """``"<d1 ... dn>"``; node taken from the global context."""
    path: Tuple["Descriptor", ...] = ()


@dataclass(frozen=True)
class GlobalNode:
    """``"N"``; path taken from the global context."""
    node: NodeSym


Descriptor = Union[Atom, LocalNodePath, GlobalNodePath, GlobalPath, GlobalNode]
Rhs = Tuple[Descriptor, ...]


def descriptor_nodes(d: Descriptor) -> Iterator[NodeSym]:
    """Every node symbol mentioned in ``d``, subterms included."""
    if isinstance(d, (LocalNodePath, GlobalNodePath, GlobalNode)):
        yield d.node
    if isinstance(d, (LocalNodePath, GlobalNodePath, GlobalPath)):
        for sub in d.path:
            yield from descriptor_nodes(sub)


def descriptor_atoms(d: Descriptor) -> Iterator[AtomSym]:
    if isinstance(d, Atom):
        yield d.sym
    elif not isinstance(d, GlobalNode):
        for sub in d.path:
            yield from descriptor_atoms(sub)


# -- sentences --------------------------------------------------------------

@dataclass(frozen=True)
class DefSentence:
    node: NodeSym
    lhs_path: Path
    rhs: Rhs = ()


@dataclass(frozen=True)
class GoalSentence:
    """An extensional sentence read from a goal file.

    ``expected`` is ``None`` for a bare query.  ``expect_undefined`` marks
    the ``N:<p> = UNDEFINED .`` form.
    """
    node: NodeSym
    path: Path
    expected: Optional[ValueSeq] = None
    expect_undefined: bool = False
    line: int = 0

    @property
    def is_assertion(self) -> bool:
        return self.expected is not None or self.expect_undefined


class DuplicateError(ValueError):
    """Two different right-hand sides for one node/path key."""

    def __init__(self, node: NodeSym, lhs_path: Path, existing: Rhs, new: Rhs):
        self.node = node
        self.lhs_path = lhs_path
        self.existing = existing
        self.new = new
        super().__init__(
            f"{node}:<{' '.join(lhs_path)}> already defined with a different right-hand side"
        )


class NotFound(KeyError):
    pass


# -- longest-prefix trie ----------------------------------------------------

class _TrieNode:
    __slots__ = ("children", "rhs")

    def __init__(self) -> None:
        self.children: dict = {}
        self.rhs: Optional[Rhs] = None


class PathTrie:
    """Maps paths to right-hand sides with longest-prefix retrieval."""

    __slots__ = ("root",)

    def __init__(self, entries: Mapping[Path, Rhs] = MappingProxyType({})) -> None:
        self.root = _TrieNode()
        for key, rhs in entries.items():
            node = self.root
            for atom in key:
                node = node.children.setdefault(atom, _TrieNode())
            node.rhs = rhs

    def longest_prefix(self, p: Path) -> Tuple[Path, Rhs, Path]:
        node = self.root
        best = -1 if node.rhs is None else 0
        best_rhs = node.rhs
        for i, atom in enumerate(p):
            node = node.children.get(atom)
            if node is None:
                break
            if node.rhs is not None:
                best, best_rhs = i + 1, node.rhs
        if best < 0:
            raise NotFound(p)
        return p[:best], best_rhs, p[best:]


# -- theory -----------------------------------------------------------------

@dataclass(frozen=True)
class NodeDef:
    """The sentences of a theory at one node, keyed by explicit path."""

    owner: NodeSym
    entries: Mapping[Path, Rhs]
    trie: PathTrie = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", MappingProxyType(dict(self.entries)))
        object.__setattr__(self, "trie", PathTrie(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)


class Theory:
    """A functional, definitional set of sentences.

    Immutable once built; :meth:`add` returns a new theory.  Equality is
    equality of the sentence maps.
    """

    __slots__ = ("_sentences", "_order", "_defs")

    def __init__(self, sentences: Iterable[DefSentence] = ()) -> None:
        self._sentences: dict = {}
        self._order: list = []
        self._defs: dict = {}
        for s in sentences:
            self._insert(s)

    def _insert(self, s: DefSentence) -> None:
        key = (s.node, s.lhs_path)
        old = self._sentences.get(key)
        if old is not None:
            if old != s.rhs:
                raise DuplicateError(s.node, s.lhs_path, old, s.rhs)
            return
        self._sentences[key] = s.rhs
        if s.node not in self._defs:
            self._defs[s.node] = None
            self._order.append(s.node)

    def add(self, s: DefSentence) -> "Theory":
        new = Theory()
        new._sentences = dict(self._sentences)
        new._order = list(self._order)
        new._defs = dict.fromkeys(self._order)
        new._insert(s)
        return new

    @property
    def sentences(self) -> Mapping[Tuple[NodeSym, Path], Rhs]:
        return MappingProxyType(self._sentences)

    @property
    def node_order(self) -> Tuple[NodeSym, ...]:
        return tuple(self._order)

    def __len__(self) -> int:
        return len(self._sentences)

    def __iter__(self) -> Iterator[DefSentence]:
        """Sentences with nodes in declaration order and paths sorted."""
        for n in self._order:
            for p, rhs in sorted(self.definition(n).entries.items()):
                yield DefSentence(n, p, rhs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Theory):
            return NotImplemented
        return self._sentences == other._sentences

    def __repr__(self) -> str:
        return f"<Theory {len(self._order)} nodes, {len(self._sentences)} sentences>"

    def definition(self, n: NodeSym) -> NodeDef:
        nd = self._defs.get(n)
        if nd is None:
            entries = {p: rhs for (m, p), rhs in self._sentences.items() if m == n}
            nd = NodeDef(n, entries)
            if n in self._defs:
                self._defs[n] = nd
        return nd

    def atoms(self) -> set:
        """All atoms mentioned on either side of any sentence."""
        out = set()
        for (_, p), rhs in self._sentences.items():
            out.update(p)
            for d in rhs:
                out.update(descriptor_atoms(d))
        return out

    def referenced_nodes(self) -> set:
        out = set()
        for rhs in self._sentences.values():
            for d in rhs:
                out.update(descriptor_nodes(d))
        return out


def theory_add_sentence(theory: Theory, s: DefSentence) -> Theory:
    return theory.add(s)


def node_definition(theory: Theory, n: NodeSym) -> NodeDef:
    return theory.definition(n)


def longest_prefix_lookup(node_def: NodeDef, p: Path) -> Tuple[Path, Rhs, Path]:
    """Split ``p`` into (longest explicit prefix, its rhs, leftover suffix).

    Raises :class:`NotFound` when no explicit path of ``node_def`` is a
    prefix of ``p``.
    """
    return node_def.trie.longest_prefix(tuple(p))
