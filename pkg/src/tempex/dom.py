"""Simplified DOM: an ordered labeled tree built from HTML.

Node ids are dense integers assigned in preorder, so document order is
plain integer order and the subtree of ``n`` is the id range
``[n, tree.nodes[n].end]``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import html5lib

TEXT = "#text"

# subtrees never retained by the parser
DROPPED_TAGS = frozenset({"head", "script", "style", "noscript", "template"})

_WS = re.compile(r"\s+")

NodeSpec = Union[str, tuple]


class ParseError(ValueError):
    """Raised when input cannot be parsed into a tree."""


@dataclass(slots=True)
class DomNode:
    id: int
    tag: str
    text: str = ""
    parent: int | None = None
    children: list[int] = field(default_factory=list)
    depth: int = 0
    index: int = 0  # position among the parent's children
    end: int = 0  # last id in this node's subtree

    @property
    def is_text(self) -> bool:
        return self.tag == TEXT


class DomTree:
    """Immutable parsed page. Build with :func:`parse_html` or :func:`build_tree`."""

    def __init__(self, nodes: list[DomNode]):
        if not nodes:
            raise ParseError("empty tree")
        self.nodes = nodes
        self.root = 0
        self._finish()
        self._sig: list[int] | None = None

    def _finish(self) -> None:
        nodes = self.nodes
        for node in nodes:
            if node.parent is None:
                node.depth = 0
            else:
                node.depth = nodes[node.parent].depth + 1
            for i, c in enumerate(node.children):
                nodes[c].index = i
        for node in reversed(nodes):
            node.end = nodes[node.children[-1]].end if node.children else node.id

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, n: int) -> DomNode:
        return self.nodes[n]

    def depth(self, n: int) -> int:
        return self.nodes[n].depth

    def tag(self, n: int) -> str:
        return self.nodes[n].tag

    def is_text(self, n: int) -> bool:
        return self.nodes[n].tag == TEXT

    def is_ancestor_or_self(self, a: int, b: int) -> bool:
        return a <= b <= self.nodes[a].end

    def subtree(self, n: int) -> range:
        return range(n, self.nodes[n].end + 1)

    def size(self, n: int) -> int:
        return self.nodes[n].end - n + 1

    def text_nodes(self) -> Iterator[int]:
        return (n.id for n in self.nodes if n.tag == TEXT)

    def text_content(self, n: int) -> str:
        return " ".join(self.nodes[i].text for i in self.subtree(n) if self.nodes[i].tag == TEXT)

    def ancestors(self, n: int) -> Iterator[int]:
        """Proper ancestors of ``n``, nearest first."""
        p = self.nodes[n].parent
        while p is not None:
            yield p
            p = self.nodes[p].parent

    def child_on_path(self, ancestor: int, n: int) -> int:
        """The child of ``ancestor`` whose subtree contains ``n``."""
        if not (ancestor < n <= self.nodes[ancestor].end):
            raise ValueError(f"{ancestor} is not a proper ancestor of {n}")
        while self.nodes[n].parent != ancestor:
            n = self.nodes[n].parent
        return n

    # structural relations

    def sibling_distance(self, a: int, b: int) -> float:
        """Signed number of sibling steps from ``a`` to ``b``; ``inf`` if not siblings."""
        na, nb = self.nodes[a], self.nodes[b]
        if a == b:
            return 0
        if na.parent is None or na.parent != nb.parent:
            return math.inf
        return nb.index - na.index

    def lca(self, nodes: Iterable[int]) -> int:
        it = iter(nodes)
        try:
            acc = next(it)
        except StopIteration:
            raise ValueError("lca of an empty node set") from None
        for n in it:
            acc = self._lca2(acc, n)
        return acc

    def _lca2(self, a: int, b: int) -> int:
        nodes = self.nodes
        while nodes[a].depth > nodes[b].depth:
            a = nodes[a].parent
        while nodes[b].depth > nodes[a].depth:
            b = nodes[b].parent
        while a != b:
            a = nodes[a].parent
            b = nodes[b].parent
        return a

    def path_length(self, a: int, b: int) -> int:
        """Number of edges on the undirected path between ``a`` and ``b``."""
        c = self._lca2(a, b)
        nodes = self.nodes
        return nodes[a].depth + nodes[b].depth - 2 * nodes[c].depth

    def tag_path(self, r: int, n: int) -> str:
        """Characteristic tag path from ``r`` to ``n``.

        ``n`` must lie in the subtree of ``r`` or of one of ``r``'s following
        siblings (records spanning several children). The route takes
        first-child and next-sibl steps; text nodes are skipped when they
        sit on the route, and a text-node target is written ``text()``.
        """
        nodes = self.nodes
        if self.is_ancestor_or_self(r, n):
            top = r
            parts = [self._label(r)]
        else:
            p = nodes[r].parent
            if p is None or not (p < n <= nodes[p].end):
                raise ValueError(f"node {n} is not reachable from {r}")
            top = self.child_on_path(p, n)
            if nodes[top].index < nodes[r].index:
                raise ValueError(f"node {n} precedes {r}")
            parts = [self._label(r)]
            siblings = nodes[p].children
            for s in siblings[nodes[r].index + 1 : nodes[top].index]:
                if nodes[s].tag != TEXT:
                    parts.append("next-sibl::" + nodes[s].tag)
            parts.append("next-sibl::" + self._label(top))
        # descend from top to n
        chain = []
        m = n
        while m != top:
            chain.append(m)
            m = nodes[m].parent
        for c in reversed(chain):
            step = "first-child::"
            for s in nodes[nodes[c].parent].children[: nodes[c].index]:
                if nodes[s].tag != TEXT:
                    parts.append(step + nodes[s].tag)
                    step = "next-sibl::"
            parts.append(step + self._label(c))
        return "/".join(parts)

    def _label(self, n: int) -> str:
        tag = self.nodes[n].tag
        return "text()" if tag == TEXT else tag

    # addressing

    def node_path(self, n: int) -> str:
        idx = []
        while self.nodes[n].parent is not None:
            idx.append(self.nodes[n].index)
            n = self.nodes[n].parent
        return "/" + "/".join(str(i) for i in reversed(idx))

    def resolve(self, path: str) -> int:
        if not path.startswith("/"):
            raise ValueError(f"malformed node path {path!r}")
        n = self.root
        for part in filter(None, path[1:].split("/")):
            try:
                n = self.nodes[n].children[int(part)]
            except (ValueError, IndexError):
                raise ValueError(f"node path {path!r} does not resolve") from None
        return n

    # structural signatures

    def signature(self, n: int) -> int:
        """Interned id of the tag-labeled shape of ``n``'s subtree."""
        if self._sig is None:
            table: dict[tuple, int] = {}
            sig = [0] * len(self.nodes)
            for node in reversed(self.nodes):
                key = (node.tag, tuple(sig[c] for c in node.children))
                sig[node.id] = table.setdefault(key, len(table))
            self._sig = sig
        return self._sig[n]

    def to_spec(self, n: int | None = None) -> NodeSpec:
        n = self.root if n is None else n
        node = self.nodes[n]
        if node.tag == TEXT:
            return node.text
        return (node.tag, [self.to_spec(c) for c in node.children])


def _normalize_text(s: str) -> str:
    return _WS.sub(" ", s).strip()


class _Builder:
    def __init__(self) -> None:
        self.nodes: list[DomNode] = []
        self.pending: dict[int, list[str]] = {}

    def element(self, tag: str, parent: int | None) -> int:
        if parent is not None:
            self.flush(parent)
        nid = len(self.nodes)
        self.nodes.append(DomNode(nid, tag, parent=parent))
        if parent is not None:
            self.nodes[parent].children.append(nid)
        return nid

    def text(self, parent: int, s: str | None) -> None:
        if s:
            self.pending.setdefault(parent, []).append(s)

    def flush(self, parent: int) -> None:
        chunks = self.pending.pop(parent, None)
        if not chunks:
            return
        text = _normalize_text("".join(chunks))
        if text:
            nid = len(self.nodes)
            self.nodes.append(DomNode(nid, TEXT, text=text, parent=parent))
            self.nodes[parent].children.append(nid)


def parse_html(data: bytes | str) -> DomTree:
    """Parse HTML into a normalized :class:`DomTree` rooted at ``<html>``.

    Whitespace-only text, comments and head/script/style subtrees are dropped;
    remaining text has runs of whitespace collapsed to one space.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    if not data.strip():
        raise ParseError("empty document")
    doc = html5lib.parse(data, treebuilder="etree", namespaceHTMLElements=False)
    b = _Builder()

    def walk(elem, parent: int | None) -> None:
        nid = b.element(elem.tag.lower(), parent)
        b.text(nid, elem.text)
        for child in elem:
            if isinstance(child.tag, str) and child.tag.lower() not in DROPPED_TAGS:
                walk(child, nid)
            b.text(nid, child.tail)
        b.flush(nid)

    walk(doc, None)
    return DomTree(b.nodes)


def build_tree(spec: NodeSpec) -> DomTree:
    """Build a tree from nested ``(tag, [children])`` tuples; strings are text nodes."""
    b = _Builder()

    def walk(s: NodeSpec, parent: int | None) -> None:
        if isinstance(s, str):
            if parent is None:
                raise ValueError("root must be an element")
            b.text(parent, s)
            return
        tag, children = s
        nid = b.element(tag, parent)
        for c in children:
            walk(c, nid)
        b.flush(nid)

    walk(spec, None)
    return DomTree(b.nodes)


def format_node_path(indices: Sequence[int]) -> str:
    return "/" + "/".join(str(i) for i in indices)
