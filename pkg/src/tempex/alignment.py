"""Attribute alignment: type record nodes by cross-record tag-path support."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .annotation import AnnotationSet, AttributeType, DomainSchema
from .dom import DomTree
from .labels import ExtractionTyping
from .segmentation import RecordSegmentation

ANNOTATED = "annotated"
INFERRED = "inferred"


@dataclass(frozen=True)
class AlignedAttribute:
    area: int
    record: int  # record start node
    type: str
    node: int
    value: str
    provenance: str
    support: float


class SupportTable:
    """Per area: for each (tag path, type), the records holding an annotated node there."""

    def __init__(self, tree: DomTree, records: Sequence[Sequence[int]], ann: AnnotationSet):
        self.tree = tree
        self.records = [tuple(r) for r in records]
        # per record: candidate text nodes in document order with their tag paths
        self.nodes: list[list[tuple[int, str]]] = []
        self.counts: dict[tuple[str, str], set[int]] = defaultdict(set)
        for i, r in enumerate(self.records):
            here = []
            for member in r:
                for n in tree.subtree(member):
                    if tree.is_text(n):
                        path = tree.tag_path(r[0], n)
                        here.append((n, path))
                        for a in ann.by_node.get(n, ()):
                            self.counts[(path, a.type)].add(i)
            self.nodes.append(here)

    def count(self, path: str, type: str) -> int:
        return len(self.counts.get((path, type), ()))

    def support(self, path: str, type: str) -> float:
        if not self.records:
            return 0.0
        return self.count(path, type) / len(self.records)


def support(tree: DomTree, records: Sequence[Sequence[int]], record: int, node: int, type: str, ann: AnnotationSet) -> float:
    """Fraction of ``records`` with a ``type``-annotated node at the tag path of ``node`` in ``records[record]``."""
    path = tree.tag_path(records[record][0], node)
    hits = 0
    for r in records:
        for member in r:
            if any(
                tree.is_text(n) and ann.has(type, n) and tree.tag_path(r[0], n) == path
                for n in tree.subtree(member)
            ):
                hits += 1
                break
    return hits / len(records) if records else 0.0


def attribute_value(tree: DomTree, t: AttributeType, node: int, ann: AnnotationSet) -> str:
    """Gazetteer types take the whole node text; pattern types their first match."""
    own = ann.of(t.name, node)
    if own and not t.uses_gazetteer:
        return own[0].value
    return t.normalize(tree[node].text)


def align_area(
    tree: DomTree,
    seg: RecordSegmentation,
    schema: DomainSchema,
    ann: AnnotationSet,
    typing: ExtractionTyping | None = None,
) -> list[AlignedAttribute]:
    table = SupportTable(tree, seg.records, ann)
    th = schema.thresholds
    out = []
    for t in schema.types:
        infer, keep = th.infer(t.kind), th.keep(t.kind)
        for i, r in enumerate(table.records):
            for n, path in table.nodes[i]:
                s = table.support(path, t.name)
                annotated = ann.has(t.name, n)
                if s > infer or (annotated and s > keep):
                    value = attribute_value(tree, t, n, ann)
                    out.append(AlignedAttribute(seg.area, r[0], t.name, n, value,
                                                ANNOTATED if annotated else INFERRED, s))
                    if typing is not None:
                        typing.add(n, t.name)
                    break  # only the first qualifying node per record and type
    out.sort(key=lambda a: (a.record, a.node, schema.names().index(a.type)))
    return out


def align(
    tree: DomTree,
    segs: Sequence[RecordSegmentation],
    schema: DomainSchema,
    ann: AnnotationSet,
    typing: ExtractionTyping | None = None,
) -> list[AlignedAttribute]:
    out = []
    for seg in segs:
        out.extend(align_area(tree, seg, schema, ann, typing))
    return out
