"""Record segmentation of data areas by leading nodes and shifted boundaries."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .annotation import AnnotationSet
from .areas import DataArea
from .dom import DomTree
from .labels import RECORD_START, RECORD_TAIL, ExtractionTyping
from .ted import EditDistanceCache

log = logging.getLogger(__name__)

OK = "ok"
REJECT_LENGTH = "rejected-length"
REJECT_PIVOT = "rejected-pivot"

# irregularities are rounded before comparison so that summation order cannot break ties
_DIGITS = 9


@dataclass
class LeadingNodeFrame:
    area: DataArea
    retained: list[int]  # area-root children that are not collapsed
    collapsed: list[int]
    leadings: list[int]

    def pos(self, n: int) -> int:
        return self._pos[n]

    def __post_init__(self) -> None:
        self._pos = {n: i for i, n in enumerate(self.retained)}


@dataclass(frozen=True)
class Candidate:
    offset: int
    starts: tuple[int, ...]  # positions in the retained child list, may be negative
    status: str
    irregularity: float | None = None


@dataclass
class RecordSegmentation:
    area: int
    len: int
    records: list[tuple[int, ...]]
    irregularity: float
    leadings: list[int] = field(default_factory=list)
    candidates: list[Candidate] = field(default_factory=list)


def is_empty(tree: DomTree, n: int, ann: AnnotationSet | None = None) -> bool:
    """True if the subtree of ``n`` holds no text and no annotations."""
    for m in tree.subtree(n):
        if tree.is_text(m):
            return False
        if ann is not None and m in ann.by_node:
            return False
    return True


def leading_nodes(tree: DomTree, area: DataArea, ann: AnnotationSet | None = None) -> LeadingNodeFrame:
    root = area.root
    children = tree[root].children
    empty = {c for c in children if is_empty(tree, c, ann)}
    retained = [c for c in children if c not in empty]
    collapsed = [c for c in children if c in empty]
    leads = sorted({p if tree[p].parent == root else tree.child_on_path(root, p) for p in area.pivots})
    return LeadingNodeFrame(area, retained, collapsed, leads)


def leading_space(frame: LeadingNodeFrame, leads: Sequence[int], k: int) -> int:
    """Retained-sibling distance from ``leads[k]`` to the next leading node.

    The last leading node measures to one past the final retained child.
    """
    here = frame.pos(leads[k])
    nxt = frame.pos(leads[k + 1]) if k + 1 < len(leads) else len(frame.retained)
    return nxt - here


def record_length(spaces: Sequence[int]) -> int:
    """Shortest among the most frequent leading spaces."""
    if not spaces:
        raise ValueError("record length of an empty frame")
    counts = Counter(spaces)
    top = max(counts.values())
    return min(s for s, c in counts.items() if c == top)


def prune(frame: LeadingNodeFrame, length: int) -> list[int]:
    """Drop noisy prefix nodes, then successors that follow too closely."""
    leads = list(frame.leadings)
    while leads and leading_space(frame, leads, 0) < length:
        del leads[0]
    k = 0
    while k < len(leads):
        while k + 1 < len(leads) and leading_space(frame, leads, k) < length:
            del leads[k + 1]
        k += 1
    return leads


def irregularity(records: Sequence[Sequence[int]], dist: EditDistanceCache) -> float:
    """Summed normalized edit distance over member pairs from different records."""
    if not records:
        return math.inf
    members = [n for r in records for n in r]
    rid = np.repeat(np.arange(len(records)), [len(r) for r in records])
    sigs = [dist.tree.signature(n) for n in members]
    classes = sorted(set(sigs))
    cidx = {s: i for i, s in enumerate(classes)}
    rep = {}
    for n, s in zip(members, sigs):
        rep.setdefault(s, n)
    k = len(classes)
    table = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            table[i, j] = table[j, i] = dist(rep[classes[i]], rep[classes[j]])
    cls = np.array([cidx[s] for s in sigs])
    pair = table[cls[:, None], cls[None, :]]
    cross = rid[:, None] != rid[None, :]
    return float(pair[cross].sum()) / 2


def segment_area(
    tree: DomTree,
    area: DataArea,
    ann: AnnotationSet | None = None,
    dist: EditDistanceCache | None = None,
) -> RecordSegmentation:
    frame = leading_nodes(tree, area, ann)
    dist = dist or EditDistanceCache(tree)
    pivots = set(area.pivots)
    spaces = [leading_space(frame, frame.leadings, k) for k in range(len(frame.leadings))]
    length = record_length(spaces)
    leads = prune(frame, length)
    if len(leads) < 2:
        records = [(leads[0],)] if leads else []
        return RecordSegmentation(area.root, 1, records, 0.0 if records else math.inf, leads)

    n_ret = len(frame.retained)
    positions = [frame.pos(l) for l in leads]
    has_pivot = [any(p in pivots for p in tree.subtree(c)) for c in frame.retained]
    best: list[tuple[int, ...]] = []
    best_irr = math.inf
    cands = []
    for i in range(length + 1):
        starts = tuple(p - i for p in positions)
        if starts[0] < 0 or starts[-1] + length > n_ret:
            cands.append(Candidate(i, starts, REJECT_LENGTH))
            continue
        spans = [range(s, s + length) for s in starts]
        if not all(any(has_pivot[j] for j in span) for span in spans):
            cands.append(Candidate(i, starts, REJECT_PIVOT))
            continue
        records = [tuple(frame.retained[j] for j in span) for span in spans]
        irr = round(irregularity(records, dist), _DIGITS)
        cands.append(Candidate(i, starts, OK, irr))
        if irr < best_irr:
            best, best_irr = records, irr
    if not best:
        log.info("area %d: every segmentation candidate was rejected", area.root)
    return RecordSegmentation(area.root, length, best, best_irr, leads, cands)


def segment(
    tree: DomTree,
    areas: Sequence[DataArea],
    ann: AnnotationSet | None = None,
    typing: ExtractionTyping | None = None,
) -> list[RecordSegmentation]:
    out = []
    for area in areas:
        seg = segment_area(tree, area, ann)
        if typing is not None:
            for r in seg.records:
                typing.add(r[0], RECORD_START)
                for n in r[1:]:
                    typing.add(n, RECORD_TAIL)
        out.append(seg)
    return out
