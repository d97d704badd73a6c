"""Data-area identification: cluster pivot nodes by depth and distance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .annotation import AnnotationSet
from .dom import DomTree
from .labels import DATA_AREA, ExtractionTyping

# closed interval over non-negative integers (hi may be inf); None is the empty interval
Interval = Optional[tuple[float, float]]

SENTINEL: Interval = (0, math.inf)


def merge_intervals(i: Interval, j: Interval) -> Interval:
    if i is None:
        return j
    if j is None:
        return i
    return (min(i[0], j[0]), max(i[1], j[1]))


def width(i: Interval) -> float:
    return 0 if i is None else i[1] - i[0]


def path_lengths_interval(tree: DomTree, a: Iterable[int], b: Iterable[int]) -> Interval:
    """Smallest interval covering ``path_length(x, y)`` for x in ``a``, y in ``b``."""
    b = list(b)
    lo, hi = math.inf, -math.inf
    for x in a:
        for y in b:
            d = tree.path_length(x, y)
            if d < lo:
                lo = d
            if d > hi:
                hi = d
    return None if hi < lo else (lo, hi)


@dataclass(frozen=True)
class DataArea:
    root: int
    pivots: tuple[int, ...]


@dataclass
class Cluster:
    nodes: list[int] = field(default_factory=list)
    depth: Interval = None
    dist: Interval = None


def pivot_nodes(ann: AnnotationSet, pivot: str) -> list[int]:
    """Distinct pivot-annotated text nodes in document order."""
    return ann.nodes_of(pivot)


def identify(
    tree: DomTree,
    ann: AnnotationSet,
    pivot: str,
    theta_depth: float,
    theta_dist: float,
    typing: ExtractionTyping | None = None,
) -> list[DataArea]:
    """Greedy left-to-right clustering of pivot nodes into data areas.

    A running cluster absorbs the next pivot while the merged depth and
    distance intervals stay narrower than the thresholds. A closed cluster
    with two or more nodes nominates its lca as an area root, unless that
    root already holds an equal or larger support. Of two nested areas the
    one with more pivots survives.
    """
    return resolve_nesting(tree, _scan(tree, pivot_nodes(ann, pivot), theta_depth, theta_dist), typing)


def _scan(tree: DomTree, pivots: Sequence[int], theta_depth: float, theta_dist: float) -> list[DataArea]:
    support: dict[int, tuple[int, ...]] = {}
    cands = [Cluster([n], (tree.depth(n),) * 2, None) for n in pivots]
    cands.append(Cluster([], SENTINEL, SENTINEL))
    last = Cluster()
    for c in cands:
        depth = merge_intervals(last.depth, c.depth)
        dist = merge_intervals(merge_intervals(last.dist, c.dist), path_lengths_interval(tree, last.nodes, c.nodes))
        if width(depth) < theta_depth and width(dist) < theta_dist:
            last = Cluster(last.nodes + c.nodes, depth, dist)
            continue
        if len(last.nodes) >= 2:
            d = tree.lca(last.nodes)
            if len(support.get(d, ())) < len(last.nodes):
                support[d] = tuple(last.nodes)
        last = c
    # dict preserves first-assignment order, i.e. the order areas were found
    return [DataArea(root, nodes) for root, nodes in support.items()]


def resolve_nesting(tree: DomTree, found: list[DataArea], typing: ExtractionTyping | None = None) -> list[DataArea]:
    """Drop nested areas: larger pivot sets first, ties in discovery order."""
    kept: list[DataArea] = []
    order = sorted(range(len(found)), key=lambda i: (-len(found[i].pivots), i))
    for a in (found[i] for i in order):
        if not any(tree.is_ancestor_or_self(k.root, a.root) or tree.is_ancestor_or_self(a.root, k.root) for k in kept):
            kept.append(a)
    kept.sort(key=lambda a: a.root)
    if typing is not None:
        for a in kept:
            typing.add(a.root, DATA_AREA)
    return kept
