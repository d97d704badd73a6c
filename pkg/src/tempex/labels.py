"""Extraction typing: the node-label relation built up by the pipeline stages."""

from __future__ import annotations

from collections import defaultdict
from typing import Iterator

DATA_AREA = "data-area"
RECORD_START = "record-start"
RECORD_TAIL = "record-tail"
STRUCTURAL = (DATA_AREA, RECORD_START, RECORD_TAIL)


class ExtractionTyping:
    """Set of (node, label) pairs; labels are structural or attribute-type names."""

    def __init__(self) -> None:
        self._labels: dict[int, set[str]] = defaultdict(set)

    def add(self, node: int, label: str) -> None:
        self._labels[node].add(label)

    def remove(self, node: int, label: str) -> None:
        s = self._labels.get(node)
        if s is not None:
            s.discard(label)
            if not s:
                del self._labels[node]

    def has(self, node: int, label: str) -> bool:
        return label in self._labels.get(node, ())

    def labels(self, node: int) -> frozenset[str]:
        return frozenset(self._labels.get(node, ()))

    def nodes_with(self, label: str) -> list[int]:
        return sorted(n for n, s in self._labels.items() if label in s)

    def pairs(self) -> Iterator[tuple[int, str]]:
        for n in sorted(self._labels):
            for label in sorted(self._labels[n]):
                yield n, label

    def __len__(self) -> int:
        return sum(len(s) for s in self._labels.values())
