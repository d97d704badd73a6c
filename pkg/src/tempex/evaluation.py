"""Precision, recall and F1 of extraction results against gold standards."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dom import DomTree
from .pipeline import ExtractionResult

LEVELS = ("area", "record", "attribute")


@dataclass(frozen=True)
class Score:
    tp: int
    predicted: int
    gold: int

    @property
    def precision(self) -> float:
        # an empty prediction set makes no false claims
        return self.tp / self.predicted if self.predicted else 1.0

    @property
    def recall(self) -> float:
        return self.tp / self.gold if self.gold else 1.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: Score) -> Score:
        return Score(self.tp + other.tp, self.predicted + other.predicted, self.gold + other.gold)

    def to_dict(self) -> dict:
        return {"tp": self.tp, "predicted": self.predicted, "gold": self.gold,
                "precision": self.precision, "recall": self.recall, "f1": self.f1}


def _score(pred: set, gold: set) -> Score:
    return Score(len(pred & gold), len(pred), len(gold))


@dataclass
class Metrics:
    levels: dict[str, Score]
    per_type: dict[str, Score] = field(default_factory=dict)

    def __getitem__(self, level: str) -> Score:
        return self.levels[level]

    def to_dict(self) -> dict:
        return {"levels": {k: v.to_dict() for k, v in self.levels.items()},
                "per_type": {k: v.to_dict() for k, v in sorted(self.per_type.items())}}

    def table(self) -> str:
        rows = [("level", "P", "R", "F1", "tp", "pred", "gold")]
        items = list(self.levels.items()) + [(f"attribute:{k}", v) for k, v in sorted(self.per_type.items())]
        for k, s in items:
            rows.append((k, f"{s.precision:.4f}", f"{s.recall:.4f}", f"{s.f1:.4f}", str(s.tp), str(s.predicted), str(s.gold)))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _validate(tree: DomTree, result: ExtractionResult, what: str) -> None:
    paths = [a.root for a in result.areas] + [r.start for r in result.records()] + [x.node for x in result.attributes()]
    for p in paths:
        try:
            tree.resolve(p)
        except ValueError as exc:
            raise ValueError(f"{what}: {exc}") from None


def evaluate(pred: ExtractionResult, gold: ExtractionResult, tree: DomTree | None = None) -> Metrics:
    """Match areas by root, records by (start, span), attributes by (node, type, value)."""
    if tree is not None:
        _validate(tree, pred, "prediction")
        _validate(tree, gold, "gold")
    levels = {
        "area": _score({a.root for a in pred.areas}, {a.root for a in gold.areas}),
        "record": _score({(r.start, r.span) for r in pred.records()}, {(r.start, r.span) for r in gold.records()}),
    }
    pa = {(x.node, x.type, x.value) for x in pred.attributes()}
    ga = {(x.node, x.type, x.value) for x in gold.attributes()}
    levels["attribute"] = _score(pa, ga)
    types = sorted({t for _, t, _ in pa | ga})
    per_type = {t: _score({x for x in pa if x[1] == t}, {x for x in ga if x[1] == t}) for t in types}
    return Metrics(levels, per_type)


@dataclass
class CorpusMetrics:
    micro: Metrics
    macro: dict[str, dict[str, float]]
    pages: int

    def to_dict(self) -> dict:
        return {"pages": self.pages, "micro": self.micro.to_dict(), "macro": self.macro}


def evaluate_corpus(pairs: Iterable[tuple[ExtractionResult, ExtractionResult]]) -> CorpusMetrics:
    """Micro metrics pool counts over pages; macro metrics average per-page scores."""
    per_page: list[Metrics] = [evaluate(p, g) for p, g in pairs]
    zero = Score(0, 0, 0)
    levels = {lvl: sum((m.levels[lvl] for m in per_page), zero) for lvl in LEVELS}
    types = sorted({t for m in per_page for t in m.per_type})
    per_type = {t: sum((m.per_type.get(t, zero) for m in per_page), zero) for t in types}
    macro = {}
    keys: Sequence[tuple[str, str | None]] = [(lvl, None) for lvl in LEVELS] + [("attribute", t) for t in types]
    for lvl, t in keys:
        scores = [m.levels[lvl] if t is None else m.per_type.get(t, zero) for m in per_page]
        n = len(scores) or 1
        name = lvl if t is None else f"attribute:{t}"
        macro[name] = {
            "precision": sum(s.precision for s in scores) / n,
            "recall": sum(s.recall for s in scores) / n,
            "f1": sum(s.f1 for s in scores) / n,
        }
    return CorpusMetrics(Metrics(levels, per_type), macro, len(per_page))
