"""Gazetteer bootstrapping from the typing of analyzed pages."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .annotation import AnnotationSet, DomainSchema, Gazetteer, term_key, tokenize
from .dom import DomTree, parse_html

# separators between terms; a period only counts when followed by space or end
_SEPARATORS = re.compile(r"[,;:|/()\[\]{}•·]|\s[-–—]+\s|\.(?=\s|$)")


def components(text: str) -> list[str]:
    """Candidate terms of a node's text.

    Text is cut at punctuation separators; inside a piece, runs of
    capitalised tokens stay together as one term and every other token is
    a term of its own.
    """
    out = []
    for piece in _SEPARATORS.split(text):
        run: list[str] = []
        for tok, _, _ in tokenize(piece):
            if tok[0].isupper():
                run.append(tok)
                continue
            if run:
                out.append(" ".join(run))
                run = []
            out.append(tok)
        if run:
            out.append(" ".join(run))
    return out


@dataclass
class LearningReport:
    round: int
    extracted: int = 0
    correct: int | None = None
    gold: int | None = None
    learned: list[str] = field(default_factory=list)
    dropped: list[str] = field(default_factory=list)
    per_type: dict[str, dict[str, int]] = field(default_factory=dict)
    gazetteer_f1: dict[str, float] = field(default_factory=dict)

    @property
    def precision(self) -> float | None:
        if self.correct is None:
            return None
        return self.correct / self.extracted if self.extracted else 1.0

    @property
    def recall(self) -> float | None:
        if self.correct is None or self.gold is None:
            return None
        return self.correct / self.gold if self.gold else 1.0

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "extracted": self.extracted,
            "correct": self.correct,
            "gold": self.gold,
            "precision": self.precision,
            "recall": self.recall,
            "learned": self.learned,
            "dropped": self.dropped,
            "per_type": self.per_type,
            "gazetteer_f1": self.gazetteer_f1,
        }


def _complement(name: str, schema: DomainSchema, gazetteers: Mapping[str, Gazetteer]) -> Callable[[tuple], bool]:
    own = gazetteers[name]
    others = [gazetteers[o] for o in schema.disjoint_with(name) if o in gazetteers]

    def banned(key: tuple) -> bool:
        if key in own.blacklist:
            return True
        return any(key in g.terms and key not in g.blacklist for g in others)

    return banned


def learn_step(
    tree: DomTree,
    attributes: Iterable[tuple[int, str]],
    ann: AnnotationSet,
    gazetteers: dict[str, Gazetteer],
    schema: DomainSchema,
    theta: float | None = None,
) -> LearningReport:
    """Update ``gazetteers`` in place from one page.

    ``attributes`` are the (node, type) pairs of the page's typing. Terms of
    typed nodes gain positive evidence and unknown ones are added; annotated
    terms on nodes without that type gain negative evidence and are
    blacklisted once ``ev_pos < theta * ev_neg``.
    """
    theta = schema.thresholds.learn_theta if theta is None else theta
    report = LearningReport(round=0)
    typed = {(n, t) for n, t in attributes}
    learnable = [t.name for t in schema.types if t.uses_gazetteer and t.name in gazetteers]
    for name in learnable:
        gaz = gazetteers[name]
        banned = _complement(name, schema, gazetteers)
        learned, dropped = [], []
        # term extraction and validation
        pos: Counter = Counter()
        surface: dict[tuple, str] = {}
        for n in sorted(n for n, t in typed if t == name):
            own = {term_key(a.value) for a in ann.of(name, n)}
            for v in dict.fromkeys(components(tree[n].text)):
                k = term_key(v)
                if not k or banned(k):
                    continue
                if k not in own and gaz.add(v):
                    learned.append(gaz.terms[k])
                pos[k] += 1
                surface.setdefault(k, v)
        for k, f in pos.items():
            gaz.evidence.setdefault(k, [0, 0])[0] += f
        # term cleaning
        neg: Counter = Counter()
        for a in ann.by_type.get(name, ()):
            if (a.node, name) not in typed:
                neg[term_key(a.value)] += 1
                surface.setdefault(term_key(a.value), a.value)
        for k, f in sorted(neg.items()):
            ev = gaz.evidence.setdefault(k, [0, 0])
            ev[1] += f
            if ev[0] < theta * ev[1] and gaz.ban(surface[k]):
                dropped.append(surface[k])
        learned = [v for v in learned if term_key(v) not in gaz.blacklist]
        report.learned += learned
        report.dropped += dropped
        report.per_type[name] = {"learned": len(learned), "dropped": len(dropped)}
    return report


def term_set_f1(gaz: Gazetteer, gold: Iterable[str]) -> float:
    have = {k for k in gaz.terms if k not in gaz.blacklist}
    want = {term_key(t) for t in gold}
    tp = len(have & want)
    p = tp / len(have) if have else 1.0
    r = tp / len(want) if want else 1.0
    return 2 * p * r / (p + r) if p + r else 0.0


@dataclass
class LearningRun:
    gazetteers: dict[str, Gazetteer]
    reports: list[LearningReport]
    saturated: bool


def learn_loop(
    pages: Mapping[str, bytes | str | DomTree],
    schema: DomainSchema,
    seed: Mapping[str, Gazetteer],
    max_rounds: int = 10,
    gold: Mapping[str, Sequence[tuple[str, str, str]]] | None = None,
    gold_terms: Mapping[str, Iterable[str]] | None = None,
    on_round: Callable[[LearningReport], None] | None = None,
) -> LearningRun:
    """Repeat analysis and learning over ``pages`` until no term changes.

    ``gold`` optionally maps a page name to its true (node path, type, value)
    attributes; it only feeds the per-round extraction counts.
    """
    from .pipeline import analyze

    gazetteers = {k: g.copy() for k, g in seed.items()}
    trees = {}
    for name in sorted(pages):
        p = pages[name]
        trees[name] = p if isinstance(p, DomTree) else parse_html(p)
    reports: list[LearningReport] = []
    if not trees:
        return LearningRun(gazetteers, reports, True)
    learnable = {t.name for t in schema.types if t.uses_gazetteer}
    gold_terms = {k: list(v) for k, v in (gold_terms or {}).items()}
    for rnd in range(1, max_rounds + 1):
        snapshot = {k: g.copy() for k, g in gazetteers.items()}
        report = LearningReport(rnd, correct=0 if gold is not None else None,
                                gold=0 if gold is not None else None)
        for name, tree in trees.items():
            page = analyze(tree, schema, snapshot)
            attrs = [(a.node, a.type) for a in page.attributes]
            step = learn_step(tree, attrs, page.ann, gazetteers, schema)
            report.learned += step.learned
            report.dropped += step.dropped
            for t, d in step.per_type.items():
                acc = report.per_type.setdefault(t, {"learned": 0, "dropped": 0})
                for key, v in d.items():
                    acc[key] += v
            mine = {(tree.node_path(a.node), a.type, a.value) for a in page.attributes if a.type in learnable}
            report.extracted += len(mine)
            if gold is not None:
                truth = {tuple(g) for g in gold.get(name, ()) if g[1] in learnable}
                report.correct += len(mine & truth)
                report.gold += len(truth)
        for t, terms in gold_terms.items():
            if t in gazetteers:
                report.gazetteer_f1[t] = term_set_f1(gazetteers[t], terms)
        reports.append(report)
        if on_round is not None:
            on_round(report)
        if not report.learned and not report.dropped:
            return LearningRun(gazetteers, reports, True)
    return LearningRun(gazetteers, reports, False)
