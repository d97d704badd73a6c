"""End-to-end page analysis and the serialized extraction result."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .alignment import AlignedAttribute, align
from .annotation import AnnotationSet, DomainSchema, Gazetteer, annotate
from .areas import DataArea, identify
from .dom import DomTree, parse_html
from .labels import ExtractionTyping
from .segmentation import RecordSegmentation, is_empty, segment


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PageAnalysis:
    tree: DomTree
    ann: AnnotationSet
    typing: ExtractionTyping
    areas: list[DataArea]
    segmentations: list[RecordSegmentation]
    attributes: list[AlignedAttribute]


def analyze(
    tree: DomTree,
    schema: DomainSchema,
    gazetteers: Mapping[str, Gazetteer],
    ann: AnnotationSet | None = None,
) -> PageAnalysis:
    """Annotate, identify areas, segment records and align attributes on one page."""
    th = schema.thresholds
    typing = ExtractionTyping()
    stage = "annotate"
    try:
        if ann is None:
            ann = annotate(tree, schema, gazetteers)
        stage = "identify"
        areas = identify(tree, ann, schema.pivot.name, th.depth, th.dist, typing)
        stage = "segment"
        segs = segment(tree, areas, ann, typing)
        stage = "align"
        attrs = align(tree, segs, schema, ann, typing)
    except Exception as exc:  # noqa: BLE001 - rewrapped with the stage name
        raise StageError(stage, exc) from exc
    return PageAnalysis(tree, ann, typing, areas, segs, attrs)


# serialized form


@dataclass(frozen=True)
class ExtractedAttribute:
    type: str
    node: str
    value: str
    provenance: str | None = None
    support: float | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"type": self.type, "node": self.node, "value": self.value}
        if self.provenance is not None:
            d["provenance"] = self.provenance
        if self.support is not None:
            d["support"] = self.support
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> ExtractedAttribute:
        return cls(d["type"], d["node"], d["value"], d.get("provenance"), d.get("support"))


@dataclass(frozen=True)
class ExtractedRecord:
    start: str
    span: int
    attributes: tuple[ExtractedAttribute, ...] = ()

    def to_dict(self) -> dict:
        return {"start": self.start, "span": self.span, "attributes": [a.to_dict() for a in self.attributes]}

    @classmethod
    def from_dict(cls, d: Mapping) -> ExtractedRecord:
        return cls(d["start"], int(d["span"]), tuple(ExtractedAttribute.from_dict(a) for a in d.get("attributes", ())))


@dataclass(frozen=True)
class ExtractedArea:
    root: str
    pivots: int
    records: tuple[ExtractedRecord, ...] = ()

    def to_dict(self) -> dict:
        return {"root": self.root, "pivots": self.pivots, "records": [r.to_dict() for r in self.records]}

    @classmethod
    def from_dict(cls, d: Mapping) -> ExtractedArea:
        return cls(d["root"], int(d.get("pivots", 0)), tuple(ExtractedRecord.from_dict(r) for r in d.get("records", ())))


@dataclass(frozen=True)
class ExtractionResult:
    """Areas, records and attributes of one page, addressed by node paths.

    The same shape without provenance and support serves as a gold standard.
    """

    page: str
    areas: tuple[ExtractedArea, ...] = ()
    pivot: str | None = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"page": self.page, "areas": [a.to_dict() for a in self.areas]}
        if self.pivot is not None:
            d["pivot"] = self.pivot
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> ExtractionResult:
        if not isinstance(d, Mapping) or "areas" not in d:
            raise ValueError("extraction result: expected an object with 'areas'")
        try:
            return cls(str(d.get("page", "")), tuple(ExtractedArea.from_dict(a) for a in d["areas"]), d.get("pivot"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"extraction result: malformed entry ({exc})") from exc

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> ExtractionResult:
        return cls.from_dict(json.loads(text))

    def records(self) -> list[ExtractedRecord]:
        return [r for a in self.areas for r in a.records]

    def attributes(self) -> list[ExtractedAttribute]:
        return [x for r in self.records() for x in r.attributes]

    def attribute_count(self) -> int:
        return len(self.attributes())


GoldStandard = ExtractionResult


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def to_result(page: str, analysis: PageAnalysis, pivot: str | None = None) -> ExtractionResult:
    tree = analysis.tree
    by_record: dict[int, list[AlignedAttribute]] = {}
    for a in analysis.attributes:
        by_record.setdefault(a.record, []).append(a)
    pivots = {a.root: len(a.pivots) for a in analysis.areas}
    areas = []
    for seg in analysis.segmentations:
        records = []
        for r in seg.records:
            attrs = tuple(
                ExtractedAttribute(a.type, tree.node_path(a.node), a.value, a.provenance, a.support)
                for a in by_record.get(r[0], ())
            )
            records.append(ExtractedRecord(tree.node_path(r[0]), len(r), attrs))
        areas.append(ExtractedArea(tree.node_path(seg.area), pivots[seg.area], tuple(records)))
    return ExtractionResult(page, tuple(areas), pivot)


def extract(
    page: bytes | str | DomTree,
    schema: DomainSchema,
    gazetteers: Mapping[str, Gazetteer],
    pivot: str | Sequence[str] | None = None,
    page_id: str = "",
) -> ExtractionResult:
    """Run the full pipeline on one page.

    With a list of candidate pivot types the page is analyzed once per
    candidate and the result with the most attributes wins; ties go to the
    candidate declared first in the schema.
    """
    try:
        tree = page if isinstance(page, DomTree) else parse_html(page)
    except Exception as exc:
        raise StageError("parse", exc) from exc
    if pivot is None or isinstance(pivot, str):
        sch = schema if pivot is None else schema.with_pivot(pivot)
        return to_result(page_id, analyze(tree, sch, gazetteers), sch.pivot.name)
    order = {n: i for i, n in enumerate(schema.names())}
    cands = sorted(dict.fromkeys(pivot), key=lambda n: order.get(n, len(order)))
    if not cands:
        raise ValueError("empty pivot candidate list")
    ann = annotate(tree, schema, gazetteers)
    best = None
    for name in cands:
        res = to_result(page_id, analyze(tree, schema.with_pivot(name), gazetteers, ann), name)
        if best is None or res.attribute_count() > best.attribute_count():
            best = res
    return best


# structural checker


def check_result(tree: DomTree, result: ExtractionResult, pivot_nodes: Iterable[int] | None = None) -> list[str]:
    """Violations of the typing constraints in ``result``; empty when consistent.

    Checks that paths resolve, areas do not nest, records are runs of
    consecutive non-empty children of their area root that do not overlap,
    every attribute is a text node inside exactly one record, and no record
    has two attributes of one type. With ``pivot_nodes`` every record must
    also contain a pivot.
    """
    errs: list[str] = []

    def res(path: str, what: str) -> int | None:
        try:
            return tree.resolve(path)
        except ValueError:
            errs.append(f"{what} {path!r} does not resolve")
            return None

    roots = []
    pivots = set(pivot_nodes) if pivot_nodes is not None else None
    owner: dict[int, str] = {}
    for area in result.areas:
        root = res(area.root, "area root")
        if root is None:
            continue
        for other in roots:
            if tree.is_ancestor_or_self(other, root) or tree.is_ancestor_or_self(root, other):
                errs.append(f"areas {tree.node_path(other)} and {area.root} are nested")
        roots.append(root)
        retained = [c for c in tree[root].children if not is_empty(tree, c)]
        pos = {c: i for i, c in enumerate(retained)}
        used: set[int] = set()
        spans = {r.span for r in area.records}
        if len(spans) > 1:
            errs.append(f"area {area.root}: records of different lengths {sorted(spans)}")
        for rec in area.records:
            start = res(rec.start, "record start")
            if start is None:
                continue
            if start not in pos:
                errs.append(f"record {rec.start} is not a retained child of area {area.root}")
                continue
            i = pos[start]
            if rec.span < 1 or i + rec.span > len(retained):
                errs.append(f"record {rec.start} overruns its area")
                continue
            members = retained[i : i + rec.span]
            if used & set(members):
                errs.append(f"record {rec.start} overlaps another record")
            used |= set(members)
            if pivots is not None and not any(p in pivots for m in members for p in tree.subtree(m)):
                errs.append(f"record {rec.start} contains no pivot")
            seen_types = set()
            for att in rec.attributes:
                n = res(att.node, "attribute")
                if n is None:
                    continue
                if not tree.is_text(n):
                    errs.append(f"attribute {att.node} is not a text node")
                if not any(tree.is_ancestor_or_self(m, n) for m in members):
                    errs.append(f"attribute {att.node} lies outside record {rec.start}")
                if n in owner:
                    errs.append(f"attribute {att.node} belongs to records {owner[n]} and {rec.start}")
                owner.setdefault(n, rec.start)
                if att.type in seen_types:
                    errs.append(f"record {rec.start} has two {att.type} attributes")
                seen_types.add(att.type)
    return errs


@dataclass
class BatchItem:
    page: str
    result: ExtractionResult | None = None
    error: str | None = None


def extract_many(
    pages: Mapping[str, bytes],
    schema: DomainSchema,
    gazetteers: Mapping[str, Gazetteer],
    pivot: str | Sequence[str] | None = None,
    workers: int = 4,
) -> list[BatchItem]:
    """Extract every page with a bounded thread pool; output follows sorted page order."""
    from concurrent.futures import ThreadPoolExecutor

    names = sorted(pages)

    def one(name: str) -> BatchItem:
        try:
            return BatchItem(name, extract(pages[name], schema, gazetteers, pivot, name))
        except Exception as exc:  # noqa: BLE001 - reported per page
            return BatchItem(name, error=str(exc))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(one, names))


__all__ = [
    "BatchItem",
    "ExtractedArea",
    "ExtractedAttribute",
    "ExtractedRecord",
    "ExtractionResult",
    "GoldStandard",
    "PageAnalysis",
    "StageError",
    "analyze",
    "canonical_json",
    "check_result",
    "extract",
    "extract_many",
    "to_result",
]
