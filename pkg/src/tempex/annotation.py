"""Domain schema, gazetteers and the noisy annotator."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .dom import DomTree

REGULAR = "regular"
OPTIONAL = "optional"


class ConfigError(ValueError):
    """Invalid schema or gazetteer configuration; the message names the field."""


# tokens: word characters with internal hyphens/apostrophes
TOKEN_RE = re.compile(r"\w+(?:['’-]\w+)*")


def tokenize(text: str) -> list[tuple[str, int, int]]:
    return [(m.group(), m.start(), m.end()) for m in TOKEN_RE.finditer(text)]


def term_key(term: str) -> tuple[str, ...]:
    return tuple(t.casefold() for t, _, _ in tokenize(term))


# value normalizers

_WS = re.compile(r"\s+")
_AMOUNT = re.compile(r"(\d[\d,]*(?:\.\d+)?)\s*([kKmM](?![a-zA-Z]))?")
_INT = re.compile(r"\d+")


def normalize_text(s: str) -> str:
    return _WS.sub(" ", s).strip()


def normalize_lower(s: str) -> str:
    return normalize_text(s).lower()


def normalize_price(s: str) -> str:
    """First monetary amount in ``s`` as a plain number: ``"£2k"`` -> ``"2000"``."""
    m = _AMOUNT.search(s)
    if not m:
        return normalize_text(s)
    num = float(m.group(1).replace(",", ""))
    suffix = (m.group(2) or "").lower()
    if suffix == "k":
        num *= 1000
    elif suffix == "m":
        num *= 1_000_000
    return str(int(num)) if num == int(num) else f"{num:g}"


def normalize_int(s: str) -> str:
    m = _INT.search(s)
    return m.group() if m else normalize_text(s)


NORMALIZERS: dict[str, Callable[[str], str]] = {
    "text": normalize_text,
    "lower": normalize_lower,
    "price": normalize_price,
    "int": normalize_int,
}


@dataclass(frozen=True)
class ThresholdSet:
    depth: int = 1
    dist: int = 2
    infer_regular: float = 0.5
    infer_optional: float = 0.5
    keep_optional: float = 0.2
    keep_regular: float = 0.0
    learn_theta: float = 1.5

    def __post_init__(self) -> None:
        if self.depth < 0:
            raise ConfigError("thresholds.depth must be non-negative")
        if self.dist < 0:
            raise ConfigError("thresholds.dist must be non-negative")
        for name, key in (("infer_regular", "inferR"), ("infer_optional", "inferO"),
                          ("keep_optional", "keepO"), ("keep_regular", "keepR")):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"thresholds.{key} must lie in [0, 1]")
        if not self.infer_regular >= self.infer_optional:
            raise ConfigError("thresholds.inferO must not exceed thresholds.inferR")
        if not self.infer_optional >= self.keep_optional:
            raise ConfigError("thresholds.keepO must not exceed thresholds.inferO")
        if not self.keep_optional >= self.keep_regular:
            raise ConfigError("thresholds.keepR must not exceed thresholds.keepO")
        if not self.learn_theta > 0:
            raise ConfigError("thresholds.learnTheta must be positive")

    def infer(self, kind: str) -> float:
        return self.infer_regular if kind == REGULAR else self.infer_optional

    def keep(self, kind: str) -> float:
        return self.keep_regular if kind == REGULAR else self.keep_optional


@dataclass(frozen=True)
class AttributeType:
    name: str
    kind: str = REGULAR
    pivot: bool = False
    gazetteer: str | None = None  # file reference, resolved by the loader
    patterns: tuple[str, ...] = ()
    normalizer: str = "text"

    @property
    def uses_gazetteer(self) -> bool:
        return self.gazetteer is not None

    def normalize(self, s: str) -> str:
        return NORMALIZERS[self.normalizer](s)


@dataclass(frozen=True)
class DomainSchema:
    types: tuple[AttributeType, ...]
    disjoint: frozenset[frozenset[str]] = frozenset()
    thresholds: ThresholdSet = field(default_factory=ThresholdSet)

    def __post_init__(self) -> None:
        names = [t.name for t in self.types]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise ConfigError(f"types: duplicate name {sorted(dup)[0]!r}")
        for t in self.types:
            if t.kind not in (REGULAR, OPTIONAL):
                raise ConfigError(f"types[{t.name}].kind must be 'regular' or 'optional'")
            if t.normalizer not in NORMALIZERS:
                raise ConfigError(f"types[{t.name}].normalizer: unknown {t.normalizer!r}")
            for p in t.patterns:
                try:
                    re.compile(p)
                except re.error as exc:
                    raise ConfigError(f"types[{t.name}].patterns: {exc}") from exc
        pivots = [t for t in self.types if t.pivot]
        if len(pivots) != 1:
            raise ConfigError("types: exactly one type must set pivot=true")
        if pivots[0].kind != REGULAR:
            raise ConfigError(f"types[{pivots[0].name}].pivot requires kind 'regular'")
        for pair in self.disjoint:
            if len(pair) != 2 or not pair <= set(names):
                raise ConfigError(f"disjoint: {sorted(pair)} must name two declared types")

    @property
    def pivot(self) -> AttributeType:
        return next(t for t in self.types if t.pivot)

    def type(self, name: str) -> AttributeType:
        for t in self.types:
            if t.name == name:
                return t
        raise KeyError(name)

    def names(self) -> list[str]:
        return [t.name for t in self.types]

    def disjoint_with(self, name: str) -> list[str]:
        out = []
        for pair in self.disjoint:
            if name in pair:
                out.extend(n for n in pair if n != name)
        return sorted(out)

    def with_pivot(self, name: str) -> DomainSchema:
        target = self.type(name)
        if target.kind != REGULAR:
            raise ConfigError(f"pivot {name!r} must be a regular type")
        types = tuple(
            AttributeType(t.name, t.kind, t.name == name, t.gazetteer, t.patterns, t.normalizer)
            for t in self.types
        )
        return DomainSchema(types, self.disjoint, self.thresholds)


_THRESHOLD_KEYS = {
    "depth": "depth", "dist": "dist", "inferR": "infer_regular", "inferO": "infer_optional",
    "keepO": "keep_optional", "keepR": "keep_regular", "learnTheta": "learn_theta",
}


def schema_from_dict(cfg: Mapping) -> DomainSchema:
    if not isinstance(cfg, Mapping):
        raise ConfigError("schema: expected a JSON object")
    raw_types = cfg.get("types")
    if not isinstance(raw_types, list) or not raw_types:
        raise ConfigError("types: expected a non-empty list")
    types = []
    for i, t in enumerate(raw_types):
        if not isinstance(t, Mapping) or not isinstance(t.get("name"), str):
            raise ConfigError(f"types[{i}].name: missing")
        patterns = t.get("patterns") or []
        if not isinstance(patterns, list):
            raise ConfigError(f"types[{t['name']}].patterns: expected a list")
        types.append(AttributeType(
            name=t["name"],
            kind=t.get("kind", REGULAR),
            pivot=bool(t.get("pivot", False)),
            gazetteer=t.get("gazetteer"),
            patterns=tuple(patterns),
            normalizer=t.get("normalizer", "text"),
        ))
    disjoint = set()
    for pair in cfg.get("disjoint", []):
        if not isinstance(pair, list) or len(pair) != 2 or pair[0] == pair[1]:
            raise ConfigError(f"disjoint: malformed pair {pair!r}")
        disjoint.add(frozenset(pair))
    raw_th = cfg.get("thresholds", {})
    unknown = set(raw_th) - set(_THRESHOLD_KEYS)
    if unknown:
        raise ConfigError(f"thresholds.{sorted(unknown)[0]}: unknown key")
    th = ThresholdSet(**{_THRESHOLD_KEYS[k]: v for k, v in raw_th.items()})
    return DomainSchema(tuple(types), frozenset(disjoint), th)


def schema_to_dict(schema: DomainSchema) -> dict:
    th = schema.thresholds
    return {
        "types": [
            {k: v for k, v in {
                "name": t.name, "kind": t.kind, "pivot": t.pivot, "gazetteer": t.gazetteer,
                "patterns": list(t.patterns) or None, "normalizer": t.normalizer,
            }.items() if v is not None}
            for t in schema.types
        ],
        "disjoint": sorted(sorted(p) for p in schema.disjoint),
        "thresholds": {k: getattr(th, attr) for k, attr in _THRESHOLD_KEYS.items()},
    }


def load_schema(path: str | Path) -> DomainSchema:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"schema: invalid JSON ({exc})") from exc
    return schema_from_dict(cfg)


class Gazetteer:
    """Term list for one attribute type with a blacklist and evidence counters.

    Terms are matched case-insensitively on whole tokens. Keys are token tuples;
    the first surface form seen is kept for display and persistence.
    """

    def __init__(self, type: str, terms: Iterable[str] = (), blacklist: Iterable[str] = ()):
        self.type = type
        self.terms: dict[tuple[str, ...], str] = {}
        self.blacklist: dict[tuple[str, ...], str] = {}
        self.evidence: dict[tuple[str, ...], list[int]] = {}
        self._index: dict[str, list[tuple[str, ...]]] | None = None
        for t in terms:
            self.add(t)
        for t in blacklist:
            self.ban(t)

    def __contains__(self, term: str) -> bool:
        k = term_key(term)
        return k in self.terms and k not in self.blacklist

    def __len__(self) -> int:
        return sum(1 for k in self.terms if k not in self.blacklist)

    def active_terms(self) -> list[str]:
        return sorted(v for k, v in self.terms.items() if k not in self.blacklist)

    def is_banned(self, term: str) -> bool:
        return term_key(term) in self.blacklist

    def add(self, term: str) -> bool:
        """Add ``term``; returns True if it was not known before."""
        k = term_key(term)
        if not k or k in self.terms:
            return False
        self.terms[k] = " ".join(term.split())
        self._index = None
        return True

    def ban(self, term: str) -> bool:
        k = term_key(term)
        if not k or k in self.blacklist:
            return False
        self.blacklist[k] = " ".join(term.split())
        self._index = None
        return True

    def ev(self, term: str) -> list[int]:
        return self.evidence.setdefault(term_key(term), [0, 0])

    def copy(self) -> Gazetteer:
        g = Gazetteer(self.type)
        g.terms = dict(self.terms)
        g.blacklist = dict(self.blacklist)
        g.evidence = {k: list(v) for k, v in self.evidence.items()}
        return g

    def _lookup(self) -> dict[str, list[tuple[str, ...]]]:
        if self._index is None:
            index: dict[str, list[tuple[str, ...]]] = {}
            for k in self.terms:
                if k not in self.blacklist:
                    index.setdefault(k[0], []).append(k)
            for v in index.values():
                v.sort(key=len, reverse=True)
            self._index = index
        return self._index

    def find(self, text: str) -> list[tuple[int, int]]:
        """Longest, left-to-right, non-overlapping matches as character spans."""
        toks = tokenize(text)
        keys = [t.casefold() for t, _, _ in toks]
        index = self._lookup()
        out = []
        i = 0
        while i < len(toks):
            hit = 0
            for cand in index.get(keys[i], ()):
                n = len(cand)
                if tuple(keys[i : i + n]) == cand:
                    hit = n
                    break
            if hit:
                out.append((toks[i][1], toks[i + hit - 1][2]))
                i += hit
            else:
                i += 1
        return out

    # persistence

    @classmethod
    def load(cls, type: str, path: str | Path) -> Gazetteer:
        path = Path(path)
        g = cls(type, _read_terms(path))
        neg = path.with_name(path.name + ".neg")
        if neg.exists():
            for t in _read_terms(neg):
                g.ban(t)
        ev = path.with_name(path.name + ".ev.json")
        if ev.exists():
            for term, (pos, negc) in json.loads(ev.read_text(encoding="utf-8")).items():
                g.evidence[term_key(term)] = [pos, negc]
        return g

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.write_text("".join(t + "\n" for t in sorted(self.terms.values())), encoding="utf-8")
        path.with_name(path.name + ".neg").write_text(
            "".join(t + "\n" for t in sorted(self.blacklist.values())), encoding="utf-8")
        surface = {**self.terms, **self.blacklist}
        ev = {surface.get(k, " ".join(k)): v for k, v in self.evidence.items()}
        path.with_name(path.name + ".ev.json").write_text(
            json.dumps(ev, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _read_terms(path: Path) -> list[str]:
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


def load_gazetteers(schema: DomainSchema, base: str | Path | None = None) -> dict[str, Gazetteer]:
    """Load every gazetteer the schema references, relative to ``base``."""
    out = {}
    for t in schema.types:
        if t.gazetteer is None:
            continue
        p = Path(t.gazetteer)
        if base is not None and not p.is_absolute():
            p = Path(base) / p
        out[t.name] = Gazetteer.load(t.name, p) if p.exists() else Gazetteer(t.name)
    return out


@dataclass(frozen=True, order=True)
class Annotation:
    node: int
    start: int
    end: int
    type: str
    value: str


class AnnotationSet:
    """The relation ann(type, node, value), indexed by node and by type."""

    def __init__(self, items: Iterable[Annotation] = ()):
        self.items: list[Annotation] = sorted(items)
        self.by_node: dict[int, list[Annotation]] = {}
        self.by_type: dict[str, list[Annotation]] = {}
        for a in self.items:
            self.by_node.setdefault(a.node, []).append(a)
            self.by_type.setdefault(a.type, []).append(a)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def nodes_of(self, type: str) -> list[int]:
        """Distinct annotated nodes of ``type`` in document order."""
        return sorted({a.node for a in self.by_type.get(type, ())})

    def has(self, type: str, node: int) -> bool:
        return any(a.type == type for a in self.by_node.get(node, ()))

    def of(self, type: str, node: int) -> list[Annotation]:
        return [a for a in self.by_node.get(node, ()) if a.type == type]


def _pattern_spans(regexes: list[re.Pattern], text: str) -> list[tuple[int, int]]:
    found = []
    for rx in regexes:
        for m in rx.finditer(text):
            if m.end() > m.start():
                found.append((m.start(), m.end()))
    # longest first, then leftmost; greedy non-overlapping selection
    found.sort(key=lambda s: (s[0], -(s[1] - s[0])))
    out: list[tuple[int, int]] = []
    for s in found:
        if not out or s[0] >= out[-1][1]:
            out.append(s)
    return out


def annotate(tree: DomTree, schema: DomainSchema, gazetteers: Mapping[str, Gazetteer]) -> AnnotationSet:
    """Annotate every text node with gazetteer and pattern matches of each type."""
    compiled = {t.name: [re.compile(p) for p in t.patterns] for t in schema.types}
    items = []
    for n in tree.text_nodes():
        text = tree.nodes[n].text
        for t in schema.types:
            spans: list[tuple[int, int]] = []
            gaz = gazetteers.get(t.name)
            if t.uses_gazetteer and gaz is not None:
                spans.extend(gaz.find(text))
            if compiled[t.name]:
                spans.extend(_pattern_spans(compiled[t.name], text))
                spans.sort(key=lambda s: (s[0], -(s[1] - s[0])))
                kept: list[tuple[int, int]] = []
                for s in spans:
                    if not kept or s[0] >= kept[-1][1]:
                        kept.append(s)
                spans = kept
            for s, e in spans:
                value = t.normalize(text[s:e])
                if value:
                    items.append(Annotation(n, s, e, t.name, value))
    return AnnotationSet(items)
