"""Synthetic result-page corpora with known ground truth.

Pages list property adverts in a handful of templates. Every page comes
with a gold extraction result, and the corpus records the full term lists
so partial or noisy gazetteers can be derived from it.
"""

from __future__ import annotations

import html
import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

from .annotation import DomainSchema, Gazetteer, schema_from_dict, term_key
from .dom import build_tree, parse_html
from .fixtures import BEDS_PATTERN, PRICE_PATTERN
from .learning import components
from .pipeline import ExtractedArea, ExtractedAttribute, ExtractedRecord, ExtractionResult, canonical_json


class CorpusSpecError(ValueError):
    """Raised for contradictory or out-of-range corpus settings."""


ATTRIBUTES = ("price", "location", "beds", "kind")


@dataclass(frozen=True)
class CorpusSpec:
    pages: int = 100
    templates: int = 6
    records_min: int = 5
    records_max: int = 20
    spans: tuple[int, ...] = (1, 2)
    one_attribute_per_child: bool = False
    # noise knobs
    ad_rate: float = 0.0  # chance of an advert child after each record
    false_pivots: int = 0  # stray prices per page outside the data areas
    decoy_rate: float = 0.0  # chance of a navigation menu with list structure
    featured_rate: float = 0.0  # chance of a second, smaller area before the results
    description_rate: float = 0.0  # chance a record's free text mentions a place name
    gazetteer_coverage: float = 1.0  # fraction of location terms in the partial gazetteer
    optional_rate: float = 1.0  # chance each optional attribute is present

    def __post_init__(self) -> None:
        for name in ("ad_rate", "decoy_rate", "featured_rate", "description_rate", "gazetteer_coverage", "optional_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise CorpusSpecError(f"{name} must lie in [0, 1], got {v}")
        if self.pages < 0 or self.templates < 1:
            raise CorpusSpecError("pages must be non-negative and templates positive")
        if not 2 <= self.records_min <= self.records_max:
            raise CorpusSpecError("need 2 <= records_min <= records_max")
        if self.false_pivots < 0:
            raise CorpusSpecError("false_pivots must be non-negative")
        if not self.spans or any(s < 1 for s in self.spans):
            raise CorpusSpecError("spans must be positive")
        if self.one_attribute_per_child and min(self.spans) < len(ATTRIBUTES):
            raise CorpusSpecError(
                f"a span of {min(self.spans)} children cannot hold {len(ATTRIBUTES)} attributes one per child"
            )

    @classmethod
    def from_dict(cls, d: dict) -> CorpusSpec:
        d = dict(d)
        if "spans" in d:
            d["spans"] = tuple(d["spans"])
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise CorpusSpecError(f"unknown corpus setting {sorted(unknown)[0]!r}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spans"] = list(self.spans)
        return d


# name pools; kept disjoint so a term belongs to exactly one level

_STEMS = """Acacia Alder Ashby Aspen Baker Beech Birch Bishop Bramble Bridge Brook Carlton Cedar Chapel
Chester Church Clifton Clover Cromwell Dale Elm Fairfax Fern Fox Garden Glebe Grange Hawthorn Hazel
Heath Holly Juniper Kingston Larch Laurel Linden Maple Marlow Meadow Mill Needham Oak Orchard Park
Pine Poplar Priory Quarry Queens Rectory Rowan Sandy School Spring Station Stanley Tudor Victoria
Walnut Warren Water Willow Windmill York""".split()
_SUFFIXES = "Street Road Lane Avenue Close Way Gardens Crescent".split()


def _words(block: str) -> list[str]:
    """Split a block of names; two-word names are joined with an underscore in the source."""
    return [w.replace("_", " ") for w in block.split()]


_DISTRICTS = _words("""Abbeyfield Ashcombe Barnwood Beckfield Bellmoor Birchley Brackenhurst Brookvale Burnside
Castlegate Claymore Coldharbour Copperfield Cranmere Dunmore Eastwick Elmstead Fallowfield Farleigh
Fernhill Glenholme Greystone Harewood Hartwell Hazelmere Highcliffe Hollybank Kingsmead Lakeside
Langford Larkhill Lindenhurst Marshfield Merrivale Millbrook Moorside Netherby Northgate Oakhurst
Old_Town Parkside Pennington Redbrook Riverside Rosedale Saltmarsh Southmead Stonebridge Summerfield
Thornbury Upper_Heyford Westbury Whitecross Woodside""")
_TOWNS = _words("""Ashford Barrowby Camberley Dorchester Eastleigh Farnham Gillingham Harlow Ilkley Kendal
Ludlow Malvern Newbury Oakham Penrith Ripon Salisbury Tewkesbury Uckfield Wantage Whitby Yeovil
Abingdon Bicester Chippenham Didcot Evesham Frome""")
_COUNTIES = _words("""Berkshire Cumbria Devon Dorset Gloucestershire Hampshire Kent Oxfordshire Rutland
Shropshire Somerset Surrey Wiltshire Worcestershire""")
_KINDS = _words("Flat House Maisonette Studio Bungalow Cottage Penthouse Townhouse")
_FILLER = _words("""bright spacious modern charming quiet refurbished light airy period stylish""")
_NOUNS = _words("kitchen garden lounge terrace bathroom parking balcony study")
_AD_TEXTS = (
    "Get a mortgage quote today",
    "Sign up for property alerts",
    "Find removal firms near you",
    "Compare home insurance deals",
)
_MENU = ("Home", "Buy", "Rent", "New homes", "Commercial", "Sold prices", "Agents", "Help")


def schema_dict(gazetteer_dir: str = "gazetteers") -> dict:
    return {
        "types": [
            {"name": "price", "kind": "regular", "pivot": True, "patterns": [PRICE_PATTERN], "normalizer": "price"},
            {"name": "location", "kind": "regular", "gazetteer": f"{gazetteer_dir}/location.txt", "normalizer": "text"},
            {"name": "beds", "kind": "optional", "patterns": [BEDS_PATTERN], "normalizer": "int"},
            {"name": "kind", "kind": "optional", "gazetteer": f"{gazetteer_dir}/kind.txt", "normalizer": "text"},
        ],
        "disjoint": [["location", "kind"]],
        "thresholds": {},
    }


def corpus_schema() -> DomainSchema:
    return schema_from_dict(schema_dict())


@dataclass(frozen=True)
class Template:
    span: int
    container: tuple[str, str]  # area root tag, record tag
    price_wrap: tuple[str, ...]  # element chain around the price text
    loc_tag: str
    header: bool
    footer: bool
    swap: bool  # location block before price block
    separator: bool  # <hr> between records


def _make_template(rng: random.Random, spec: CorpusSpec) -> Template:
    return Template(
        span=rng.choice(spec.spans),
        container=rng.choice([("ul", "li"), ("div", "div"), ("ol", "li"), ("section", "article")]),
        price_wrap=rng.choice([("span",), ("strong",), ("p", "b"), ("div", "span")]),
        loc_tag=rng.choice(["p", "address", "span", "h3"]),
        header=rng.random() < 0.7,
        footer=rng.random() < 0.5,
        swap=rng.random() < 0.3,
        separator=rng.random() < 0.3,
    )


def _wrap(chain: tuple[str, ...], inner: Any) -> Any:
    for tag in reversed(chain):
        inner = (tag, [inner])
    return inner


class _Marker(str):
    """Text that remembers which attribute it carries so its node can be found after building."""

    key: tuple[int, str]


def _text(s: str, key: tuple[int, str] | None = None) -> str:
    if key is None:
        return s
    m = _Marker(s)
    m.key = key
    return m


class _PageBuilder:
    def __init__(self, rng: random.Random, spec: CorpusSpec, pools: dict[str, list[str]]):
        self.rng = rng
        self.spec = spec
        self.pools = pools
        self.next_record = 0
        self.gold: dict[tuple[int, str], str] = {}  # (record id, type) -> value
        self.location_terms: set[str] = set()
        self.kind_terms: set[str] = set()

    def price(self) -> tuple[str, str]:
        v = self.rng.randrange(400, 4000, 5)
        shown = f"£{v:,}" + self.rng.choice(["", " pcm", " per month"])
        return shown, str(v)

    def location(self) -> str:
        rng = self.rng
        parts = [
            f"{rng.choice(self.pools['stems'])} {rng.choice(_SUFFIXES)}",
            rng.choice(self.pools["districts"]),
            rng.choice(self.pools["towns"]),
            rng.choice(self.pools["counties"]),
        ]
        return ", ".join(parts)

    def record(self, t: Template) -> tuple[list[Any], int]:
        """Children of one record (``t.span`` of them) and its record id."""
        rid = self.next_record
        self.next_record += 1
        rng, spec = self.rng, self.spec
        shown, value = self.price()
        self.gold[(rid, "price")] = value
        price_el = _wrap(t.price_wrap, _text(shown, (rid, "price")))
        loc = self.location()
        self.gold[(rid, "location")] = loc
        self.location_terms.update(components(loc))
        loc_el = (t.loc_tag, [_text(loc, (rid, "location"))])
        beds_el = kind_el = None
        if rng.random() < spec.optional_rate:
            n = rng.randint(1, 6)
            self.gold[(rid, "beds")] = str(n)
            beds_el = ("span", [_text(f"{n} bed" + ("s" if n > 1 else ""), (rid, "beds"))])
        if rng.random() < spec.optional_rate:
            k = rng.choice(_KINDS)
            self.gold[(rid, "kind")] = k
            self.kind_terms.add(k)
            kind_el = ("em", [_text(k, (rid, "kind"))])
        desc = None
        if rng.random() < spec.description_rate:
            place = rng.choice(self.pools["districts"] + self.pools["towns"])
            desc = ("p", [f"A {rng.choice(_FILLER)} home with a {rng.choice(_NOUNS)}, close to {place} station."])
        elif rng.random() < 0.5:
            desc = ("p", [f"A {rng.choice(_FILLER)} home with a {rng.choice(_NOUNS)} and a {rng.choice(_NOUNS)}."])

        # optional attributes always close their block, so their absence never shifts a regular attribute's path
        head = ("div", [price_el] + ([beds_el] if beds_el else []))
        body = ("div", [loc_el] + ([kind_el] if kind_el else []))
        if spec.one_attribute_per_child:
            slots = [("div", [price_el]), ("div", [loc_el]),
                     ("div", [beds_el or "no bedroom data"]), ("div", [kind_el or "type not given"])]
            slots += [("div", ["."])] * (t.span - len(slots))
            children = slots
        elif t.span == 1:
            blocks = [body, head] if t.swap else [head, body]
            children = [(t.container[1], blocks + ([desc] if desc else []))]
        else:
            blocks = [body, head] if t.swap else [head, body]
            last = blocks[-1]
            if desc:
                last = (last[0], last[1] + [desc])
            children = [blocks[0]] + [("div", ["more details"])] * (t.span - 2) + [last]
        return children, rid

    def area(self, t: Template, n_records: int, ads: bool) -> tuple[Any, list[tuple[int, int]]]:
        """Area subtree and (record id, index of first child among retained children)."""
        kids: list[Any] = []
        starts = []
        retained = 0
        if t.header:
            kids.append(("div", [("h2", [f"{n_records} properties found"]),
                                 ("form", [("select", [("option", ["Newest"]), ("option", ["Lowest price"])])])]))
            retained += 1
        for i in range(n_records):
            children, rid = self.record(t)
            starts.append((rid, retained))
            kids.extend(children)
            retained += len(children)
            if t.separator and i + 1 < n_records:
                kids.append(("hr", []))
            if ads and i + 1 < n_records and self.rng.random() < self.spec.ad_rate:
                kids.append(("aside", [("a", [self.rng.choice(_AD_TEXTS)])]))
                retained += 1
        if t.footer:
            kids.append(("nav", [("a", ["Previous"]), ("a", ["Next page"])]))
        return (t.container[0], kids), starts


def _noise_block(rng: random.Random, count: int, avoid: int, base: int, phase: int = 0) -> list[Any]:
    """``count`` stray prices whose text depths alternate and never equal ``avoid``.

    ``base`` is the depth of the enclosing block. Consecutive prices get
    different depths, so no two of them cluster; ``phase`` continues the
    alternation from a previous block.
    """
    depths = [d for d in range(base + 2, base + 6) if d != avoid][:2]
    out = []
    for i in range(count):
        depth = depths[(i + phase) % 2]
        text = rng.choice(["Mortgages from £{:,} pm", "Valuations from £{:,}", "Save £{:,} on fees"]).format(
            rng.randrange(50, 900, 10))
        chain = ("div",) * (depth - base - 2) + ("p",)
        out.append(_wrap(chain, text))
    return out


@dataclass
class Corpus:
    spec: CorpusSpec
    seed: int
    pages: dict[str, str]
    gold: dict[str, ExtractionResult]
    gold_terms: dict[str, list[str]]
    schema: DomainSchema

    def gazetteers(self, coverage: float | None = None, seed: int | None = None) -> dict[str, Gazetteer]:
        """Gazetteers for extraction: full ``kind`` list and a location list cut to ``coverage``."""
        cov = self.spec.gazetteer_coverage if coverage is None else coverage
        return {
            "location": partial_gazetteer("location", self.gold_terms["location"], cov, self.seed if seed is None else seed),
            "kind": Gazetteer("kind", self.gold_terms["kind"]),
        }

    def full_gazetteers(self) -> dict[str, Gazetteer]:
        return {t: Gazetteer(t, terms) for t, terms in self.gold_terms.items()}

    def gold_attributes(self, name: str) -> list[tuple[str, str, str]]:
        return [(a.node, a.type, a.value) for a in self.gold[name].attributes()]

    def write(self, out: str | Path) -> Path:
        out = Path(out)
        (out / "pages").mkdir(parents=True, exist_ok=True)
        (out / "gold").mkdir(exist_ok=True)
        (out / "gazetteers").mkdir(exist_ok=True)
        (out / "full").mkdir(exist_ok=True)
        entries = []
        for name in sorted(self.pages):
            (out / "pages" / f"{name}.html").write_text(self.pages[name], encoding="utf-8")
            (out / "gold" / f"{name}.json").write_text(self.gold[name].to_json(), encoding="utf-8")
            entries.append({"page": f"pages/{name}.html", "gold": f"gold/{name}.json"})
        for t, g in self.gazetteers().items():
            g.save(out / "gazetteers" / f"{t}.txt")
        for t, g in self.full_gazetteers().items():
            g.save(out / "full" / f"{t}.txt")
        (out / "schema.json").write_text(json.dumps(schema_dict(), indent=2) + "\n", encoding="utf-8")
        manifest = {"seed": self.seed, "spec": self.spec.to_dict(), "pages": entries}
        (out / "manifest.json").write_text(canonical_json(manifest), encoding="utf-8")
        return out


def partial_gazetteer(type: str, terms: list[str], coverage: float, seed: int) -> Gazetteer:
    """A gazetteer holding a seeded random ``coverage`` fraction of ``terms``.

    One seed fixes a single shuffled order, so lower coverages are subsets of higher ones.
    """
    order = sorted(set(terms))
    random.Random(f"{seed}:{type}:coverage").shuffle(order)
    return Gazetteer(type, order[: round(coverage * len(order))])


def to_html(node: Any) -> str:
    if isinstance(node, str):
        return html.escape(node, quote=False)
    tag, kids = node
    if tag in ("hr", "br"):
        return f"<{tag}>"
    return f"<{tag}>" + "".join(to_html(k) for k in kids) + f"</{tag}>"


def _find_markers(spec: Any, tree, node: int, out: dict) -> None:
    """Walk the nested spec alongside the built tree and map markers to node ids."""
    # strings merge only when adjacent, and the generator never places two strings side by side
    if isinstance(spec, str):
        if isinstance(spec, _Marker):
            out[spec.key] = node
        return
    _, kids = spec
    children = tree[node].children
    if len(children) != len(kids):
        raise AssertionError("generated spec and built tree disagree")
    for s, c in zip(kids, children):
        _find_markers(s, tree, c, out)


def generate_corpus(spec: CorpusSpec, seed: int) -> Corpus:
    """Generate ``spec.pages`` pages reproducibly from ``seed``."""
    rng = random.Random(seed)
    pools = {
        "stems": list(_STEMS),
        "districts": list(_DISTRICTS),
        "towns": list(_TOWNS),
        "counties": list(_COUNTIES),
    }
    templates = [_make_template(rng, spec) for _ in range(spec.templates)]
    featured_t = Template(1, ("div", "div"), ("b",), "span", False, False, False, False)
    pages: dict[str, str] = {}
    gold: dict[str, ExtractionResult] = {}
    loc_terms: set[str] = set()
    kind_terms: set[str] = set()
    for i in range(spec.pages):
        name = f"page{i:04d}"
        t = templates[i % len(templates)]
        b = _PageBuilder(rng, spec, pools)
        main: list[Any] = []
        if rng.random() < spec.decoy_rate:
            main.append(("ul", [("li", [("a", [m])]) for m in _MENU]))
        areas = []  # (index in main, nested under a heading block, starts, span)
        if rng.random() < spec.featured_rate:
            f_area, f_starts = b.area(featured_t, rng.randint(2, 4), ads=False)
            main.append(("div", [("h2", ["Featured properties"]), f_area]))
            areas.append((len(main) - 1, True, f_starts, 1))
        n = rng.randint(spec.records_min, spec.records_max)
        r_area, r_starts = b.area(t, n, ads=True)
        main.append(r_area)
        areas.append((len(main) - 1, False, r_starts, t.span))

        body: list[Any] = [("div", [("h1", ["Property search"]), ("p", ["Homes to rent"])])]
        # price depth of the main template, used to keep stray prices out of its clusters
        rec_depth = 4 + (1 if t.span == 1 else 0) + 1 + len(t.price_wrap)
        n_noise = spec.false_pivots
        side = n_noise - n_noise // 3
        if n_noise:
            body[0] = ("div", [("h1", ["Property search"]), ("p", [f"Average rent £{rng.randrange(900, 2500, 10):,} pcm"])])
            side -= 1
        body.append(("div", main))
        side = max(side, 0)
        body.append(("div", _noise_block(rng, side, rec_depth, 2) or [("p", ["Contact us"])]))
        foot = _noise_block(rng, n_noise // 3, rec_depth, 2, phase=side)
        body.append(("div", foot + [("p", ["Terms and conditions"])]))
        page_spec = ("html", [("body", body)])

        tree = build_tree(page_spec)
        markers: dict = {}
        _find_markers(page_spec, tree, tree.root, markers)
        text = "<!DOCTYPE html><html><head><title>Results</title></head>" + to_html(page_spec)[6:]
        parsed = parse_html(text.encode("utf-8"))
        if parsed.to_spec() != tree.to_spec():
            raise AssertionError(f"{name}: HTML does not round-trip through the parser")

        main_node = tree[tree[tree.root].children[0]].children[1]
        g_areas = []
        for idx, nested, starts, span in areas:
            root = tree[main_node].children[idx]
            if nested:
                root = tree[root].children[1]
            retained = [c for c in tree[root].children if any(tree.is_text(m) for m in tree.subtree(c))]
            recs = []
            for rid, pos in starts:
                attrs = []
                for typ in ATTRIBUTES:
                    if (rid, typ) in markers:
                        attrs.append(ExtractedAttribute(typ, tree.node_path(markers[(rid, typ)]), b.gold[(rid, typ)]))
                recs.append(ExtractedRecord(tree.node_path(retained[pos]), span, tuple(attrs)))
            g_areas.append(ExtractedArea(tree.node_path(root), len(starts), tuple(recs)))
        pages[name] = text
        gold[name] = ExtractionResult(f"{name}.html", tuple(g_areas))
        loc_terms |= b.location_terms
        kind_terms |= b.kind_terms
    gold_terms = {
        "location": sorted(loc_terms, key=term_key),
        "kind": sorted(kind_terms, key=term_key),
    }
    return Corpus(spec, seed, pages, gold, gold_terms, corpus_schema())
