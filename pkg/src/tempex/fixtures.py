"""Small hand-built pages used by the examples, tests and CLI demos.

Each builder returns plain trees or HTML so callers can run any stage on them.
"""

from __future__ import annotations

from .annotation import DomainSchema, Gazetteer, schema_from_dict
from .dom import DomTree, build_tree, parse_html

PRICE_PATTERN = r"£\s?\d[\d,]*(?:\.\d+)?(?:\s?[kK]\b)?"
BEDS_PATTERN = r"\b\d+\s*bed(?:room)?s?\b"


def real_estate_schema(**thresholds) -> DomainSchema:
    """Price (pivot), location and optional beds, with the default thresholds unless overridden."""
    return schema_from_dict({
        "types": [
            {"name": "price", "kind": "regular", "pivot": True, "patterns": [PRICE_PATTERN], "normalizer": "price"},
            {"name": "location", "kind": "regular", "gazetteer": "location.txt", "normalizer": "text"},
            {"name": "beds", "kind": "optional", "patterns": [BEDS_PATTERN], "normalizer": "int"},
        ],
        "thresholds": thresholds,
    })


def _p(v: int) -> str:
    return f"£{v}"


def clustering_tree() -> DomTree:
    """Three candidate areas under one body.

    The first area holds a list of three deeper prices followed by a
    paragraph of four ``<br>``-separated prices; with wide thresholds the
    first paragraph price joins the list and the other three are lost.
    The second area varies its pivot depth slightly; the third sits deeper
    than the second, so the two never merge.
    """
    para = ("p", [_p(500), ("br", []), _p(510), ("br", []), _p(520), ("br", []), _p(530)])
    lst = ("div", [("li", [("span", [_p(100 + i)])]) for i in range(3)])
    d1 = ("div", [lst, para])
    d2 = ("ul", [("li", [_p(200)]), ("li", [("b", [_p(210)])]), ("li", [_p(220)])])
    d3 = ("div", [("li", [("span", [_p(300 + i)])]) for i in range(3)])
    return build_tree(("html", [("body", [d1, d2, d3])]))


def shifted_records_tree() -> DomTree:
    """An area whose records are four children wide, with a noisy price paragraph at each end.

    Retained children of the area root: p, then three times (h3, ul, div, a), then p.
    Each div and both paragraphs carry a price.
    """
    kids: list = [("p", [_p(50)])]
    for i in range(3):
        kids += [
            ("h3", [f"Flat {i + 1}"]),
            ("ul", [("li", ["garden"]), ("li", ["parking"])]),
            ("div", [("span", [_p(900 + 10 * i)])]),
            ("a", ["details"]),
        ]
    kids.append(("p", [_p(60)]))
    return build_tree(("html", [("body", [("div", kids)])]))


def _aligned_record(price, extra_p, loc_tag, loc, tail=()) -> list:
    return [("a", [("p", [price, *extra_p])]), ("div", [(loc_tag, [loc]), *tail])]


def alignment_tree() -> DomTree:
    """Four records of two children (``a`` then ``div``) with noisy annotations.

    Record 1: annotated price span, an annotated beds ``i``, unannotated location.
    Record 2: unannotated price span, annotated location.
    Record 3: annotated price span, location in an ``em`` instead of a ``b``.
    Record 4: price in a ``strong``, annotated location, and a second price after it.
    """
    kids = []
    kids += _aligned_record(("span", ["£1,250"]), [("i", ["2 beds"])], "b", "Jericho")
    kids += _aligned_record(("span", ["Price on application"]), [], "b", "Summertown")
    kids += _aligned_record(("span", ["£900"]), [], "em", "Headington")
    kids += _aligned_record(("strong", ["£1,100"]), [], "b", "Cowley", [("span", ["£1,050"])])
    return build_tree(("html", [("body", [("div", kids)])]))


def alignment_records(tree: DomTree) -> list[tuple[int, int]]:
    root = tree.resolve("/0/0")
    kids = tree[root].children
    return [(kids[i], kids[i + 1]) for i in range(0, len(kids), 2)]


ALIGNMENT_LOCATIONS = ("Summertown", "Headington", "Cowley", "Oxford")


RUNNING_EXAMPLE_HTML = """<!DOCTYPE html>
<html><head><title>Flats to rent in Oxford</title><script>var x = 1;</script></head>
<body>
<p class="avg">Average rent: £1,340 pcm</p>
<div id="wrap">
  <ul id="filters">
    <li>Sort by newest</li><li>Flats only</li><li>Houses only</li><li>Any bedrooms</li>
  </ul>
  <div id="featured">
    <div class="f">£1,200 pcm<span>Walton Street, Oxford</span></div>
    <div class="f">£1,450 pcm<span>Banbury Road, Oxford</span></div>
    <div class="f">£995 pcm<span>Medhurst Way</span></div>
  </div>
  <div id="results">
    <div class="hdr"><h2>4 results</h2><form><select><option>Newest</option><option>Cheapest</option></select></form></div>
    <div class="price">£1,100 pcm</div>
    <div class="info"><span>Iffley Road, Oxford</span><span>2 beds</span></div>
    <div class="price">£1,350 pcm</div>
    <div class="info">was £1,500 pcm<span>Cowley Road, Oxford</span><span>3 beds</span></div>
    <div class="price">£875 pcm</div>
    <div class="info"><span>Jericho, Oxford</span><span>3 beds</span><span>sublet room: 1 bed</span></div>
    <div class="price">£1,600 pcm</div>
    <div class="info"><span>Headington, Oxford</span><span>4 beds</span></div>
  </div>
</div>
</body></html>
"""

RUNNING_EXAMPLE_LOCATIONS = ("Oxford", "Walton Street", "Banbury Road", "Iffley Road", "Cowley Road", "Jericho", "Headington")


def running_example() -> tuple[DomTree, DomainSchema, dict[str, Gazetteer]]:
    tree = parse_html(RUNNING_EXAMPLE_HTML.encode("utf-8"))
    schema = real_estate_schema(depth=1, dist=2, inferR=0.5, inferO=0.5, keepO=0.3, keepR=0.0)
    return tree, schema, {"location": Gazetteer("location", RUNNING_EXAMPLE_LOCATIONS)}


def uniform_list_tree(items: int) -> DomTree:
    """A single list of ``items`` identical entries, each carrying one price."""
    lst = ("div", [("li", [("span", [_p(100 + i)])]) for i in range(items)])
    return build_tree(("html", [("body", [lst])]))


_FILLERS = (("span", ["photo"]), ("b", [("i", ["new"])]), ("a", ["details"]))


def padded_records_tree(length: int, records: int = 4) -> DomTree:
    """One area of ``records`` records, each ``length`` children wide.

    The price sits in the middle child of every record and ``length``
    price-free children pad both ends, so every shift offset survives the
    length and pivot checks.
    """
    mid = length // 2
    pad = [("p", [f"note {i}"]) for i in range(length)]
    kids = list(pad)
    for r in range(records):
        for j in range(length):
            kids.append(("div", [_p(100 + r)]) if j == mid else _FILLERS[j % len(_FILLERS)])
    kids += pad
    return build_tree(("html", [("body", [("div", kids)])]))
