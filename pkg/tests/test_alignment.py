import pytest

from oracles import well_supported
from tempex.alignment import ANNOTATED, INFERRED, SupportTable, align, align_area, support
from tempex.annotation import Gazetteer, annotate
from tempex.dom import build_tree
from tempex.fixtures import ALIGNMENT_LOCATIONS, alignment_records, alignment_tree, real_estate_schema
from tempex.labels import ExtractionTyping
from tempex.segmentation import RecordSegmentation

FIXTURE_THRESHOLDS = dict(inferR=0.4, inferO=0.4, keepO=0.3, keepR=0.0)


def aligned(tree, records, schema, gaz):
    ann = annotate(tree, schema, gaz)
    seg = RecordSegmentation(tree[records[0][0]].parent, len(records[0]), records, 0.0)
    return ann, align_area(tree, seg, schema, ann)


def test_alignment_fixture():
    tree = alignment_tree()
    records = alignment_records(tree)
    schema = real_estate_schema(**FIXTURE_THRESHOLDS)
    _, attrs = aligned(tree, records, schema, {"location": Gazetteer("location", ALIGNMENT_LOCATIONS)})
    got = {(records.index(next(r for r in records if r[0] == a.record)) + 1, a.type, a.value, a.provenance) for a in attrs}
    assert got == {
        (1, "price", "1250", ANNOTATED),
        (1, "location", "Jericho", INFERRED),
        (2, "price", "Price on application", INFERRED),
        (2, "location", "Summertown", ANNOTATED),
        (3, "price", "900", ANNOTATED),
        (3, "location", "Headington", ANNOTATED),
        (4, "price", "1100", ANNOTATED),
        (4, "location", "Cowley", ANNOTATED),
    }
    em = next(a for a in attrs if a.value == "Headington")
    assert tree.tag(tree[em.node].parent) == "em" and em.support == 0.25


def _list_records(n, annotated_at):
    """``n`` records of two spans; ``annotated_at`` maps record index to the annotated span (0 or 1)."""
    items = []
    for i in range(n):
        spans = [("span", ["x"]), ("span", ["y"])]
        if i in annotated_at:
            spans[annotated_at[i]] = ("span", [f"£{i}"])
        items.append(("li", spans))
    t = build_tree(("ul", items))
    return t, [(c,) for c in t[0].children]


def test_support_fractions():
    schema = real_estate_schema()
    annotated = {0: 0, 1: 1, 2: 1, 3: 1}
    t, records = _list_records(10, annotated)
    ann = annotate(t, schema, {})
    first = t.resolve("/0/0/0")
    second = t.resolve("/1/1/0")
    assert support(t, records, 0, first, "price", ann) == pytest.approx(0.1)
    assert support(t, records, 1, second, "price", ann) == pytest.approx(0.3)
    table = SupportTable(t, records, ann)
    assert table.support(t.tag_path(records[0][0], first), "price") == pytest.approx(0.1)


def test_featured_area_support_is_two_thirds():
    t = build_tree(("div", [("div", ["£1", ("span", ["Walton Street"])]),
                            ("div", ["£2", ("span", ["Banbury Road"])]),
                            ("div", ["£3", ("span", ["Medhurst Way"])])]))
    records = [(c,) for c in t[0].children]
    ann = annotate(t, real_estate_schema(), {"location": Gazetteer("location", ["Walton Street", "Banbury Road"])})
    medhurst = t.resolve("/2/1/0")
    assert support(t, records, 2, medhurst, "location", ann) == pytest.approx(2 / 3)


def test_full_support():
    t, records = _list_records(4, {i: 0 for i in range(4)})
    ann = annotate(t, real_estate_schema(), {})
    assert support(t, records, 2, t.resolve("/2/0/0"), "price", ann) == 1.0


def test_no_annotations_no_attributes():
    t, records = _list_records(4, {i: 0 for i in range(4)})
    schema = real_estate_schema()
    _, attrs = aligned(t, records, schema, {"location": Gazetteer("location")})
    assert {a.type for a in attrs} == {"price"}


@pytest.mark.parametrize("th", [dict(), dict(inferR=1.0, inferO=1.0, keepO=1.0, keepR=1.0)])
def test_every_record_annotated_gives_every_record(th):
    t, records = _list_records(5, {i: 1 for i in range(5)})
    schema = real_estate_schema(**th)
    _, attrs = aligned(t, records, schema, {})
    if th:
        # support 1.0 never exceeds a threshold of 1.0
        assert attrs == []
    else:
        assert sorted(a.record for a in attrs) == [r[0] for r in records]


def test_first_qualifying_node_in_document_order():
    t = build_tree(("ul", [("li", [("b", ["£1"]), ("i", ["£9"])]), ("li", [("b", ["£2"]), ("i", ["£8"])])]))
    records = [(c,) for c in t[0].children]
    _, attrs = aligned(t, records, real_estate_schema(), {})
    assert [a.value for a in attrs] == ["1", "2"]


def test_typing_labels_and_checker():
    tree = alignment_tree()
    records = alignment_records(tree)
    schema = real_estate_schema(**FIXTURE_THRESHOLDS)
    ann = annotate(tree, schema, {"location": Gazetteer("location", ALIGNMENT_LOCATIONS)})
    seg = RecordSegmentation(tree.resolve("/0/0"), 2, records, 0.0)
    typing = ExtractionTyping()
    attrs = align(tree, [seg], schema, ann, typing)
    for a in attrs:
        assert typing.has(a.node, a.type)
        i = next(k for k, r in enumerate(records) if r[0] == a.record)
        t = schema.type(a.type)
        assert well_supported(tree, records, i, a.node, a.type, ann, schema.thresholds.infer(t.kind), schema.thresholds.keep(t.kind))
