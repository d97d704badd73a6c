import math
import random

import pytest

from oracles import check_area, oracle_areas, oracle_distance, random_spec
from tempex.annotation import annotate
from tempex.areas import SENTINEL, identify, merge_intervals, path_lengths_interval, width
from tempex.dom import build_tree
from tempex.fixtures import clustering_tree, real_estate_schema, uniform_list_tree
from tempex.labels import DATA_AREA, ExtractionTyping

SCHEMA = real_estate_schema()


def areas_of(tree, depth, dist):
    ann = annotate(tree, SCHEMA, {})
    return ann, identify(tree, ann, "price", depth, dist)


def test_merge_intervals():
    assert merge_intervals((1, 3), (2, 5)) == (1, 5)
    assert merge_intervals(None, (4, 4)) == (4, 4)
    assert merge_intervals((4, 4), None) == (4, 4)
    assert merge_intervals(SENTINEL, (2, 9)) == (0, math.inf)
    assert width(None) == 0 and width((2, 5)) == 3


def test_path_lengths_interval():
    t = build_tree(("r", [("a", []), ("b", []), ("c", [("d", [])])]))
    a, b, c = t[0].children
    d = t[c].children[0]
    assert path_lengths_interval(t, [a], [b]) == (2, 2)
    assert path_lengths_interval(t, [], [b]) is None
    assert path_lengths_interval(t, [a, b], [d]) == (3, 3)
    assert path_lengths_interval(t, [a, d], [b]) == (2, 3)


@pytest.mark.parametrize("seed", range(10))
def test_path_lengths_interval_matches_all_pairs(seed):
    rng = random.Random(seed)
    t = build_tree(random_spec(rng))
    xs = rng.sample(range(len(t)), min(4, len(t)))
    ys = rng.sample(range(len(t)), min(3, len(t)))
    ds = [oracle_distance(t, x, y) for x in xs for y in ys]
    assert path_lengths_interval(t, xs, ys) == (min(ds), max(ds))


def test_wide_thresholds_merge_the_first_block():
    t = clustering_tree()
    _, areas = areas_of(t, 3, 3)
    got = {t.node_path(a.root): len(a.pivots) for a in areas}
    assert got == {"/0/0": 4, "/0/1": 3, "/0/2": 3}
    d1 = next(a for a in areas if t.node_path(a.root) == "/0/0")
    assert [t[p].text for p in d1.pivots] == ["£100", "£101", "£102", "£500"]


def test_default_thresholds_split_the_first_block():
    t = clustering_tree()
    _, areas = areas_of(t, 1, 2)
    got = {t.node_path(a.root): len(a.pivots) for a in areas}
    assert got == {"/0/0/0": 3, "/0/0/1": 4, "/0/2": 3}


def test_lone_header_price_is_excluded():
    # list prices are 4 apart, the header price is 6 from each of them
    header = ("li", [("div", [("span", ["£50"])])])
    items = [("li", [f"£{100 + i}"]) for i in range(4)]
    t = build_tree(("html", [("body", [("ul", [header, *items])])]))
    ann, areas = areas_of(t, 1, 2)
    lone = ann.nodes_of("price")[0]
    rest = ann.nodes_of("price")[1:]
    assert all(oracle_distance(t, lone, p) == 6 for p in rest)
    assert all(oracle_distance(t, p, q) == 4 for p in rest for q in rest if p != q)
    assert [(a.root, a.pivots) for a in areas] == [(t.resolve("/0/0"), tuple(rest))]


@pytest.mark.parametrize("k", [2, 3, 7, 20])
def test_uniform_list_is_one_area(k):
    t = uniform_list_tree(k)
    ann, areas = areas_of(t, 1, 2)
    assert len(areas) == 1 and areas[0].pivots == tuple(ann.nodes_of("price"))


def test_single_pivot_gives_no_area():
    t = uniform_list_tree(1)
    assert areas_of(t, 1, 2)[1] == []


def test_multiple_spans_collapse_to_one_pivot():
    t = build_tree(("html", [("body", [("ul", [("li", ["£1 or £2"]), ("li", ["£3"])])])]))
    ann, areas = areas_of(t, 1, 2)
    assert len(ann.by_type["price"]) == 3
    assert len(areas) == 1 and len(areas[0].pivots) == 2


def test_typing_labels_area_roots():
    t = clustering_tree()
    ann = annotate(t, SCHEMA, {})
    typing = ExtractionTyping()
    areas = identify(t, ann, "price", 1, 2, typing)
    assert sorted(typing.nodes_with(DATA_AREA)) == sorted(a.root for a in areas)


@pytest.mark.parametrize("seed", range(25))
def test_matches_oracle_and_checker(seed):
    rng = random.Random(seed)
    t = build_tree(random_spec(rng))
    ann = annotate(t, SCHEMA, {})
    pivots = ann.nodes_of("price")
    depth, dist = rng.randint(1, 3), rng.randint(1, 4)
    got = identify(t, ann, "price", depth, dist)
    assert [(a.root, a.pivots) for a in got] == oracle_areas(t, pivots, depth, dist)
    for a in got:
        assert check_area(t, a.root, list(a.pivots), pivots, depth, dist) == []
