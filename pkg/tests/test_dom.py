import math
import random

import pytest

from oracles import bfs_distance, brute_lca, random_tree
from tempex.dom import TEXT, build_tree, format_node_path, parse_html


def test_parse_single_paragraph():
    t = parse_html(b"<p>a</p>")
    assert t.to_spec() == ("html", [("body", [("p", ["a"])])])


def test_whitespace_only_text_is_dropped():
    t = parse_html(b"<p>  </p>")
    p = t.resolve("/0/0")
    assert t.tag(p) == "p"
    assert t[p].children == []


def test_punctuated_fragment_stays_one_text_node():
    t = parse_html("<div><span>Oxford,£2k</span></div>".encode())
    span = t.resolve("/0/0/0")
    (kid,) = t[span].children
    assert t.is_text(kid) and t[kid].text == "Oxford,£2k"


def test_scripts_styles_comments_and_head_are_removed():
    t = parse_html(b"<html><head><title>x</title></head><body><!-- c --><script>1</script>"
                   b"<style>p{}</style><p>k</p></body></html>")
    tags = [t.tag(n) for n in range(len(t))]
    assert "script" not in tags and "style" not in tags and "head" not in tags and "title" not in tags
    assert t.to_spec() == ("html", [("body", [("p", ["k"])])])


def test_malformed_markup_is_recovered():
    t = parse_html(b"<div><p>one<p>two</div>")
    assert [t[c].tag for c in t[t.resolve("/0/0")].children] == ["p", "p"]


def test_sibling_distance_examples():
    t = build_tree(("r", [("a", []), ("b", []), ("c", [("d", [])])]))
    a, b, c = t[0].children
    assert t.sibling_distance(a, c) == 2
    assert t.sibling_distance(c, a) == -2
    assert t.sibling_distance(a, a) == 0
    assert t.sibling_distance(0, a) == math.inf
    assert t.sibling_distance(a, t[c].children[0]) == math.inf


def test_path_length_examples():
    t = build_tree(("r", [("x", [("a", [("c1", [])])]), ("y", [("b", [("c2", [])])])]))
    c1, c2 = t.resolve("/0/0/0"), t.resolve("/1/0/0")
    assert t.path_length(c1, c1) == 0
    assert t.path_length(t.resolve("/0"), t.resolve("/0/0")) == 1
    # cousins at depth 3 whose lca is the root
    assert t.path_length(c1, c2) == bfs_distance(t, c1, c2) == 6
    t2 = build_tree(("h", [("r", [("x", [("a", [])]), ("y", [("b", [])])])]))
    a, b = t2.resolve("/0/0/0"), t2.resolve("/0/1/0")
    assert t2.depth(a) == 3 and t2.depth(t2.lca([a, b])) == 1
    assert t2.path_length(a, b) == 4


def test_lca_examples():
    t = build_tree(("r", [("a", []), ("b", [])]))
    a, b = t[0].children
    assert t.lca([a]) == a
    assert t.lca([a, b]) == 0
    with pytest.raises(ValueError):
        t.lca([])


@pytest.mark.parametrize("seed", range(20))
def test_lca_matches_ancestor_intersection(seed):
    rng = random.Random(seed)
    t = random_tree(seed, max_depth=6)
    assert len(t) >= 1
    for _ in range(30):
        k = rng.randint(1, 4)
        nodes = [rng.randrange(len(t)) for _ in range(k)]
        assert t.lca(nodes) == brute_lca(t, nodes)


def test_tag_path_example():
    t = build_tree(("a", [("p", [("span", ["£1"]), ("i", ["x"])])]))
    i = t.resolve("/0/1")
    assert t.tag_path(0, i) == "a/first-child::p/first-child::span/next-sibl::i"
    assert t.tag_path(i, i) == "i"
    assert t.tag_path(0, t.resolve("/0/1/0")).endswith("next-sibl::i/first-child::text()")


def test_tag_path_identical_records():
    rec = ("li", [("b", ["£1"]), ("span", [("i", ["x"])])])
    t = build_tree(("ul", [rec, rec]))
    r1, r2 = t[0].children
    for x, y in zip(t.subtree(r1), t.subtree(r2)):
        assert t.tag_path(r1, x) == t.tag_path(r2, y)


def test_tag_path_across_sibling_records():
    t = build_tree(("div", [("h3", ["t"]), ("p", [("b", ["£1"])])]))
    h3, p = t[0].children
    b_text = t.resolve("/1/0/0")
    assert t.tag_path(h3, b_text) == "h3/next-sibl::p/first-child::b/first-child::text()"
    with pytest.raises(ValueError):
        t.tag_path(p, t.resolve("/0/0"))


def test_node_path_resolution():
    t = parse_html(b"<div><ul><li>a</li><li>b</li></ul></div>")
    li = t.resolve("/0/0/0/1")
    assert t.tag(li) == "li"
    assert t.node_path(li) == "/0/0/0/1"
    assert format_node_path([0, 2]) == "/0/2"
    with pytest.raises(ValueError):
        t.resolve("/0/9")
    with pytest.raises(ValueError):
        t.resolve("0/0")


def test_tree_shape_contract():
    t = parse_html(b"<div><p>a<b>b</b>c</p><ul><li>x</li></ul></div>")
    assert t[t.root].parent is None
    for n in t.nodes:
        for i, c in enumerate(n.children):
            assert t[c].parent == n.id and t[c].index == i
            assert t.depth(c) == t.depth(n.id) + 1
        if n.tag == TEXT:
            assert n.children == []
