import math

import pytest

from tempex.annotation import Annotation, AnnotationSet, Gazetteer, schema_from_dict
from tempex.corpus import CorpusSpec, generate_corpus
from tempex.dom import build_tree
from tempex.fixtures import running_example
from tempex.learning import components, learn_loop, learn_step, term_set_f1
from tempex.pipeline import analyze


@pytest.mark.parametrize("text, expected", [
    ("Oxford, Walton Street, ground-floor apartment", ["Oxford", "Walton Street", "ground-floor", "apartment"]),
    ("Oxford", ["Oxford"]),
    (",,,", []),
    ("flat in Summertown - Oxford", ["flat", "in", "Summertown", "Oxford"]),
])
def test_components(text, expected):
    assert components(text) == expected


def test_inferred_location_is_learned():
    tree, schema, gaz = running_example()
    page = analyze(tree, schema, gaz)
    assert "Medhurst Way" not in gaz["location"]
    report = learn_step(tree, [(a.node, a.type) for a in page.attributes], page.ann, gaz, schema)
    assert "Medhurst Way" in gaz["location"]
    assert "Medhurst Way" in report.learned
    assert gaz["location"].ev("Medhurst Way")[0] == 1


def _one_annotation(term="Van"):
    t = build_tree(("p", [term]))
    ann = AnnotationSet([Annotation(1, 0, len(term), "location", term)])
    schema = schema_from_dict({"types": [
        {"name": "price", "pivot": True, "patterns": ["£\\d+"], "normalizer": "price"},
        {"name": "location", "gazetteer": "location.txt"},
    ]})
    return t, ann, schema


def test_unconfirmed_term_is_blacklisted():
    t, ann, schema = _one_annotation()
    gaz = {"location": Gazetteer("location", ["Van"])}
    report = learn_step(t, [], ann, gaz, schema)
    assert gaz["location"].ev("Van") == [0, 1]
    assert gaz["location"].is_banned("Van") and report.dropped == ["Van"]


def test_zero_theta_never_blacklists():
    t, ann, schema = _one_annotation()
    gaz = {"location": Gazetteer("location", ["Van"])}
    learn_step(t, [], ann, gaz, schema, theta=0)
    assert not gaz["location"].is_banned("Van")


def test_huge_theta_blacklists_any_negative_evidence():
    t, ann, schema = _one_annotation()
    gaz = {"location": Gazetteer("location", ["Van"])}
    gaz["location"].ev("Van")[0] = 10**6
    learn_step(t, [], ann, gaz, schema, theta=math.inf)
    assert gaz["location"].is_banned("Van")


def test_enough_positive_evidence_survives():
    t, ann, schema = _one_annotation()
    gaz = {"location": Gazetteer("location", ["Van"])}
    gaz["location"].ev("Van")[0] = 2
    learn_step(t, [], ann, gaz, schema)
    assert not gaz["location"].is_banned("Van")


def test_disjoint_terms_are_not_learned():
    schema = schema_from_dict({
        "types": [
            {"name": "price", "pivot": True, "patterns": ["£\\d+"], "normalizer": "price"},
            {"name": "location", "gazetteer": "location.txt"},
            {"name": "kind", "kind": "optional", "gazetteer": "kind.txt"},
        ],
        "disjoint": [["location", "kind"]],
    })
    t = build_tree(("p", ["Jericho flat"]))
    gaz = {"location": Gazetteer("location"), "kind": Gazetteer("kind", ["flat"])}
    learn_step(t, [(1, "location")], AnnotationSet(), gaz, schema)
    assert gaz["location"].active_terms() == ["Jericho"]


def test_term_set_f1():
    g = Gazetteer("location", ["a", "b", "c"], blacklist=["c"])
    assert term_set_f1(g, ["a", "b"]) == 1.0
    assert term_set_f1(g, ["a", "b", "d", "e"]) == pytest.approx(2 * 1 * 0.5 / 1.5)


def test_empty_page_set_is_a_no_op():
    _, schema, gaz = running_example()
    run = learn_loop({}, schema, gaz)
    assert run.reports == [] and run.saturated
    assert run.gazetteers["location"].active_terms() == gaz["location"].active_terms()


def test_complete_gazetteer_saturates_at_once():
    c = generate_corpus(CorpusSpec(pages=5), seed=3)
    run = learn_loop(c.pages, c.schema, c.full_gazetteers())
    assert run.saturated and len(run.reports) == 1
    assert run.reports[0].learned == [] and run.reports[0].dropped == []


def test_seed_gazetteers_are_not_mutated():
    c = generate_corpus(CorpusSpec(pages=5), seed=3)
    seed = c.gazetteers(0.3)
    before = seed["location"].active_terms()
    run = learn_loop(c.pages, c.schema, seed, max_rounds=2)
    assert seed["location"].active_terms() == before
    assert len(run.gazetteers["location"]) > len(before)


def test_loop_reports_are_deterministic():
    c = generate_corpus(CorpusSpec(pages=6, description_rate=0.3), seed=8)
    seed = c.gazetteers(0.2)
    a = learn_loop(c.pages, c.schema, seed, gold={n: c.gold_attributes(n) for n in c.pages})
    b = learn_loop(dict(reversed(list(c.pages.items()))), c.schema, seed, gold={n: c.gold_attributes(n) for n in c.pages})
    assert [r.to_dict() for r in a.reports] == [r.to_dict() for r in b.reports]
