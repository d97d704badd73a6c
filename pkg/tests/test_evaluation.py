import pytest

from tempex.dom import parse_html
from tempex.evaluation import Score, evaluate, evaluate_corpus
from tempex.pipeline import ExtractedArea, ExtractedAttribute, ExtractedRecord, ExtractionResult

PAGE = parse_html(b"<ul>" + b"".join(b"<li><b>%d</b><i>x</i></li>" % i for i in range(5)) + b"</ul>")


def result(starts, values=None, root="/0/0"):
    recs = []
    for i, s in enumerate(starts):
        attrs = ()
        if values is not None:
            attrs = (ExtractedAttribute("price", f"{s}/0/0", values[i]),)
        recs.append(ExtractedRecord(s, 1, attrs))
    return ExtractionResult("p", (ExtractedArea(root, len(starts), tuple(recs)),))


GOLD = result([f"/0/0/{i}" for i in range(4)], ["0", "1", "2", "3"])


def test_identical_results_score_one():
    m = evaluate(GOLD, GOLD, PAGE)
    for level in ("area", "record", "attribute"):
        assert (m[level].precision, m[level].recall, m[level].f1) == (1.0, 1.0, 1.0)
    assert m.per_type["price"].f1 == 1.0


def test_empty_prediction():
    m = evaluate(ExtractionResult("p"), GOLD)
    assert m["record"].recall == 0.0 and m["record"].precision == 1.0 and m["record"].f1 == 0.0


def test_one_shifted_record():
    pred = result(["/0/0/0", "/0/0/1", "/0/0/2", "/0/0/4"])
    m = evaluate(pred, GOLD, PAGE)
    assert m["record"].recall == 0.75 and m["record"].precision == 0.75


def test_values_must_match():
    pred = result([f"/0/0/{i}" for i in range(4)], ["0", "1", "2", "99"])
    m = evaluate(pred, GOLD)
    assert m["attribute"].tp == 3


def test_unresolvable_paths_are_rejected():
    with pytest.raises(ValueError, match="prediction"):
        evaluate(result(["/0/0/9"]), GOLD, PAGE)


def test_score_arithmetic():
    s = Score(3, 4, 6) + Score(1, 1, 2)
    assert (s.tp, s.predicted, s.gold) == (4, 5, 8)
    assert s.f1 == pytest.approx(2 * 0.8 * 0.5 / 1.3)
    assert Score(0, 0, 0).f1 == 1.0
    assert Score(0, 3, 3).f1 == 0.0


def test_corpus_micro_and_macro():
    half = result(["/0/0/0", "/0/0/1"])
    cm = evaluate_corpus([(GOLD, GOLD), (half, GOLD)])
    assert cm.pages == 2
    assert cm.micro["record"].recall == pytest.approx(6 / 8)
    assert cm.macro["record"]["recall"] == pytest.approx((1 + 0.5) / 2)
    assert "attribute:price" in cm.macro
    table = cm.micro.table()
    assert table.splitlines()[0].split() == ["level", "P", "R", "F1", "tp", "pred", "gold"]
