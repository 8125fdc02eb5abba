import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from queens_completion.board import BoardError, Col, DiagMinus, DiagPlus, PartialConfig, Row, random_partial_config
from queens_completion.certificates import (
    LP_CEILING,
    FractionalCompletion,
    LineWeighting,
    certificate_document,
    certify_incompletable,
    covers,
    covers_unattacked,
    dump_certificate,
    has_fractional_completion,
    load_certificate,
    max_fractional_completion,
    min_cover_value,
    qc_star_probe,
    verify_certificate,
    weighting_value,
)
from queens_completion.constructions import third_construction
from queens_completion.solver import Status, complete


def test_empty_board_values():
    # every row is a line, so the packing value is at most n; uniform 1/n per square reaches it
    for n in (4, 5, 6):
        assert max_fractional_completion(PartialConfig(n)).optimal_value == n
        assert min_cover_value(PartialConfig(n)).optimal_value == n


def test_weighting_rejects_out_of_range():
    with pytest.raises(BoardError):
        LineWeighting(4, {Row(1): Fraction(3, 2)})
    with pytest.raises(BoardError):
        LineWeighting(4, {Row(5): 1})
    w = LineWeighting(4, {Row(1): 0, Col(2): Fraction(1, 2)})
    assert list(w.weights) == [Col(2)] and w[Row(1)] == 0


def test_covers_reports_first_gap():
    w = LineWeighting(3, {Row(1): 1, Row(2): 1})
    assert covers(w, [(1, 1), (2, 3)]).ok
    check = covers(w, [(1, 1), (3, 2)])
    assert not check.ok and tuple(check.witness) == (3, 2)


def test_all_rows_is_a_trivial_cover():
    cfg = PartialConfig(6, [(1, 2)])
    w = LineWeighting(6, {Row(i): 1 for i in range(2, 7)})
    assert covers_unattacked(w, cfg).ok
    assert weighting_value(w) == 5 and not certify_incompletable(cfg, w)


def test_third_construction_has_certificate():
    cfg = third_construction(12)
    lp = min_cover_value(cfg)
    assert lp.optimal_value == 6 < 8
    assert certify_incompletable(cfg, lp.dual)
    assert complete(cfg).status is Status.INCOMPLETABLE


def test_certificate_round_trip_and_tamper():
    cfg = third_construction(12)
    w = min_cover_value(cfg).dual
    text = dump_certificate(cfg, w)
    cfg2, w2, value = load_certificate(text)
    assert cfg2 == cfg and w2 == w and verify_certificate(cfg2, w2, value).passed
    doc = json.loads(text)
    # drop one weight to zero: some square loses its cover
    doc["weights"][0][2] = "0"
    doc["value"] = str(weighting_value(load_certificate(json.dumps(doc))[1]))
    _, w3, v3 = load_certificate(json.dumps(doc))
    verdict = verify_certificate(cfg, w3, v3)
    assert not verdict.passed and verdict.witness is not None


def test_value_mismatch_detected():
    cfg = third_construction(12)
    w = min_cover_value(cfg).dual
    assert not verify_certificate(cfg, w, Fraction(5)).passed


def test_completable_board_has_no_certificate():
    cfg = PartialConfig(8, [(4, 2), (5, 4)])
    assert min_cover_value(cfg).optimal_value >= 6
    assert has_fractional_completion(cfg)


def test_lp_ceiling():
    with pytest.raises(BoardError):
        max_fractional_completion(PartialConfig(LP_CEILING + 1))


def test_fractional_completion_feasibility():
    fc = FractionalCompletion(3, {(1, 1): Fraction(1, 2), (1, 3): Fraction(1, 2)})
    assert fc.total == 1 and fc.is_feasible()
    assert not FractionalCompletion(3, {(1, 1): 1, (1, 3): Fraction(1, 2)}).is_feasible()


@settings(max_examples=40, deadline=None)
@given(st.integers(4, 10), st.integers(0, 10**6))
def test_strong_and_weak_duality(n, seed):
    rng = random.Random(seed)
    cfg = random_partial_config(n, rng.randint(0, n // 2), rng)
    pk = max_fractional_completion(cfg)
    cv = min_cover_value(cfg)
    assert pk.optimal_value == cv.optimal_value
    assert pk.primal.is_feasible() and covers_unattacked(cv.dual, cfg).ok
    assert pk.primal.total <= weighting_value(cv.dual)
    assert weighting_value(pk.dual) == pk.optimal_value


def test_probe_is_consistent():
    rep = qc_star_probe(8, 2, 30, rng_seed=1)
    assert rep.trials == 30 and not rep.counterexamples
    assert rep.integral <= rep.fractional
    assert rep.as_record()["k"] == 2


def test_document_fields():
    cfg = PartialConfig(4, [(1, 1)])
    w = LineWeighting(4, {DiagPlus(0): Fraction(1, 3), DiagMinus(-1): 1})
    doc = certificate_document(cfg, w)
    assert doc["value"] == "4/3" and doc["n"] == 4
    assert ["D+", 0, "1", "3"] in doc["weights"]
