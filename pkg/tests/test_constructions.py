from fractions import Fraction

import numpy as np
import pytest

from queens_completion.board import BoardError, Col, Row, is_valid_partial
from queens_completion.certificates import covers_unattacked, verify_certificate, weighting_value
from queens_completion.constructions import (
    central_embedding,
    central_instance,
    central_size,
    central_value,
    closed_form_bound,
    diagonal_distance_sum,
    find_n0,
    hat_weighting,
    near_diagonal_config,
    regularize_weighting,
    third_construction,
)
from queens_completion.solver import Status, complete


def _brute_totals(n):
    w = regularize_weighting(n)
    grid = [[w(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    plus, minus = {}, {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            plus[i + j - (n + 1)] = plus.get(i + j - (n + 1), 0) + grid[i - 1][j - 1]
            minus[i - j] = minus.get(i - j, 0) + grid[i - 1][j - 1]
    return grid, plus, minus


@pytest.mark.parametrize("n", [3, 7, 12, 30])
def test_line_totals_match_brute_force(n):
    grid, plus, minus = _brute_totals(n)
    totals = regularize_weighting(n).line_totals()
    assert totals["R"] == [sum(r) for r in grid]
    assert totals["C"] == [sum(c) for c in zip(*grid)]
    assert totals["D+"] == [plus[k] for k in range(-(n - 1), n)]
    assert totals["D-"] == [minus[k] for k in range(-(n - 1), n)]


def test_quarters_agree_with_call():
    w = regularize_weighting(10)
    q = w.quarters()
    assert all(Fraction(int(q[i - 1, j - 1]), 4) == w(i, j) for i in range(1, 11) for j in range(1, 11))
    assert np.allclose(w.as_array(), q / 4)


def test_near_diagonal_n7():
    cfg = near_diagonal_config(7)
    assert sorted(cfg.queens) == [(1, 2), (2, 4), (3, 6), (4, 1), (5, 3), (6, 5), (7, 7)]
    assert diagonal_distance_sum(cfg) == 32


def test_near_diagonal_congruence_error():
    with pytest.raises(BoardError, match="mod 6"):
        near_diagonal_config(9)


def test_central_size():
    assert central_size(1747) == 421
    assert all(central_size(n) % 6 == 1 and central_size(n) <= 0.241 * n for n in range(100, 3000, 37))


def test_hat_weighting_small_instance():
    n = 101
    inst = central_embedding(n)
    assert is_valid_partial(inst.config.queens, n)
    assert covers_unattacked(inst.certificate, inst.config).ok
    assert inst.value == central_value(n)
    # too small for a certificate, but the weighting is still a valid cover
    assert inst.value >= inst.target


def test_hat_weighting_zeroes_queen_diagonals():
    inst = central_embedding(201)
    for i, j in inst.config.queens:
        k_plus, k_minus = i + j - (inst.n + 1), i - j
        assert inst.certificate[("D+", k_plus)] == 0 and inst.certificate[("D-", k_minus)] == 0


def test_n0_and_value():
    assert find_n0() == 1747
    assert find_n0(start=29, stop=1747) is None
    inst = central_embedding(1747)
    assert inst.value == Fraction(220107, 166) < 1326
    assert verify_certificate(inst.config, inst.certificate, inst.value).passed


def test_closed_form_constant_range():
    lo, hi = Fraction(19, 39), Fraction(413, 528)
    for n in range(29, 4001, 2):
        m = central_size(n)
        if m < 7:
            continue
        t = (n - m) // 2
        c = central_value(n) - closed_form_bound(m, t)
        assert lo <= c <= hi


def test_even_n_device():
    inst = central_instance(3914)
    assert inst.certificate[Row(3914)] == 1 and inst.certificate[Col(3914)] == 1
    assert weighting_value(inst.certificate) == central_value(3913) + 2
    assert weighting_value(inst.certificate) < inst.target
    assert covers_unattacked(inst.certificate, inst.config).ok


def test_even_n_at_n0_falls_short_by_the_extra_lines():
    inst = central_instance(1748)
    assert covers_unattacked(inst.certificate, inst.config).ok
    assert not weighting_value(inst.certificate) < inst.target


def test_third_construction():
    cfg = third_construction(12)
    assert sorted(cfg.queens) == [(5, 6), (6, 8), (7, 5), (8, 7)]
    assert complete(cfg).status is Status.INCOMPLETABLE
    with pytest.raises(BoardError):
        third_construction(13)


def test_hat_weighting_rejects_bad_margin():
    cfg = near_diagonal_config(7).shifted(3, 3, 13)
    with pytest.raises(BoardError):
        hat_weighting(13, 7, 4, cfg)
