import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from queens_completion.board import (
    BoardError,
    Col,
    DiagMinus,
    DiagPlus,
    LineId,
    PartialConfig,
    Row,
    Square,
    all_lines,
    canonical_form,
    is_valid_partial,
    line_index,
    line_squares,
    lines_through,
    random_partial_config,
    symmetric_images,
    unattacked,
    unattacked_mask,
)


def _attacks(p, q):
    return p[0] == q[0] or p[1] == q[1] or abs(p[0] - q[0]) == abs(p[1] - q[1])


def test_line_count_and_order():
    for n in range(1, 9):
        lines = all_lines(n)
        assert len(lines) == 6 * n - 2
        assert [line_index(ln, n) for ln in lines] == list(range(6 * n - 2))
    lines = all_lines(3)
    assert lines[:3] == [Row(1), Row(2), Row(3)]
    assert lines[6] == DiagPlus(-2) and lines[-1] == DiagMinus(2)


def test_lines_through_corner():
    assert lines_through((1, 1), 8) == [Row(1), Col(1), DiagPlus(-7), DiagMinus(0)]


@pytest.mark.parametrize("n", [1, 4, 7])
def test_every_square_on_exactly_four_lines(n):
    seen = {}
    for ln in all_lines(n):
        for sq in line_squares(ln, n):
            seen.setdefault(sq, []).append(ln)
    assert len(seen) == n * n
    assert all(len(v) == 4 and set(v) == set(lines_through(sq, n)) for sq, v in seen.items())


def test_out_of_range_rejected():
    with pytest.raises(BoardError):
        PartialConfig(4, [(0, 1)])
    with pytest.raises(BoardError):
        line_squares(DiagPlus(4), 4)
    with pytest.raises(BoardError):
        line_squares(LineId("X", 1), 4)


def test_attacking_queens_rejected():
    with pytest.raises(BoardError):
        PartialConfig(8, [(1, 1), (3, 3)])
    assert not is_valid_partial([(2, 2), (2, 5)], 8)
    assert is_valid_partial([(4, 2), (5, 4)], 8)


def test_unattacked_matches_brute_force():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 10)
        cfg = random_partial_config(n, rng.randint(0, n // 2), rng)
        brute = {
            Square(i, j)
            for i in range(1, n + 1)
            for j in range(1, n + 1)
            if not any(_attacks((i, j), q) for q in cfg.queens)
        }
        assert unattacked(cfg) == brute
        assert int(unattacked_mask(cfg).sum()) == len(brute)


def test_empty_and_full():
    assert len(unattacked(PartialConfig(5))) == 25
    full = PartialConfig(4, [(1, 2), (2, 4), (3, 1), (4, 3)])
    assert full.is_complete and not unattacked(full)


def test_symmetries():
    cfg = PartialConfig(8, [(1, 2)])
    images = {tuple(sorted(c.queens)) for c in symmetric_images(cfg)}
    assert len(images) == 8
    assert canonical_form([(1, 2)], 8) == canonical_form([(8, 7)], 8) == ((1, 2),)
    assert canonical_form([(2, 2)], 4) == canonical_form([(3, 3)], 4)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 14), st.integers(0, 7), st.integers(0, 10**6))
def test_random_configs_are_valid(n, k, seed):
    k = min(k, n if n not in (2, 3) else 1)
    cfg = random_partial_config(n, k, random.Random(seed))
    assert len(cfg) == k
    assert all(not _attacks(p, q) for p in cfg.queens for q in cfg.queens if p != q)
    for img in symmetric_images(cfg):
        assert is_valid_partial(img.queens, n)


def test_shifted():
    cfg = PartialConfig(4, [(1, 2)])
    moved = cfg.shifted(2, 3, 8)
    assert moved.n == 8 and set(moved.queens) == {Square(3, 5)}
