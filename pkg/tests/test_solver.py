import random
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from queens_completion.board import BoardError, PartialConfig, is_valid_partial, random_partial_config
from queens_completion.solver import (
    SolveBudget,
    Status,
    complete,
    count_completions,
    enumerate_all,
    first_solution_lex,
    iter_solutions,
    min_embedding,
)


def _oracle_solutions(n):
    """Permutation filter: column of the queen in each row."""
    out = []
    for p in permutations(range(1, n + 1)):
        if len({i + p[i] for i in range(n)}) == n and len({i - p[i] for i in range(n)}) == n:
            out.append({(i + 1, p[i]) for i in range(n)})
    return out


ORACLE = {n: _oracle_solutions(n) for n in range(1, 9)}


@pytest.mark.parametrize("n", range(1, 9))
def test_counts_match_oracle(n):
    assert enumerate_all(n) == len(ORACLE[n])
    assert {frozenset(s) for s in iter_solutions(n)} == {frozenset(s) for s in ORACLE[n]}


def test_known_counts():
    assert [enumerate_all(n) for n in range(1, 11)] == [1, 0, 0, 2, 10, 4, 40, 92, 352, 724]


def test_enumeration_ceiling():
    with pytest.raises(BoardError):
        enumerate_all(13)


def test_nauck():
    cfg = PartialConfig(8, [(4, 2), (5, 4)])
    assert count_completions(cfg).count == 2
    res = complete(cfg)
    assert res.status is Status.COMPLETED and set(cfg.queens) <= set(res.config.queens)


@settings(max_examples=80, deadline=None)
@given(st.integers(4, 8), st.integers(0, 4), st.integers(0, 10**6))
def test_complete_and_count_agree_with_oracle(n, k, seed):
    cfg = random_partial_config(n, min(k, n // 2), random.Random(seed))
    expected = sum(1 for s in ORACLE[n] if set(cfg.queens) <= s)
    assert count_completions(cfg).count == expected
    res = complete(cfg)
    if expected:
        assert res.status is Status.COMPLETED
        assert set(cfg.queens) <= set(res.config.queens) and is_valid_partial(res.config.queens, n)
    else:
        assert res.status is Status.INCOMPLETABLE


def test_budget_exhaustion_is_not_a_proof():
    res = complete(PartialConfig(3), SolveBudget(node_limit=1))
    assert res.status in (Status.BUDGET_EXHAUSTED, Status.INCOMPLETABLE)
    res = count_completions(PartialConfig(8), SolveBudget(solution_cap=5))
    assert res.exhausted and res.count == 5


def test_full_board_counts_once():
    full = first_solution_lex(8)
    assert count_completions(full).count == 1
    assert complete(full).config == full


def test_large_empty_board():
    res = complete(PartialConfig(100))
    assert res.status is Status.COMPLETED and is_valid_partial(res.config.queens, 100)


def test_min_embedding():
    corner = PartialConfig(4, [(1, 1)])
    emb = min_embedding(corner, 8)
    assert emb is not None and emb.n_star == 5 and emb.offset == (0, 0)
    assert is_valid_partial(emb.completion.queens, 5) and len(emb.completion) == 5
    assert min_embedding(PartialConfig(3), 3) is None


def test_first_solution_lex():
    assert sorted(first_solution_lex(4).queens) == [(1, 2), (2, 4), (3, 1), (4, 3)]
    assert first_solution_lex(3) is None
