"""Exact backtracking completion, counting and minimal-embedding search.

The search keeps occupancy bitsets for columns and both diagonal families and
always branches on the empty row with the fewest free squares. Columns are tried
in increasing order, so every result is deterministic.
"""

from __future__ import annotations

import enum
import sys
from dataclasses import dataclass

from .board import BoardError, PartialConfig, Square

ENUMERATION_CEILING = 12


class Status(enum.Enum):
    COMPLETED = "completed"
    INCOMPLETABLE = "incompletable"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class SolveBudget:
    """``node_limit`` of 0 means unlimited, as does ``solution_cap`` of 0."""

    node_limit: int = 0
    solution_cap: int = 0

    def __post_init__(self):
        if self.node_limit < 0 or self.solution_cap < 0:
            raise ValueError("budget fields must be non-negative")


UNLIMITED = SolveBudget()


@dataclass(frozen=True)
class SolveResult:
    status: Status
    config: PartialConfig | None
    nodes: int


@dataclass(frozen=True)
class CountResult:
    count: int
    exhausted: bool
    nodes: int


class _BudgetHit(Exception):
    pass


class _Search:
    def __init__(self, cfg: PartialConfig, budget: SolveBudget):
        n = self.n = cfg.n
        self.full = (1 << n) - 1
        self.cols = self.plus = self.minus = 0
        self.free_rows = set(range(n))
        self.placed: list[tuple[int, int]] = []
        for i, j in cfg.queens:
            self._place(i - 1, j - 1)
        self.budget = budget
        self.nodes = 0
        self.count = 0
        if n > sys.getrecursionlimit() - 200:
            sys.setrecursionlimit(n + 1000)

    def _place(self, i: int, j: int) -> None:
        self.cols |= 1 << j
        self.plus |= 1 << (i + j)
        self.minus |= 1 << (j - i + self.n - 1)
        self.free_rows.discard(i)
        self.placed.append((i, j))

    def _remove(self, i: int, j: int) -> None:
        self.cols &= ~(1 << j)
        self.plus &= ~(1 << (i + j))
        self.minus &= ~(1 << (j - i + self.n - 1))
        self.free_rows.add(i)
        self.placed.pop()

    def _available(self, i: int) -> int:
        return self.full & ~(self.cols | (self.plus >> i) | (self.minus >> (self.n - 1 - i)))

    def _pick_row(self) -> tuple[int, int]:
        """Fail-first: the free row with fewest options (ties to lowest index)."""
        best_row, best_mask, best_cnt = -1, 0, self.n + 1
        for i in sorted(self.free_rows):
            mask = self._available(i)
            cnt = mask.bit_count() if hasattr(mask, "bit_count") else bin(mask).count("1")
            if cnt < best_cnt:
                best_row, best_mask, best_cnt = i, mask, cnt
                if cnt == 0:
                    break
        return best_row, best_mask

    def _tick(self) -> None:
        self.nodes += 1
        if self.budget.node_limit and self.nodes > self.budget.node_limit:
            raise _BudgetHit

    def first(self) -> bool:
        self._tick()
        if not self.free_rows:
            return True
        i, mask = self._pick_row()
        while mask:
            low = mask & -mask
            j = low.bit_length() - 1
            self._place(i, j)
            if self.first():
                return True
            self._remove(i, j)
            mask ^= low
        return False

    def count_all(self) -> None:
        self._tick()
        if not self.free_rows:
            self.count += 1
            if self.budget.solution_cap and self.count >= self.budget.solution_cap:
                raise _BudgetHit
            return
        i, mask = self._pick_row()
        while mask:
            low = mask & -mask
            j = low.bit_length() - 1
            self._place(i, j)
            self.count_all()
            self._remove(i, j)
            mask ^= low


def _require(cfg: PartialConfig) -> None:
    if not isinstance(cfg, PartialConfig):
        raise BoardError("expected a PartialConfig")


def complete(cfg: PartialConfig, budget: SolveBudget = UNLIMITED) -> SolveResult:
    """Extend ``cfg`` to a full configuration, or prove that none exists.

    ``INCOMPLETABLE`` is only returned after the search tree has been fully
    explored; running out of ``budget.node_limit`` gives ``BUDGET_EXHAUSTED``.
    """
    _require(cfg)
    search = _Search(cfg, budget)
    try:
        found = search.first()
    except _BudgetHit:
        return SolveResult(Status.BUDGET_EXHAUSTED, None, search.nodes)
    if not found:
        return SolveResult(Status.INCOMPLETABLE, None, search.nodes)
    full = PartialConfig(cfg.n, [(i + 1, j + 1) for i, j in search.placed])
    return SolveResult(Status.COMPLETED, full, search.nodes)


def count_completions(cfg: PartialConfig, budget: SolveBudget = UNLIMITED) -> CountResult:
    """Number of full configurations containing ``cfg``.

    When ``exhausted`` is set the count is only a lower bound (node limit hit or
    ``solution_cap`` reached).
    """
    _require(cfg)
    search = _Search(cfg, budget)
    try:
        search.count_all()
    except _BudgetHit:
        return CountResult(search.count, True, search.nodes)
    return CountResult(search.count, False, search.nodes)


def enumerate_all(n: int, ceiling: int = ENUMERATION_CEILING) -> int:
    """Q(n), the number of n-queens configurations."""
    if n < 1:
        raise BoardError(f"board size must be positive, got {n}")
    if n > ceiling:
        raise BoardError(f"refusing to enumerate n={n}: above the ceiling {ceiling}")
    return count_completions(PartialConfig(n)).count


def iter_solutions(n: int):
    """Yield every n-queens configuration as a tuple of 1-indexed squares."""
    search = _Search(PartialConfig(n), UNLIMITED)

    def rec():
        if not search.free_rows:
            yield tuple(sorted(Square(i + 1, j + 1) for i, j in search.placed))
            return
        i, mask = search._pick_row()
        while mask:
            low = mask & -mask
            j = low.bit_length() - 1
            search._place(i, j)
            yield from rec()
            search._remove(i, j)
            mask ^= low

    yield from rec()


@dataclass(frozen=True)
class Embedding:
    n_star: int
    offset: tuple[int, int]
    completion: PartialConfig


def min_embedding(
    cfg: PartialConfig, n_ceiling: int, budget: SolveBudget = UNLIMITED
) -> Embedding | None:
    """Smallest board containing a translate of ``cfg`` that can be completed.

    Candidate sizes are tried in increasing order and offsets lexicographically;
    the first completable placement is returned. ``None`` means nothing was found
    up to ``n_ceiling``. A search cut short by ``budget`` counts as not found for
    that placement, so with a finite budget the answer is an upper bound only.
    """
    _require(cfg)
    for n_star in range(cfg.n, n_ceiling + 1):
        slack = n_star - cfg.n
        for di in range(slack + 1):
            for dj in range(slack + 1):
                res = complete(cfg.shifted(di, dj, n_star), budget)
                if res.status is Status.COMPLETED:
                    return Embedding(n_star, (di, dj), res.config)
    return None


def first_solution_lex(n: int) -> PartialConfig | None:
    """Lexicographically first n-queens configuration (row by row, columns ascending)."""
    cols: list[int] = []
    used_c, used_p, used_m = set(), set(), set()

    def rec(i: int) -> bool:
        if i == n:
            return True
        for j in range(n):
            if j in used_c or i + j in used_p or i - j in used_m:
                continue
            cols.append(j)
            used_c.add(j)
            used_p.add(i + j)
            used_m.add(i - j)
            if rec(i + 1):
                return True
            cols.pop()
            used_c.discard(j)
            used_p.discard(i + j)
            used_m.discard(i - j)
        return False

    if n > sys.getrecursionlimit() - 200:
        sys.setrecursionlimit(n + 1000)
    if not rec(0):
        return None
    return PartialConfig(n, [(i + 1, j + 1) for i, j in enumerate(cols)])
