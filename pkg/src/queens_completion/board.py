"""Chessboard model: squares, lines, partial configurations and attacks.

Coordinates are 1-indexed. Row ``i`` and column ``j`` lie on the plus-diagonal
``i + j - (n + 1)`` and the minus-diagonal ``i - j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

ROW, COL, DIAG_PLUS, DIAG_MINUS = "R", "C", "D+", "D-"
LINE_KINDS = (ROW, COL, DIAG_PLUS, DIAG_MINUS)
_KIND_ORDER = {k: idx for idx, k in enumerate(LINE_KINDS)}


class BoardError(ValueError):
    """Raised for squares, lines or configurations that are invalid for the board."""


class Square(NamedTuple):
    row: int
    col: int

    def __str__(self) -> str:
        return f"({self.row},{self.col})"


class LineId(NamedTuple):
    """A row, column or diagonal. ``index`` is i, j or the diagonal offset k."""

    kind: str
    index: int

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"

    def sort_key(self) -> tuple[int, int]:
        return _KIND_ORDER[self.kind], self.index


def Row(i: int) -> LineId:
    return LineId(ROW, i)


def Col(j: int) -> LineId:
    return LineId(COL, j)


def DiagPlus(k: int) -> LineId:
    return LineId(DIAG_PLUS, k)


def DiagMinus(k: int) -> LineId:
    return LineId(DIAG_MINUS, k)


def check_square(sq: tuple[int, int], n: int) -> Square:
    if n < 1:
        raise BoardError(f"board size must be positive, got {n}")
    i, j = sq
    if not (1 <= i <= n and 1 <= j <= n):
        raise BoardError(f"square ({i},{j}) is off the {n}x{n} board")
    return Square(int(i), int(j))


def check_line(line: LineId, n: int) -> LineId:
    kind, k = line
    if kind in (ROW, COL):
        if not 1 <= k <= n:
            raise BoardError(f"{kind}{k} is not a line of the {n}x{n} board")
    elif kind in (DIAG_PLUS, DIAG_MINUS):
        if not -(n - 1) <= k <= n - 1:
            raise BoardError(f"diagonal offset {k} outside [-{n - 1}, {n - 1}]")
    else:
        raise BoardError(f"unknown line kind {kind!r}")
    return line


def all_lines(n: int) -> list[LineId]:
    """The 6n-2 lines in canonical order: rows, columns, D+ by k, D- by k."""
    diag = range(-(n - 1), n)
    return (
        [Row(i) for i in range(1, n + 1)]
        + [Col(j) for j in range(1, n + 1)]
        + [DiagPlus(k) for k in diag]
        + [DiagMinus(k) for k in diag]
    )


def line_index(line: LineId, n: int) -> int:
    """Position of ``line`` in :func:`all_lines` order."""
    kind, k = line
    if kind == ROW:
        return k - 1
    if kind == COL:
        return n + k - 1
    if kind == DIAG_PLUS:
        return 2 * n + k + n - 1
    return 2 * n + (2 * n - 1) + k + n - 1


def lines_through(sq: tuple[int, int], n: int) -> list[LineId]:
    i, j = check_square(sq, n)
    return [Row(i), Col(j), DiagPlus(i + j - (n + 1)), DiagMinus(i - j)]


def line_squares(line: LineId, n: int) -> list[Square]:
    kind, k = check_line(line, n)
    if kind == ROW:
        return [Square(k, j) for j in range(1, n + 1)]
    if kind == COL:
        return [Square(i, k) for i in range(1, n + 1)]
    if kind == DIAG_PLUS:
        # i + j = k + n + 1
        s = k + n + 1
        return [Square(i, s - i) for i in range(max(1, s - n), min(n, s - 1) + 1)]
    return [Square(i, i - k) for i in range(max(1, k + 1), min(n, n + k) + 1)]


def is_valid_partial(queens: Iterable[tuple[int, int]], n: int) -> bool:
    rows, cols, plus, minus = set(), set(), set(), set()
    for sq in queens:
        i, j = check_square(sq, n)
        p, m = i + j, i - j
        if i in rows or j in cols or p in plus or m in minus:
            return False
        rows.add(i)
        cols.add(j)
        plus.add(p)
        minus.add(m)
    return True


@dataclass(frozen=True)
class PartialConfig:
    """Mutually non-attacking queens on an ``n`` x ``n`` board."""

    n: int
    queens: frozenset[Square]

    def __init__(self, n: int, queens: Iterable[tuple[int, int]] = ()):
        qs = frozenset(check_square(q, n) for q in queens)
        if not is_valid_partial(qs, n):
            raise BoardError("two queens share a line")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "queens", qs)

    def __len__(self) -> int:
        return len(self.queens)

    def __iter__(self) -> Iterator[Square]:
        return iter(sorted(self.queens))

    def __contains__(self, sq: object) -> bool:
        return sq in self.queens

    @property
    def is_complete(self) -> bool:
        return len(self.queens) == self.n

    def sorted_queens(self) -> list[Square]:
        return sorted(self.queens)

    def with_queens(self, extra: Iterable[tuple[int, int]]) -> PartialConfig:
        return PartialConfig(self.n, list(self.queens) + list(extra))

    def shifted(self, di: int, dj: int, n: int) -> PartialConfig:
        """The same queens translated by (di, dj) onto an ``n`` x ``n`` board."""
        return PartialConfig(n, [(i + di, j + dj) for i, j in self.queens])

    def occupied_lines(self) -> set[LineId]:
        out: set[LineId] = set()
        for q in self.queens:
            out.update(lines_through(q, self.n))
        return out


def occupancy(cfg: PartialConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Boolean occupancy of rows, columns, D+ and D- (diagonals indexed k + n - 1)."""
    n = cfg.n
    rows = np.zeros(n + 1, dtype=bool)
    cols = np.zeros(n + 1, dtype=bool)
    plus = np.zeros(2 * n - 1, dtype=bool)
    minus = np.zeros(2 * n - 1, dtype=bool)
    for i, j in cfg.queens:
        rows[i] = cols[j] = True
        plus[i + j - (n + 1) + n - 1] = True
        minus[i - j + n - 1] = True
    return rows, cols, plus, minus


def unattacked_mask(cfg: PartialConfig, row_slice: slice | None = None) -> np.ndarray:
    """Mask of unattacked squares; entry [a, b] is square (a + 1, b + 1).

    ``row_slice`` restricts the result to a band of rows (0-based, as for numpy),
    which keeps memory bounded on very large boards.
    """
    n = cfg.n
    rows, cols, plus, minus = occupancy(cfg)
    start, stop, _ = (row_slice or slice(0, n)).indices(n)
    i = np.arange(start + 1, stop + 1)[:, None]
    j = np.arange(1, n + 1)[None, :]
    free = ~rows[i] & ~cols[j]
    free &= ~plus[i + j - 2]
    free &= ~minus[i - j + n - 1]
    return free


def unattacked(cfg: PartialConfig) -> frozenset[Square]:
    """Squares sharing no line with any queen of ``cfg`` (queen squares excluded)."""
    ii, jj = np.nonzero(unattacked_mask(cfg))
    return frozenset(Square(int(a) + 1, int(b) + 1) for a, b in zip(ii, jj))


# The eight symmetries of the square, as maps on 1-indexed coordinates.
def _symmetries(n: int):
    m = n + 1
    return (
        lambda i, j: (i, j),
        lambda i, j: (j, m - i),
        lambda i, j: (m - i, m - j),
        lambda i, j: (m - j, i),
        lambda i, j: (i, m - j),
        lambda i, j: (m - i, j),
        lambda i, j: (j, i),
        lambda i, j: (m - j, m - i),
    )


def symmetric_images(cfg: PartialConfig) -> list[PartialConfig]:
    """All 8 images of ``cfg`` under rotations and reflections (with repeats)."""
    return [PartialConfig(cfg.n, [f(i, j) for i, j in cfg.queens]) for f in _symmetries(cfg.n)]


def canonical_form(queens: Iterable[tuple[int, int]], n: int) -> tuple[tuple[int, int], ...]:
    """Lexicographically smallest sorted image of ``queens`` under the board symmetries."""
    qs = list(queens)
    return min(tuple(sorted(f(i, j) for i, j in qs)) for f in _symmetries(n))


def random_partial_config(n: int, k: int, rng, max_restarts: int = 1000) -> PartialConfig:
    """Place ``k`` queens one at a time, each uniformly among the unattacked squares.

    Restarts from scratch when the board jams; raises :class:`BoardError` if no
    size-``k`` configuration turns up within ``max_restarts`` attempts.
    """
    if k > n:
        raise BoardError(f"cannot place {k} queens on a {n}x{n} board")
    for _ in range(max_restarts):
        rows, cols, plus, minus = set(), set(), set(), set()
        queens = []
        for _ in range(k):
            free = [
                (i, j)
                for i in range(1, n + 1)
                if i not in rows
                for j in range(1, n + 1)
                if j not in cols and i + j not in plus and i - j not in minus
            ]
            if not free:
                break
            i, j = free[rng.randrange(len(free))]
            queens.append((i, j))
            rows.add(i)
            cols.add(j)
            plus.add(i + j)
            minus.add(i - j)
        else:
            return PartialConfig(n, queens)
    raise BoardError(f"no partial configuration of size {k} found for n={n}")
