"""Board text formats: the JSON board document and algebraic notation ("b4,d5")."""

from __future__ import annotations

import json
import re
import string

from .board import BoardError, PartialConfig, Square


class ParseError(BoardError):
    """Input text could not be parsed; carries a 1-based line/column position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def board_to_document(cfg: PartialConfig) -> dict:
    return {"n": cfg.n, "queens": [[q.row, q.col] for q in cfg.sorted_queens()]}


def dump_board(cfg: PartialConfig) -> str:
    return json.dumps(board_to_document(cfg), sort_keys=True)


def board_from_document(doc: dict) -> PartialConfig:
    if not isinstance(doc, dict) or "n" not in doc:
        raise ParseError("board document needs an integer field 'n'")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"'n' must be a positive integer, got {n!r}")
    queens = doc.get("queens", [])
    pairs = []
    for idx, q in enumerate(queens):
        if not (isinstance(q, list) and len(q) == 2 and all(isinstance(v, int) for v in q)):
            raise ParseError(f"queens[{idx}] must be a [row, col] pair, got {q!r}")
        pairs.append((q[0], q[1]))
    return PartialConfig(n, pairs)


def load_board(text: str) -> PartialConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return board_from_document(doc)


_TOKEN = re.compile(r"[^,\s]+")
_ALGEBRAIC = re.compile(r"([a-z])([0-9]+)$")


def parse_algebraic(text: str, n: int) -> PartialConfig:
    """Parse tokens like ``"b4, d5"``: the letter is the column, the number the row."""
    if n > 26:
        raise ParseError(f"algebraic notation is only defined for n <= 26, got {n}")
    squares = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        for match in _TOKEN.finditer(line):
            tok = match.group(0).lower()
            m = _ALGEBRAIC.match(tok)
            if not m:
                raise ParseError(f"bad square token {match.group(0)!r}", lineno, match.start() + 1)
            col = string.ascii_lowercase.index(m.group(1)) + 1
            row = int(m.group(2))
            if not (1 <= col <= n and 1 <= row <= n):
                raise ParseError(f"square {match.group(0)!r} is off the {n}x{n} board", lineno, match.start() + 1)
            squares.append((row, col))
    try:
        return PartialConfig(n, squares)
    except BoardError as exc:
        raise ParseError(str(exc)) from None


def to_algebraic(sq: Square) -> str:
    return f"{string.ascii_lowercase[sq.col - 1]}{sq.row}"


def render_board(cfg: PartialConfig) -> str:
    """Text picture with row n at the top, as on a printed chessboard."""
    n = cfg.n
    lines = []
    for i in range(n, 0, -1):
        lines.append(" ".join("Q" if (i, j) in cfg.queens else "." for j in range(1, n + 1)))
    return "\n".join(lines)
