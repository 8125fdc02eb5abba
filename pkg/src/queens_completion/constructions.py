"""Explicit objects: the square weighting with light diagonals, the
near-diagonal configuration, the central-box instance with its line-weighting
certificate, and the simple n/3 construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .board import (
    BoardError,
    Col,
    DiagMinus,
    DiagPlus,
    LineId,
    PartialConfig,
    Row,
    DIAG_PLUS,
)
from .certificates import LineWeighting, weighting_value
from .solver import first_solution_lex

HALF, THREE_QUARTERS, ONE = Fraction(1, 2), Fraction(3, 4), Fraction(1)
CENTRAL_RATIO = Fraction(241, 1000)


# ---------------------------------------------------------------------------
# square weighting


def _is_middle(i: int, n: int) -> bool:
    # i/(n+1) in [1/3, 2/3]
    return 3 * i >= n + 1 and 3 * i <= 2 * (n + 1)


@dataclass(frozen=True)
class SquareWeighting:
    """Weights in {1/2, 3/4, 1}: 1/2 on the central block, 3/4 on the corner blocks."""

    n: int

    def __call__(self, i: int, j: int) -> Fraction:
        mi, mj = _is_middle(i, self.n), _is_middle(j, self.n)
        if mi and mj:
            return HALF
        if not mi and not mj:
            return THREE_QUARTERS
        return ONE

    def quarters(self) -> np.ndarray:
        """Integer array of 4 * weight; entry [a, b] is square (a + 1, b + 1)."""
        idx = np.arange(1, self.n + 1)
        mid = (3 * idx >= self.n + 1) & (3 * idx <= 2 * (self.n + 1))
        both = mid[:, None] & mid[None, :]
        neither = ~mid[:, None] & ~mid[None, :]
        out = np.full((self.n, self.n), 4, dtype=np.int64)
        out[both] = 2
        out[neither] = 3
        return out

    def as_array(self) -> np.ndarray:
        return self.quarters() / 4.0

    def line_totals(self) -> dict[str, list[Fraction]]:
        """Exact totals per family: rows, cols, D+ and D- (diagonals by k ascending)."""
        q = self.quarters()
        n = self.n
        flipped = q[:, ::-1]
        plus = [Fraction(int(np.trace(flipped, offset=-k)), 4) for k in range(-(n - 1), n)]
        # D+_k: i + j - (n + 1) = k; on the column-flipped array that is offset -k
        minus = [Fraction(int(np.trace(q, offset=-k)), 4) for k in range(-(n - 1), n)]
        return {
            "R": [Fraction(int(v), 4) for v in q.sum(axis=1)],
            "C": [Fraction(int(v), 4) for v in q.sum(axis=0)],
            "D+": plus,
            "D-": minus,
        }


def regularize_weighting(n: int) -> SquareWeighting:
    if n < 1:
        raise BoardError(f"board size must be positive, got {n}")
    return SquareWeighting(n)


# ---------------------------------------------------------------------------
# near-diagonal configuration


def near_diagonal_config(n: int) -> PartialConfig:
    """Queens at (i, 2i) for i <= (n-1)/2 and (i, 2i - n) above; needs n = 1 mod 6."""
    if n % 6 != 1 or n < 7:
        raise BoardError(f"near-diagonal configuration needs n = 1 (mod 6) and n >= 7; n={n} is {n % 6} mod 6")
    half = (n - 1) // 2
    queens = [(i, 2 * i) for i in range(1, half + 1)]
    queens += [(i, 2 * i - n) for i in range(half + 1, n + 1)]
    return PartialConfig(n, queens)


def diagonal_distance_sum(cfg: PartialConfig) -> int:
    """Sum over queens of |i + j - (n + 1)| + |i - j|."""
    n = cfg.n
    return sum(abs(i + j - (n + 1)) + abs(i - j) for i, j in cfg.queens)


# ---------------------------------------------------------------------------
# central-box instance


@dataclass(frozen=True)
class CentralInstance:
    n: int
    m: int
    t: int
    config: PartialConfig
    certificate: LineWeighting

    @property
    def value(self) -> Fraction:
        return weighting_value(self.certificate)

    @property
    def target(self) -> int:
        """n - |Q'|: the value the certificate has to beat."""
        return self.n - len(self.config)


def central_size(n: int) -> int:
    """Largest m <= 0.241 n with m = 1 (mod 6)."""
    m = (CENTRAL_RATIO * n).__floor__()
    while m % 6 != 1:
        m -= 1
    return m


def hat_weighting(n: int, m: int, t: int, cfg: PartialConfig) -> LineWeighting:
    """Line weighting covering the four t x t corners, minus the diagonals through ``cfg``."""
    if n != m + 2 * t or cfg.n != n or t < 1:
        raise BoardError(f"need n = m + 2t with a configuration on the n-board (n={n}, m={m}, t={t})")
    if any(not (t < i <= t + m and t < j <= t + m) for i, j in cfg.queens):
        raise BoardError("configuration must lie inside the central m x m box")
    weights: dict[LineId, Fraction] = {}
    for i in range(1, t + 1):
        w = abs(Fraction(i, t + 1) - HALF)
        for line in (Row(i), Col(i), Row(n + 1 - i), Col(n + 1 - i)):
            weights[line] = w
    for k in range(-(t - 1), t):
        w = 1 - Fraction(abs(k), t + 1)
        weights[DiagPlus(k)] = w
        weights[DiagMinus(k)] = w
    for i, j in cfg.queens:
        weights.pop(DiagPlus(i + j - (n + 1)), None)
        weights.pop(DiagMinus(i - j), None)
    return LineWeighting(n, weights)


def central_embedding(n: int) -> CentralInstance:
    """The near-diagonal m-configuration placed in the centre of an odd n-board."""
    if n % 2 == 0:
        raise BoardError(f"central embedding needs odd n, got n={n}")
    m = central_size(n) if n > 0 else 0
    if m < 7:
        raise BoardError(f"n={n} is too small: the central configuration needs m >= 7")
    t = (n - m) // 2
    config = near_diagonal_config(m).shifted(t, t, n)
    return CentralInstance(n, m, t, config, hat_weighting(n, m, t, config))


def central_instance(n: int) -> CentralInstance:
    """Like :func:`central_embedding`, with even n reduced to n - 1 plus R_n and C_n at weight 1."""
    if n % 2:
        return central_embedding(n)
    inner = central_embedding(n - 1)
    weights: dict[LineId, Fraction] = {}
    for line, w in inner.certificate.weights.items():
        # same squares, but the plus-diagonal offset is measured against n + 1
        if line.kind == DIAG_PLUS:
            line = DiagPlus(line.index - 1)
        weights[line] = w
    weights[Row(n)] = ONE
    weights[Col(n)] = ONE
    config = PartialConfig(n, inner.config.queens)
    return CentralInstance(n, inner.m, inner.t, config, LineWeighting(n, weights))


def closed_form_bound(m: int, t: int) -> Fraction:
    """3t - 2m + 2m^2 / (3t), the leading terms of the certificate value."""
    return 3 * t - 2 * m + Fraction(2 * m * m, 3 * t)


def central_value(n: int) -> Fraction:
    """Certificate value of the odd-n central instance by direct integer summation.

    Independent of :func:`hat_weighting`: everything is scaled by 2(t + 1).
    """
    m = central_size(n)
    t = (n - m) // 2
    i = np.arange(1, t + 1, dtype=np.int64)
    scaled = 4 * int(np.abs(2 * i - (t + 1)).sum())
    k = np.arange(-(t - 1), t, dtype=np.int64)
    scaled += 2 * 2 * int((t + 1 - np.abs(k)).sum())
    a = np.arange(1, (m - 1) // 2 + 1, dtype=np.int64)
    b = np.arange((m + 1) // 2, m + 1, dtype=np.int64)
    qi = np.concatenate([a, b])
    qj = np.concatenate([2 * a, 2 * b - m])
    scaled -= 2 * int((t + 1 - np.abs(qi + qj - (m + 1))).sum())
    scaled -= 2 * int((t + 1 - np.abs(qi - qj)).sum())
    return Fraction(scaled, 2 * (t + 1))


def find_n0(start: int = 29, stop: int = 40_001) -> int | None:
    """Smallest odd n in [start, stop) whose central certificate value is below n - m."""
    n = start | 1
    while n < stop:
        m = central_size(n)
        if m >= 7 and central_value(n) < n - m:
            return n
        n += 2
    return None


# ---------------------------------------------------------------------------
# n/3 construction


def third_construction(n: int) -> PartialConfig:
    """An n/3-queens configuration in the central n/3 x n/3 box."""
    if n % 3 or n < 12:
        raise BoardError(f"third construction needs 3 | n and n >= 12; n={n} is {n % 3} mod 3")
    s = n // 3
    inner = first_solution_lex(s)
    return inner.shifted(s, s, n)
