"""Line weightings, fractional completions and non-completability certificates.

A line weighting that covers every unattacked square and has value below
``n - |cfg|`` proves that ``cfg`` cannot be completed: a completion would put
``n - |cfg|`` queens on covered squares, no two sharing a line. The two LPs here
(maximum fractional completion and minimum cover) are dual to each other, and
both answers are re-verified in exact rational arithmetic before being returned.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from . import simplex
from .board import (
    DIAG_MINUS,
    DIAG_PLUS,
    LINE_KINDS,
    BoardError,
    LineId,
    PartialConfig,
    Square,
    check_line,
    check_square,
    line_index,
    lines_through,
    random_partial_config,
    unattacked,
    unattacked_mask,
)

LP_CEILING = 64


@dataclass(frozen=True)
class LineWeighting:
    n: int
    weights: Mapping[LineId, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for line, w in self.weights.items():
            check_line(line, self.n)
            w = Fraction(w)
            if not 0 <= w <= 1:
                raise BoardError(f"weight {w} on {line} outside [0, 1]")
            if w:
                clean[LineId(*line)] = w
        object.__setattr__(self, "weights", clean)

    def __getitem__(self, line: LineId) -> Fraction:
        return self.weights.get(line, Fraction(0))

    def items_sorted(self) -> list[tuple[LineId, Fraction]]:
        return sorted(self.weights.items(), key=lambda kv: kv[0].sort_key())


@dataclass(frozen=True)
class FractionalCompletion:
    n: int
    mass: Mapping[Square, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.mass.values(), Fraction(0))

    def line_loads(self) -> dict[LineId, Fraction]:
        loads: dict[LineId, Fraction] = {}
        for sq, x in self.mass.items():
            for line in lines_through(sq, self.n):
                loads[line] = loads.get(line, Fraction(0)) + x
        return loads

    def is_feasible(self, support: Iterable[Square] | None = None) -> bool:
        if any(x < 0 for x in self.mass.values()):
            return False
        if support is not None:
            allowed = set(support)
            if any(x and sq not in allowed for sq, x in self.mass.items()):
                return False
        return all(v <= 1 for v in self.line_loads().values())


@dataclass(frozen=True)
class LpOutcome:
    optimal_value: Fraction
    primal: FractionalCompletion
    dual: LineWeighting
    iterations: int = 0


class CoverCheck(NamedTuple):
    ok: bool
    witness: Square | None


def weighting_value(w: LineWeighting) -> Fraction:
    return sum(w.weights.values(), Fraction(0))


def _integer_tables(w: LineWeighting):
    """Per-family numerator arrays over a common denominator, indexed like the board."""
    n = w.n
    den = 1
    for v in w.weights.values():
        den = den * v.denominator // math.gcd(den, v.denominator)
    big = max((v.numerator * (den // v.denominator) for v in w.weights.values()), default=0)
    dtype = np.int64 if 4 * max(big, den) < 2**62 else object
    tables = {
        "R": np.zeros(n + 1, dtype=dtype),
        "C": np.zeros(n + 1, dtype=dtype),
        DIAG_PLUS: np.zeros(2 * n - 1, dtype=dtype),
        DIAG_MINUS: np.zeros(2 * n - 1, dtype=dtype),
    }
    for (kind, k), v in w.weights.items():
        pos = k if kind in ("R", "C") else k + n - 1
        tables[kind][pos] = v.numerator * (den // v.denominator)
    return tables, den


def _cover_sums(tables, n: int, ii: np.ndarray, jj: np.ndarray):
    return (
        tables["R"][ii]
        + tables["C"][jj]
        + tables[DIAG_PLUS][ii + jj - 2]
        + tables[DIAG_MINUS][ii - jj + n - 1]
    )


def covers(w: LineWeighting, squares: Iterable[tuple[int, int]]) -> CoverCheck:
    """Whether every square has incident line weight at least 1 (exact).

    The witness is the smallest uncovered square in (row, col) order.
    """
    sqs = sorted(check_square(s, w.n) for s in squares)
    if not sqs:
        return CoverCheck(True, None)
    tables, den = _integer_tables(w)
    arr = np.array(sqs, dtype=np.int64)
    sums = _cover_sums(tables, w.n, arr[:, 0], arr[:, 1])
    bad = np.flatnonzero(sums < den)
    if bad.size:
        return CoverCheck(False, sqs[int(bad[0])])
    return CoverCheck(True, None)


def covers_unattacked(w: LineWeighting, cfg: PartialConfig, band: int = 512) -> CoverCheck:
    """:func:`covers` on the unattacked set of ``cfg``, streamed in row bands."""
    if w.n != cfg.n:
        raise BoardError(f"weighting is for n={w.n}, configuration for n={cfg.n}")
    n = cfg.n
    tables, den = _integer_tables(w)
    for start in range(0, n, band):
        mask = unattacked_mask(cfg, slice(start, min(n, start + band)))
        a, b = np.nonzero(mask)
        if a.size == 0:
            continue
        ii, jj = a + start + 1, b + 1
        sums = _cover_sums(tables, n, ii, jj)
        bad = np.flatnonzero(sums < den)
        if bad.size:
            k = int(bad[0])
            return CoverCheck(False, Square(int(ii[k]), int(jj[k])))
    return CoverCheck(True, None)


def certify_incompletable(cfg: PartialConfig, w: LineWeighting) -> bool:
    """True only if ``w`` is a valid proof that ``cfg`` has no completion."""
    if w.n != cfg.n:
        raise BoardError(f"weighting is for n={w.n}, configuration for n={cfg.n}")
    if weighting_value(w) >= cfg.n - len(cfg):
        return False
    return covers_unattacked(w, cfg).ok


# ---------------------------------------------------------------------------
# the two linear programs


def _lp_instance(cfg: PartialConfig):
    n = cfg.n
    if n > LP_CEILING:
        raise BoardError(f"LP size ceiling is n <= {LP_CEILING}, got n={n}")
    free = sorted(unattacked(cfg))
    used = sorted({ln for sq in free for ln in lines_through(sq, n)}, key=lambda ln: line_index(ln, n))
    pos = {ln: r for r, ln in enumerate(used)}
    A = np.zeros((len(used), len(free)))
    for col, sq in enumerate(free):
        for ln in lines_through(sq, n):
            A[pos[ln], col] = 1.0
    return free, used, A


def _verify_pair(cfg, free, used, x, y) -> bool:
    """Exact check: x is a packing on ``free``, y covers ``free``, and totals agree."""
    n = cfg.n
    if any(v < 0 for v in x) or any(v < 0 for v in y):
        return False
    loads: dict[LineId, Fraction] = {}
    for sq, v in zip(free, x):
        for ln in lines_through(sq, n):
            loads[ln] = loads.get(ln, 0) + v
    if any(v > 1 for v in loads.values()):
        return False
    yw = dict(zip(used, y))
    for sq in free:
        if sum(yw.get(ln, 0) for ln in lines_through(sq, n)) < 1:
            return False
    return sum(x) == sum(y)


def _exact_from_basis(A: np.ndarray, b: np.ndarray, c: np.ndarray, basis: list[int]):
    """Primal and dual values of a basis, solved over the rationals.

    Only the basic structural variables and the rows with nonbasic slack are
    coupled; basic slacks have zero dual and absorb the remaining rows.
    """
    m, nv = A.shape
    structural = [v for v in basis if v < nv]
    basic_slack = {v - nv for v in basis if v >= nv}
    tight = [i for i in range(m) if i not in basic_slack]
    k = len(structural)
    sub = A[np.ix_(tight, structural)]
    rows = [{j: Fraction(int(sub[r, j])) for j in np.flatnonzero(sub[r])} for r in range(k)]
    xs = simplex.solve_exact(rows, [Fraction(int(b[i])) for i in tight], k)
    cols = [{r: Fraction(int(sub[r, j])) for r in np.flatnonzero(sub[:, j])} for j in range(k)]
    ys = simplex.solve_exact(cols, [Fraction(int(c[v])) for v in structural], k)
    x = [Fraction(0)] * nv
    for var, v in zip(structural, xs):
        x[var] = v
    y = [Fraction(0)] * m
    for i, v in zip(tight, ys):
        y[i] = v
    return x, y


def _exact_pair(cfg, free, used, res, A, b, c, packing_side: bool):
    """Rationalize a float optimum into (packing, cover) and check it exactly."""
    primal = simplex.reconstruct(res.x)
    dual = simplex.reconstruct(res.duals)
    pair = (primal, dual) if packing_side else (dual, primal)
    if _verify_pair(cfg, free, used, *pair):
        return pair
    primal, dual = _exact_from_basis(A, b, c, res.basis)
    pair = (primal, dual) if packing_side else (dual, primal)
    if _verify_pair(cfg, free, used, *pair):
        return pair
    raise simplex.LPError("could not confirm LP optimum in exact arithmetic")


def _outcome(cfg, free, used, packing, cover, iterations) -> LpOutcome:
    mass = {sq: v for sq, v in zip(free, packing) if v}
    weights = {ln: min(v, Fraction(1)) for ln, v in zip(used, cover) if v}
    w = LineWeighting(cfg.n, weights)
    value = sum(packing, Fraction(0))
    # clipping keeps the cover, so weak duality pins its value to the packing total
    if weighting_value(w) != value:
        raise simplex.LPError("cover value changed after clipping to [0, 1]")
    return LpOutcome(value, FractionalCompletion(cfg.n, mass), w, iterations)


def max_fractional_completion(cfg: PartialConfig) -> LpOutcome:
    """Maximum total mass on unattacked squares with every line load at most 1."""
    free, used, A = _lp_instance(cfg)
    if not free:
        return LpOutcome(Fraction(0), FractionalCompletion(cfg.n, {}), LineWeighting(cfg.n), 0)
    b = np.ones(len(used))
    c = np.ones(len(free))
    res = simplex.solve(c, A, b)
    if res.status is not simplex.LPStatus.OPTIMAL:
        raise simplex.LPError(f"packing LP ended with status {res.status.value}")
    packing, cover = _exact_pair(cfg, free, used, res, A, b, c, packing_side=True)
    return _outcome(cfg, free, used, packing, cover, res.iterations)


def min_cover_value(cfg: PartialConfig) -> LpOutcome:
    """Minimum-value line weighting covering the unattacked squares.

    Solved directly as ``max -sum(w)`` over the cover constraints; its optimal
    dual multipliers give a fractional completion of the same value.
    """
    free, used, A = _lp_instance(cfg)
    if not free:
        return LpOutcome(Fraction(0), FractionalCompletion(cfg.n, {}), LineWeighting(cfg.n), 0)
    At = -A.T
    b = -np.ones(len(free))
    c = -np.ones(len(used))
    res = simplex.solve(c, At, b)
    if res.status is not simplex.LPStatus.OPTIMAL:
        raise simplex.LPError(f"cover LP ended with status {res.status.value}")
    packing, cover = _exact_pair(cfg, free, used, res, At, b, c, packing_side=False)
    return _outcome(cfg, free, used, packing, cover, res.iterations)


def has_fractional_completion(cfg: PartialConfig) -> bool:
    return max_fractional_completion(cfg).optimal_value >= cfg.n - len(cfg)


# ---------------------------------------------------------------------------
# threshold probe


@dataclass
class ProbeReport:
    n: int
    k: int
    trials: int
    integral: int = 0
    fractional: int = 0
    inconclusive: int = 0
    counterexamples: list[PartialConfig] = field(default_factory=list)

    @property
    def completable_fraction(self) -> float:
        return self.integral / self.trials if self.trials else 0.0

    @property
    def fractional_fraction(self) -> float:
        return self.fractional / self.trials if self.trials else 0.0

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "trials": self.trials,
            "completable_fraction": self.completable_fraction,
            "fractional_completable_fraction": self.fractional_fraction,
            "inconclusive": self.inconclusive,
            "counterexamples": len(self.counterexamples),
        }


def qc_star_probe(n: int, size_k: int, trials: int, rng_seed: int, node_limit: int = 200_000) -> ProbeReport:
    """Sample random size-k configurations; count integral and fractional completions.

    Any sample that completes integrally but not fractionally would contradict
    the LP relaxation and is recorded in ``counterexamples``.
    """
    from .solver import SolveBudget, Status, complete

    if n > LP_CEILING:
        raise BoardError(f"LP size ceiling is n <= {LP_CEILING}, got n={n}")
    if size_k > n:
        return ProbeReport(n, size_k, 0)
    rng = random.Random(rng_seed)
    report = ProbeReport(n, size_k, trials)
    budget = SolveBudget(node_limit=node_limit)
    for _ in range(trials):
        cfg = random_partial_config(n, size_k, rng)
        res = complete(cfg, budget)
        frac = has_fractional_completion(cfg)
        report.fractional += frac
        if res.status is Status.COMPLETED:
            report.integral += 1
            if not frac:
                report.counterexamples.append(cfg)
        elif res.status is Status.BUDGET_EXHAUSTED:
            report.inconclusive += 1
    return report


# ---------------------------------------------------------------------------
# certificate documents


def certificate_document(cfg: PartialConfig, w: LineWeighting) -> dict:
    v = weighting_value(w)
    return {
        "n": cfg.n,
        "config": [[q.row, q.col] for q in cfg.sorted_queens()],
        "weights": [[ln.kind, ln.index, str(x.numerator), str(x.denominator)] for ln, x in w.items_sorted()],
        "value": f"{v.numerator}/{v.denominator}",
    }


def dump_certificate(cfg: PartialConfig, w: LineWeighting) -> str:
    return json.dumps(certificate_document(cfg, w), indent=None, sort_keys=True)


def certificate_from_document(doc: dict) -> tuple[PartialConfig, LineWeighting, Fraction]:
    from .formats import ParseError

    try:
        n = doc["n"]
        cfg = PartialConfig(n, [tuple(q) for q in doc["config"]])
        weights = {}
        for entry in doc["weights"]:
            kind, idx, num, den = entry
            if kind not in LINE_KINDS:
                raise ParseError(f"unknown line tag {kind!r}")
            weights[LineId(kind, int(idx))] = Fraction(int(num), int(den))
        value = Fraction(doc["value"])
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed certificate: {exc}") from None
    return cfg, LineWeighting(n, weights), value


def load_certificate(text: str):
    from .formats import ParseError

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return certificate_from_document(doc)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    reason: str
    witness: Square | None = None


def verify_certificate(cfg: PartialConfig, w: LineWeighting, claimed_value: Fraction | None = None) -> Verdict:
    """Exact re-check of a certificate, reporting the first failure."""
    value = weighting_value(w)
    if claimed_value is not None and claimed_value != value:
        return Verdict(False, f"stated value {claimed_value} differs from the weight sum {value}")
    need = cfg.n - len(cfg)
    if value >= need:
        return Verdict(False, f"value {value} is not below n - |Q'| = {need}")
    check = covers_unattacked(w, cfg)
    if not check.ok:
        return Verdict(False, f"square {check.witness} is unattacked but not covered", check.witness)
    return Verdict(True, f"covers all unattacked squares with value {value} < {need}")
