"""Completion thresholds at small n.

The exhaustive scan grows every valid partial configuration one queen at a time,
keeping one representative per symmetry class. A configuration is completable
exactly when it sits inside one of the full solutions, so the first size with a
class outside that set gives the threshold. The fractional analogue re-runs the
packing LP on the integrally incompletable classes only, since everything
completable is fractionally completable too.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .board import PartialConfig, canonical_form, random_partial_config, unattacked
from .certificates import has_fractional_completion
from .solver import SolveBudget, Status, complete, iter_solutions

EXHAUSTIVE_CEILING = 9


@dataclass
class ThresholdRow:
    n: int
    mode: str
    solutions: int | None
    qc: int | None
    witness: tuple | None
    qc_fractional: int | None
    fractional_witness: tuple | None
    classes_checked: int = 0
    lp_solves: int = 0
    note: str = ""

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "mode": self.mode,
            "solutions": self.solutions,
            "qc": self.qc,
            "witness": [list(q) for q in self.witness] if self.witness else None,
            "qc_fractional": self.qc_fractional,
            "fractional_witness": [list(q) for q in self.fractional_witness] if self.fractional_witness else None,
            "classes_checked": self.classes_checked,
            "lp_solves": self.lp_solves,
            "note": self.note,
        }


def _extensions(classes: set, n: int) -> set:
    out = set()
    for queens in classes:
        for sq in unattacked(PartialConfig(n, queens)):
            out.add(canonical_form(queens + (tuple(sq),), n))
    return out


def exhaustive_threshold(n: int) -> ThresholdRow:
    """Exact qc(n) and its fractional counterpart by full symmetry-reduced search."""
    if n > EXHAUSTIVE_CEILING:
        raise ValueError(f"exhaustive mode needs n <= {EXHAUSTIVE_CEILING}, got {n}")
    solutions = [tuple(map(tuple, s)) for s in iter_solutions(n)]
    if not solutions:
        return ThresholdRow(n, "exhaustive", 0, None, None, None, None, note="no configuration exists")
    row = ThresholdRow(n, "exhaustive", len(solutions), None, None, None, None)
    classes = {()}
    for k in range(1, n):
        classes = _extensions(classes, n)
        row.classes_checked += len(classes)
        completable = {canonical_form(sub, n) for s in solutions for sub in combinations(s, k)}
        stuck = sorted(classes - completable)
        if stuck and row.qc is None:
            row.qc, row.witness = k - 1, stuck[0]
        for queens in stuck:
            row.lp_solves += 1
            if not has_fractional_completion(PartialConfig(n, queens)):
                row.qc_fractional, row.fractional_witness = k - 1, queens
                return row
    # every partial configuration below size n has a fractional completion
    row.qc_fractional = n - 1
    return row


def sampled_threshold(n: int, samples: int, seed: int, node_limit: int = 200_000) -> ThresholdRow:
    """Upper bound on qc(n) from random configurations; fractional side left open."""
    rng = random.Random(seed)
    budget = SolveBudget(node_limit=node_limit)
    row = ThresholdRow(n, "sampled", None, None, None, None, None,
                       note="qc is an upper bound from sampling")
    for k in range(1, n):
        for _ in range(samples):
            cfg = random_partial_config(n, k, rng)
            row.classes_checked += 1
            if complete(cfg, budget).status is Status.INCOMPLETABLE:
                row.qc, row.witness = k - 1, tuple(map(tuple, cfg.sorted_queens()))
                return row
    return row


def qc_scan(n_max: int, n_min: int = 2, samples: int = 50, seed: int = 0) -> list[ThresholdRow]:
    rows = []
    for n in range(n_min, n_max + 1):
        if n <= EXHAUSTIVE_CEILING:
            rows.append(exhaustive_threshold(n))
        else:
            rows.append(sampled_threshold(n, samples, seed))
    return rows
