"""The ``queens`` command.

Exit codes: 0 success or completable, 2 proven incompletable, 3 inconclusive
(heuristic failure or budget), 1 usage or input error. Structured output is one
JSON record per line, keys sorted, ending with a ``summary`` record.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import certificates as cert
from . import constructions as cons
from .board import BoardError, PartialConfig, is_valid_partial, random_partial_config
from .formats import ParseError, board_to_document, load_board, parse_algebraic, render_board
from .rainbow import PipelineParams, complete_via_pipeline
from .simplex import LPError
from .solver import (
    ENUMERATION_CEILING,
    SolveBudget,
    Status,
    complete,
    count_completions,
    min_embedding,
)
from .thresholds import qc_scan

EXIT_OK, EXIT_USAGE, EXIT_INCOMPLETABLE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
AUTO_PIPELINE_ABOVE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which here means "incompletable"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class Output:
    def __init__(self, fmt: str, stream=None):
        self.structured = fmt == "structured"
        self.stream = stream or sys.stdout

    def record(self, kind: str, human: str | None = None, /, **fields) -> None:
        if self.structured:
            doc = {**fields, "record": kind}
            self.stream.write(json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str) + "\n")
        elif human is not None:
            self.stream.write(human + "\n")

    def board(self, cfg: PartialConfig, label: str = "board") -> None:
        if not is_valid_partial(cfg.queens, cfg.n):
            raise AssertionError("refusing to print an invalid board")
        self.record(label, f"{label} (n={cfg.n}, {len(cfg)} queens):\n{render_board(cfg)}", **board_to_document(cfg))

    def summary(self, code: int, human: str, /, **fields) -> int:
        self.record("summary", human, exit=code, **fields)
        return code


def _threads() -> int:
    raw = os.environ.get("QUEENS_THREADS", "")
    try:
        return max(1, int(raw)) if raw else max(1, min(8, os.cpu_count() or 1))
    except ValueError:
        raise UsageError(f"QUEENS_THREADS must be an integer, got {raw!r}") from None


def _read_board(args) -> PartialConfig:
    if args.file:
        try:
            text = Path(args.file).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
        cfg = load_board(text)
        if args.n is not None and args.n != cfg.n:
            raise UsageError(f"--n {args.n} disagrees with the board file (n={cfg.n})")
        return cfg
    if args.n is None:
        raise UsageError("give --n (optionally with --board) or --file")
    if args.board:
        return parse_algebraic(args.board, args.n)
    return PartialConfig(args.n)


def _int_list(text: str) -> list[int]:
    """'64,128' or '4..12' (inclusive)."""
    out: list[int] = []
    try:
        for part in text.split(","):
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            elif part.strip():
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None
    if not out:
        raise UsageError("empty integer list")
    return out


def _params(args) -> PipelineParams:
    try:
        return PipelineParams(alpha=args.alpha, epsilon=args.epsilon, restarts=args.restarts, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _budget(args) -> SolveBudget:
    return SolveBudget(node_limit=args.budget_nodes or 0, solution_cap=getattr(args, "cap", None) or 0)


def _fraction(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_complete(args, out: Output) -> int:
    cfg = _read_board(args)
    strategy = args.strategy
    if strategy == "auto":
        strategy = "pipeline" if cfg.n > AUTO_PIPELINE_ABOVE else "exact"
    if strategy == "pipeline":
        res = complete_via_pipeline(cfg, _params(args), np.random.default_rng(args.seed))
        for rec in res.records:
            out.record("diagnostic", None, **rec)
        if res.success:
            out.board(res.config, "completion")
            return out.summary(EXIT_OK, "completed (pipeline)", status="completed", strategy="pipeline",
                               attempts=res.attempts)
        if args.strategy != "auto":
            return out.summary(EXIT_INCONCLUSIVE, "heuristic failure (inconclusive)", status="inconclusive",
                               strategy="pipeline", attempts=res.attempts)
    res = complete(cfg, _budget(args))
    if res.status is Status.COMPLETED:
        out.board(res.config, "completion")
        return out.summary(EXIT_OK, "completed (exact)", status="completed", strategy="exact", nodes=res.nodes)
    if res.status is Status.INCOMPLETABLE:
        return out.summary(EXIT_INCOMPLETABLE, "incompletable (exhaustive)", status="incompletable",
                           strategy="exact", nodes=res.nodes)
    return out.summary(EXIT_INCONCLUSIVE, "node budget exhausted (inconclusive)", status="inconclusive",
                       strategy="exact", nodes=res.nodes)


def cmd_count(args, out: Output) -> int:
    cfg = _read_board(args)
    if cfg.n > ENUMERATION_CEILING and not args.cap:
        raise UsageError(f"n={cfg.n} is above the enumeration ceiling {ENUMERATION_CEILING}; pass --cap")
    res = count_completions(cfg, _budget(args))
    note = " (lower bound: budget or cap reached)" if res.exhausted else ""
    return out.summary(EXIT_OK, f"{res.count} completions{note}", count=res.count, exhausted=res.exhausted,
                       nodes=res.nodes)


def _verify(args, out: Output) -> int:
    try:
        text = Path(args.verify).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {args.verify}: {exc.strerror}") from None
    cfg, w, claimed = cert.load_certificate(text)
    verdict = cert.verify_certificate(cfg, w, claimed)
    fields = {"passed": verdict.passed, "reason": verdict.reason}
    if verdict.witness is not None:
        fields["witness"] = list(verdict.witness)
    label = "PASS" if verdict.passed else "FAIL"
    # PASS proves incompletability; FAIL proves nothing
    code = EXIT_INCOMPLETABLE if verdict.passed else EXIT_INCONCLUSIVE
    return out.summary(code, f"{label}: {verdict.reason}", **fields)


def cmd_certify(args, out: Output) -> int:
    if args.verify:
        return _verify(args, out)
    cfg = _read_board(args)
    try:
        lp = cert.min_cover_value(cfg)
    except LPError as exc:
        return out.summary(EXIT_INCONCLUSIVE, f"LP failure: {exc}", status="lp_failure", reason=str(exc))
    need = cfg.n - len(cfg)
    if lp.optimal_value < need:
        verdict = cert.verify_certificate(cfg, lp.dual, lp.optimal_value)
        if not verdict.passed:
            raise AssertionError(f"generated certificate failed verification: {verdict.reason}")
        out.record("certificate", cert.dump_certificate(cfg, lp.dual), **cert.certificate_document(cfg, lp.dual))
        return out.summary(EXIT_INCOMPLETABLE, f"certificate: value {lp.optimal_value} < {need}",
                           status="certified", value=_fraction(lp.optimal_value), target=need)
    res = complete(cfg, _budget(args))
    base = dict(value=_fraction(lp.optimal_value), target=need, nodes=res.nodes)
    if res.status is Status.INCOMPLETABLE:
        return out.summary(EXIT_INCOMPLETABLE,
                           "no LP certificate; integral incompletability confirmed by exhaustive search",
                           status="no_certificate_incompletable", **base)
    if res.status is Status.COMPLETED:
        out.board(res.config, "completion")
        return out.summary(EXIT_OK, "no certificate exists: the board is completable",
                           status="no_certificate_completable", **base)
    return out.summary(EXIT_INCONCLUSIVE, "no LP certificate; exhaustive search ran out of budget",
                       status="no_certificate_inconclusive", **base)


def cmd_construct(args, out: Output) -> int:
    if args.n is None:
        raise UsageError("construct needs --n")
    n = args.n
    if args.kind == "third":
        out.board(cons.third_construction(n))
        return out.summary(EXIT_OK, "third construction", kind="third", n=n)
    if args.kind == "near-diagonal":
        cfg = cons.near_diagonal_config(n)
        out.board(cfg)
        dist = cons.diagonal_distance_sum(cfg)
        return out.summary(EXIT_OK, f"distance sum {dist}", kind="near-diagonal", n=n, distance_sum=dist)
    if args.kind == "central":
        inst = cons.central_instance(n)
        out.board(inst.config)
        verdict = cert.verify_certificate(inst.config, inst.certificate, inst.value)
        out.record("certificate", None, **cert.certificate_document(inst.config, inst.certificate))
        fields = dict(kind="central", n=n, m=inst.m, t=inst.t, value=_fraction(inst.value), target=inst.target,
                      verified=verdict.passed, reason=verdict.reason)
        human = f"central m={inst.m} t={inst.t} value={float(inst.value):.4f} target={inst.target}: " + (
            "PASS " if verdict.passed else "FAIL ") + verdict.reason
        return out.summary(EXIT_INCOMPLETABLE if verdict.passed else EXIT_INCONCLUSIVE, human, **fields)
    sw = cons.regularize_weighting(n)
    totals = sw.line_totals()
    fields = {k.replace("+", "plus").replace("-", "minus"): [_fraction(v) for v in vs] for k, vs in totals.items()}
    if args.figures:
        from . import plotting

        path = plotting.weighting_grid(sw.as_array(), Path(args.figures) / f"weighting_n{n}.png")
        out.record("figure", f"figure: {path}", path=str(path))
    rmax = max(totals["R"] + totals["C"])
    dmax = max(totals["D+"] + totals["D-"])
    return out.summary(EXIT_OK, f"row/col totals up to {rmax}, diagonal totals up to {dmax}",
                       kind="regularize", n=n, **fields)


def cmd_qc_scan(args, out: Output) -> int:
    n_max = args.n if args.n is not None else 8
    rows = [r.as_record() for r in qc_scan(n_max, n_min=args.n_min, samples=args.samples, seed=args.seed)]
    for r in rows:
        if r["qc"] is None and r["solutions"] == 0:
            human = f"n={r['n']}: no configuration exists"
        else:
            human = (f"n={r['n']}: qc={r['qc']} witness={r['witness']} "
                     f"fractional={r['qc_fractional']} ({r['mode']})")
        out.record("threshold", human, **r)
    if args.figures:
        from . import plotting

        path = plotting.thresholds(rows, Path(args.figures) / "qc_scan.png")
        out.record("figure", f"figure: {path}", path=str(path))
    bad = [r["n"] for r in rows if r["qc"] is not None and r["qc_fractional"] is not None
           and r["qc"] > r["qc_fractional"]]
    return out.summary(EXIT_OK if not bad else EXIT_INCONCLUSIVE,
                       "qc <= fractional threshold everywhere" if not bad else f"ordering violated at {bad}",
                       violations=bad)


def cmd_probe(args, out: Output) -> int:
    if args.n is None or args.k is None:
        raise UsageError("probe needs --n and --k")
    rep = cert.qc_star_probe(args.n, args.k, args.trials, args.seed, args.budget_nodes or 200_000)
    rec = rep.as_record()
    human = (f"n={rep.n} k={rep.k}: completable {rep.completable_fraction:.3f}, "
             f"fractionally completable {rep.fractional_fraction:.3f}, inconclusive {rep.inconclusive}")
    return out.summary(EXIT_OK, human, **rec)


def cmd_embed(args, out: Output) -> int:
    cfg = _read_board(args)
    ceiling = args.n_ceiling or cfg.n + 8
    emb = min_embedding(cfg, ceiling, _budget(args))
    if emb is None:
        return out.summary(EXIT_INCONCLUSIVE, f"no completable embedding up to n={ceiling}", found=False,
                           n_ceiling=ceiling)
    out.board(emb.completion, "completion")
    return out.summary(EXIT_OK, f"embeds at n*={emb.n_star}, offset {emb.offset}", found=True,
                       n_star=emb.n_star, offset=list(emb.offset))


def _pipeline_trial(n: int, seed: int, params: PipelineParams) -> dict:
    cfg = random_partial_config(n, n // 60, random.Random(seed))
    t0 = time.perf_counter()
    res = complete_via_pipeline(cfg, params, np.random.default_rng(seed))
    valid = res.success and is_valid_partial(res.config.queens, n) and set(cfg.queens) <= set(res.config.queens)
    return {"n": n, "seed": seed, "queens": len(cfg), "success": bool(valid), "attempts": res.attempts,
            "seconds": time.perf_counter() - t0}


def _lp_trial(n: int, seed: int) -> dict:
    rng = random.Random(seed)
    cfg = random_partial_config(n, rng.randint(0, max(0, n // 2)), rng)
    pk = cert.max_fractional_completion(cfg).optimal_value
    cv = cert.min_cover_value(cfg).optimal_value
    return {"n": n, "seed": seed, "queens": len(cfg), "packing": _fraction(pk), "cover": _fraction(cv),
            "gap": _fraction(cv - pk)}


def cmd_bench(args, out: Output) -> int:
    ns = _int_list(args.n) if args.n else ([64, 128, 256] if args.suite == "pipeline" else list(range(4, 13)))
    seeds = list(range(args.seeds))
    jobs = [(n, s) for n in ns for s in seeds]
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        if args.suite == "pipeline":
            params = _params(args)
            results = list(pool.map(lambda job: _pipeline_trial(job[0], job[1], params), jobs))
        else:
            results = list(pool.map(lambda job: _lp_trial(*job), jobs))
    elapsed = time.perf_counter() - t0
    results.sort(key=lambda r: (r["n"], r["seed"]))
    for r in results:
        if not args.timings:
            r.pop("seconds", None)
        out.record("trial", None, **r)
    table = []
    for n in ns:
        rs = [r for r in results if r["n"] == n]
        if args.suite == "pipeline":
            rate = sum(r["success"] for r in rs) / len(rs) if rs else 0.0
            row = {"n": n, "trials": len(rs), "success_rate": rate, "passed": rate >= 0.9}
            human = f"n={n}: success {rate:.0%} over {len(rs)} trials"
        else:
            gaps = [Fraction(r["gap"]) for r in rs]
            worst = max(gaps, default=Fraction(0))
            row = {"n": n, "trials": len(rs), "max_gap": _fraction(worst), "passed": worst == 0,
                   "packing": float(Fraction(rs[0]["packing"])) if rs else 0.0,
                   "cover": float(Fraction(rs[0]["cover"])) if rs else 0.0}
            human = f"n={n}: max duality gap {worst} over {len(rs)} instances"
        out.record("row", human, **row)
        table.append(row)
    if args.figures:
        from . import plotting

        draw = plotting.success_rates if args.suite == "pipeline" else plotting.duality_gaps
        path = draw(table, Path(args.figures) / f"bench_{args.suite}.png")
        out.record("figure", f"figure: {path}", path=str(path))
    passed = all(r["passed"] for r in table)
    extra = {"seconds": round(elapsed, 3)} if args.timings else {}
    return out.summary(EXIT_OK if passed else EXIT_INCONCLUSIVE,
                       f"{args.suite}: {'PASS' if passed else 'FAIL'} in {elapsed:.1f}s", suite=args.suite,
                       passed=passed, **extra)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    def shared(with_n: bool = True) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        if with_n:
            common.add_argument("--n", type=int, help="board size")
        common.add_argument("--board", help='queens in algebraic notation, e.g. "b4,d5"')
        common.add_argument("--file", help="board document (JSON)")
        common.add_argument("--seed", type=int, default=0)
        common.add_argument("--format", choices=["human", "structured"], default="human")
        common.add_argument("--budget-nodes", type=int, default=0, help="search node limit (0 = none)")
        common.add_argument("--figures", help="directory for figure files")
        return common

    common = shared()
    pipeline = argparse.ArgumentParser(add_help=False)
    pipeline.add_argument("--alpha", type=float, default=0.1)
    pipeline.add_argument("--epsilon", type=float, default=0.01)
    pipeline.add_argument("--restarts", type=int, default=50)

    parser = _Parser(prog="queens", description="n-queens completion toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("complete", parents=[common, pipeline], help="complete a board or prove it impossible")
    p.add_argument("--strategy", choices=["exact", "pipeline", "auto"], default="auto")
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("count", parents=[common], help="count completions")
    p.add_argument("--cap", type=int, default=0, help="stop after this many completions")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("certify", parents=[common], help="LP certificate of incompletability, or verify one")
    p.add_argument("--verify", metavar="CERT", help="certificate document to check")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("construct", parents=[common], help="named constructions")
    p.add_argument("kind", choices=["central", "third", "near-diagonal", "regularize"])
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("qc-scan", parents=[common], help="completion thresholds; --n is the largest size")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--samples", type=int, default=50, help="samples per size above the exhaustive ceiling")
    p.set_defaults(func=cmd_qc_scan)

    p = sub.add_parser("probe", parents=[common], help="sample random size-k configurations")
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("embed", parents=[common], help="smallest completable board containing the input")
    p.add_argument("--n-ceiling", type=int, default=0)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("bench", parents=[shared(with_n=False), pipeline], help="acceptance benchmarks")
    p.add_argument("suite", choices=["pipeline", "lp"])
    p.add_argument("--n", dest="n", type=str, help="sizes, e.g. 64,128,256 or 4..12")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--timings", action="store_true", help="include wall-clock times (not byte-deterministic)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.format)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"queens: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, BoardError, LPError) as exc:
        print(f"queens: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
