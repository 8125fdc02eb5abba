"""Randomized completion through rainbow matchings.

A partial configuration becomes a bipartite graph between free rows and free
columns; each unattacked square is an edge coloured by its two diagonals. A
perfect matching whose colour sets are pairwise disjoint is exactly a
completion. The pipeline weights and regularizes the graph, samples a sparse
near-regular subgraph, splits the colours into a main part and reserve parts,
grows a large rainbow matching by random greedy on the conflict hypergraph, and
finishes with short augmenting sequences.
"""

from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from .board import (
    BoardError,
    Col,
    DiagMinus,
    DiagPlus,
    PartialConfig,
    Row,
    Square,
    is_valid_partial,
    unattacked_mask,
)
from .constructions import regularize_weighting

log = logging.getLogger(__name__)

Edge = tuple  # (a, b, colours)


class RainbowViolation(AssertionError):
    """A matching lost vertex- or colour-disjointness."""


class RegularizationError(RuntimeError):
    pass


class HeuristicFailure(RuntimeError):
    """The pipeline gave up; says nothing about whether a completion exists."""


# ---------------------------------------------------------------------------
# graphs and matchings


@dataclass
class ColouredBipartiteGraph:
    part_a: list
    part_b: list
    edges: list  # (a, b, tuple of t colours)
    t: int

    @cached_property
    def _index(self):
        a_pos = {v: i for i, v in enumerate(self.part_a)}
        b_pos = {v: i for i, v in enumerate(self.part_b)}
        colours = sorted({c for _, _, cs in self.edges for c in cs})
        c_pos = {c: i for i, c in enumerate(colours)}
        E = len(self.edges)
        ea = np.fromiter((a_pos[a] for a, _, _ in self.edges), dtype=np.int64, count=E)
        eb = np.fromiter((b_pos[b] for _, b, _ in self.edges), dtype=np.int64, count=E)
        ec = np.array([[c_pos[c] for c in cs] for _, _, cs in self.edges], dtype=np.int64).reshape(E, self.t)
        pair = {(a, b): e for e, (a, b, _) in enumerate(self.edges)}
        if len(pair) != E:
            raise BoardError("parallel edges are not supported")
        return a_pos, b_pos, colours, ea, eb, ec, pair

    @property
    def colours(self) -> list:
        return self._index[2]

    def edge_id(self, a, b) -> int:
        return self._index[6][(a, b)]

    def subgraph(self, edge_ids: Iterable[int]) -> ColouredBipartiteGraph:
        return ColouredBipartiteGraph(
            list(self.part_a), list(self.part_b), [self.edges[e] for e in edge_ids], self.t
        )

    def degrees(self) -> tuple[np.ndarray, np.ndarray]:
        _, _, _, ea, eb, _, _ = self._index
        return (
            np.bincount(ea, minlength=len(self.part_a)),
            np.bincount(eb, minlength=len(self.part_b)),
        )

    def colour_degrees(self) -> np.ndarray:
        ec = self._index[5]
        return np.bincount(ec.ravel(), minlength=len(self.colours))


@dataclass(frozen=True)
class RainbowMatching:
    """Edges that share no vertex and no colour; checked on construction."""

    edges: tuple

    def __post_init__(self):
        check_rainbow(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def colours(self) -> set:
        return {c for _, _, cs in self.edges for c in cs}


def check_rainbow(edges: Iterable[Edge]) -> None:
    seen_v, seen_c = set(), set()
    for a, b, cs in edges:
        for v in (("A", a), ("B", b)):
            if v in seen_v:
                raise RainbowViolation(f"vertex {v[1]} covered twice")
            seen_v.add(v)
        for c in cs:
            if c in seen_c:
                raise RainbowViolation(f"colour {c} used twice")
            seen_c.add(c)


class _MatchState:
    """Mutable matching over edge ids with invariant checks on every change."""

    def __init__(self, g: ColouredBipartiteGraph):
        self.g = g
        _, _, colours, self.ea, self.eb, self.ec, _ = g._index
        self.mate_a = np.full(len(g.part_a), -1, dtype=np.int64)
        self.mate_b = np.full(len(g.part_b), -1, dtype=np.int64)
        self.colour_used = np.zeros(len(colours), dtype=bool)
        self.edges: set[int] = set()
        self.mutations = 0

    def can_add(self, e: int) -> bool:
        return (
            self.mate_a[self.ea[e]] < 0
            and self.mate_b[self.eb[e]] < 0
            and not self.colour_used[self.ec[e]].any()
        )

    def add(self, e: int) -> None:
        if not self.can_add(e):
            raise RainbowViolation(f"adding edge {self.g.edges[e]} breaks the rainbow property")
        self.mate_a[self.ea[e]] = e
        self.mate_b[self.eb[e]] = e
        self.colour_used[self.ec[e]] = True
        self.edges.add(e)
        self.mutations += 1

    def remove(self, e: int) -> None:
        if e not in self.edges:
            raise RainbowViolation("removing an edge that is not in the matching")
        self.mate_a[self.ea[e]] = -1
        self.mate_b[self.eb[e]] = -1
        self.colour_used[self.ec[e]] = False
        self.edges.discard(e)
        self.mutations += 1

    def to_matching(self) -> RainbowMatching:
        return RainbowMatching(tuple(self.g.edges[e] for e in sorted(self.edges)))

    @classmethod
    def from_matching(cls, g: ColouredBipartiteGraph, m: RainbowMatching) -> _MatchState:
        st = cls(g)
        for a, b, _ in m.edges:
            st.add(g.edge_id(a, b))
        return st


# ---------------------------------------------------------------------------
# reduction from the chessboard


def board_to_graph(cfg: PartialConfig) -> ColouredBipartiteGraph:
    """Free rows vs free columns; edges are unattacked squares coloured by their diagonals."""
    n = cfg.n
    used_rows = {q.row for q in cfg.queens}
    used_cols = {q.col for q in cfg.queens}
    part_a = [Row(i) for i in range(1, n + 1) if i not in used_rows]
    part_b = [Col(j) for j in range(1, n + 1) if j not in used_cols]
    ii, jj = np.nonzero(unattacked_mask(cfg))
    edges = [
        (Row(i), Col(j), (DiagPlus(i + j - (n + 1)), DiagMinus(i - j)))
        for i, j in zip((ii + 1).tolist(), (jj + 1).tolist())
    ]
    return ColouredBipartiteGraph(part_a, part_b, edges, 2)


def matching_to_squares(m: RainbowMatching) -> list[Square]:
    return [Square(a.index, b.index) for a, b, _ in m.edges]


def check_proper_linear(g: ColouredBipartiteGraph) -> bool:
    """Proper: colour sets at a vertex are disjoint. Linear: a colour pair lies on at most one edge."""
    at_vertex: dict = {}
    pairs: set = set()
    for a, b, cs in g.edges:
        if len(set(cs)) != g.t:
            return False
        for v in (("A", a), ("B", b)):
            seen = at_vertex.setdefault(v, set())
            if seen.intersection(cs):
                return False
            seen.update(cs)
        ordered = sorted(cs)
        for x in range(len(ordered)):
            for y in range(x + 1, len(ordered)):
                p = (ordered[x], ordered[y])
                if p in pairs:
                    return False
                pairs.add(p)
    return True


# ---------------------------------------------------------------------------
# weights


def board_edge_weights(g: ColouredBipartiteGraph, n: int) -> np.ndarray:
    """The {1/2, 3/4, 1} square weighting restricted to the edges of a board graph."""
    q = regularize_weighting(n).quarters()
    return np.array([q[a.index - 1, b.index - 1] / 4.0 for a, b, _ in g.edges])


def common_neighbour_floor(g: ColouredBipartiteGraph) -> int:
    """Smallest number of common neighbours over pairs of vertices in the same part."""
    _, _, _, ea, eb, _, _ = g._index
    adj = np.zeros((len(g.part_a), len(g.part_b)), dtype=np.int64)
    adj[ea, eb] = 1
    best = None
    for mat in (adj, adj.T):
        if mat.shape[0] < 2:
            continue
        co = mat @ mat.T
        np.fill_diagonal(co, np.iinfo(np.int64).max)
        low = int(co.min())
        best = low if best is None else min(best, low)
    return 0 if best is None else best


@dataclass
class WeightShiftResult:
    weights: list
    d_bar: object
    d_prime: object
    c: int
    iterations: int
    max_drift: object

    @property
    def mu(self):
        """2 d' / c: the guaranteed bound on how far any edge weight moved."""
        return 2 * self.d_prime / self.c if self.c else float("inf")


def weight_shift_regularize(g: ColouredBipartiteGraph, w0: Sequence, common_floor: int | None = None,
                            tol: float = 1e-12) -> WeightShiftResult:
    """Make every vertex total equal to the mean by pairwise shifts through common neighbours.

    Repeatedly takes the vertex furthest above the mean and the vertex furthest
    below it in the same part, and moves ``min(excess, deficit)`` from one to the
    other, spread evenly over their common neighbours. Each shift settles at
    least one vertex and leaves the other part untouched. Works on floats or,
    when ``w0`` holds :class:`~fractions.Fraction` values, exactly.
    """
    na, nb = len(g.part_a), len(g.part_b)
    if na != nb:
        raise RegularizationError(f"parts must have equal size, got {na} and {nb}")
    _, _, _, ea, eb, _, _ = g._index
    exact = any(isinstance(v, Fraction) for v in w0)
    zero = Fraction(0) if exact else 0.0
    W = np.full((na, nb), zero, dtype=object if exact else float)
    mask = np.zeros((na, nb), dtype=bool)
    W[ea, eb] = list(w0) if exact else np.asarray(w0, dtype=float)
    mask[ea, eb] = True
    W0 = W.copy()
    total = sum(w0, zero)
    d_bar = total / na if na else zero
    if common_floor is None:
        common_floor = common_neighbour_floor(g)
    dev_a = W.sum(axis=1) - d_bar
    dev_b = W.sum(axis=0) - d_bar
    devs = [abs(v) for v in list(dev_a) + list(dev_b)]
    d_prime = max(devs, default=zero)
    eps = 0 if exact else tol * max(1.0, float(abs(d_bar)))
    iterations = 0
    for side in (0, 1):
        M = W if side == 0 else W.T
        K = mask if side == 0 else mask.T
        dev = M.sum(axis=1) - d_bar
        part_total = M.sum()
        while True:
            hi = int(np.argmax(dev))
            lo = int(np.argmin(dev))
            if dev[hi] <= eps or -dev[lo] <= eps:
                break
            common = np.flatnonzero(K[hi] & K[lo])
            if common.size == 0 or common.size < common_floor:
                raise RegularizationError(
                    f"vertices {hi} and {lo} have {common.size} common neighbours, need {max(common_floor, 1)}"
                )
            eta = min(dev[hi], -dev[lo])
            step = eta / common.size
            M[hi, common] = M[hi, common] - step
            M[lo, common] = M[lo, common] + step
            dev[hi] -= eta
            dev[lo] += eta
            if exact:
                if M.sum() != part_total:
                    raise RegularizationError("weight shift changed the total part weight")
            elif abs(M.sum() - part_total) > 1e-9 * max(1.0, abs(part_total)):
                raise RegularizationError("weight shift changed the total part weight")
            iterations += 1
    drift = np.abs(W - W0)[mask]
    max_drift = max(drift.tolist(), default=zero)
    return WeightShiftResult(
        W[ea, eb].tolist(), d_bar, d_prime, common_floor, iterations, max_drift
    )


# ---------------------------------------------------------------------------
# random steps


@dataclass
class SparsifyResult:
    graph: ColouredBipartiteGraph
    expected_degree_a: np.ndarray
    expected_degree_b: np.ndarray
    degree_a: np.ndarray
    degree_b: np.ndarray

    @property
    def max_deviation(self) -> float:
        dev = np.concatenate([self.degree_a - self.expected_degree_a, self.degree_b - self.expected_degree_b])
        return float(np.abs(dev).max()) if dev.size else 0.0


def sparsify(g: ColouredBipartiteGraph, w: Sequence[float], mu: float, rng: np.random.Generator) -> SparsifyResult:
    """Keep each edge independently with probability w(e) / (1 + mu)."""
    p = np.asarray(w, dtype=float) / (1.0 + mu)
    if p.size and (p.min() < -1e-12 or p.max() > 1 + 1e-12):
        raise ValueError(f"edge probabilities outside [0, 1]: min {p.min():.6g}, max {p.max():.6g}")
    p = np.clip(p, 0.0, 1.0)
    keep = rng.random(p.size) < p
    sub = g.subgraph(np.flatnonzero(keep).tolist())
    _, _, _, ea, eb, _, _ = g._index
    da, db = sub.degrees()
    return SparsifyResult(
        sub,
        np.bincount(ea, weights=p, minlength=len(g.part_a)),
        np.bincount(eb, weights=p, minlength=len(g.part_b)),
        da,
        db,
    )


@dataclass(frozen=True)
class PipelineParams:
    alpha: float = 0.1
    epsilon: float = 0.01
    t: int = 2
    nibble_restarts: int = 5
    augment_depth: int = 10
    restarts: int = 50
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.alpha <= self.t:
            raise ValueError(f"alpha must lie in (0, t], got {self.alpha}")
        if not 0 < self.epsilon < 1:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.augment_depth < 2 or self.augment_depth % 2:
            raise ValueError("augment_depth must be an even number >= 2")

    @property
    def split_probabilities(self) -> list[float]:
        p0 = 1 - self.alpha / self.t
        return [p0] + [self.alpha / (5 * self.t)] * 5


@dataclass
class SplitResult:
    parts: list
    labels: dict


def colour_split(g: ColouredBipartiteGraph, params: PipelineParams | Sequence[float], rng: np.random.Generator) -> SplitResult:
    """Label every colour independently; part i keeps edges whose colours all got label i."""
    probs = params.split_probabilities if isinstance(params, PipelineParams) else list(params)
    if len(probs) != 6 or abs(sum(probs) - 1) > 1e-12 or min(probs) < 0:
        raise ValueError("need six label probabilities summing to 1")
    colours = g.colours
    labels = rng.choice(6, size=len(colours), p=probs)
    ec = g._index[5]
    edge_labels = labels[ec] if len(g.edges) else np.zeros((0, g.t), dtype=np.int64)
    uniform = (edge_labels == edge_labels[:, :1]).all(axis=1) if len(g.edges) else np.zeros(0, bool)
    parts = []
    for i in range(6):
        ids = np.flatnonzero(uniform & (edge_labels[:, 0] == i) if len(g.edges) else uniform)
        parts.append(g.subgraph(ids.tolist()))
    return SplitResult(parts, {c: int(l) for c, l in zip(colours, labels)})


def conflict_hypergraph(g: ColouredBipartiteGraph) -> list[frozenset]:
    """One hyperedge {a, b} + colours per edge.

    Vertex and colour names must not collide; for a board graph they are all
    distinct lines, so this is the hypergraph of lines through unattacked squares.
    """
    if not check_proper_linear(g):
        raise BoardError("conflict hypergraph needs a proper linear colouring")
    a_set, b_set, c_set = set(g.part_a), set(g.part_b), set(g.colours)
    if a_set & b_set or (a_set | b_set) & c_set:
        raise BoardError("vertex and colour names overlap; rename them first")
    return [frozenset((a, b, *cs)) for a, b, cs in g.edges]


def is_linear_hypergraph(hyperedges: Iterable[frozenset]) -> bool:
    seen = set()
    for f in hyperedges:
        items = sorted(f, key=repr)
        for x in range(len(items)):
            for y in range(x + 1, len(items)):
                p = (items[x], items[y])
                if p in seen:
                    return False
                seen.add(p)
    return True


# ---------------------------------------------------------------------------
# nibble and augmentation


@dataclass
class NibbleResult:
    matching: RainbowMatching
    coverage: float
    restarts: int
    steps: int


def _greedy(g: ColouredBipartiteGraph, rng: np.random.Generator) -> _MatchState:
    st = _MatchState(g)
    if not g.edges:
        return st
    ea, eb, ec = st.ea, st.eb, st.ec
    mate_a, mate_b, used = st.mate_a, st.mate_b, st.colour_used
    # a uniformly random surviving edge at each step is the same as a random order
    for e in rng.permutation(len(g.edges)).tolist():
        if mate_a[ea[e]] < 0 and mate_b[eb[e]] < 0 and not used[ec[e]].any():
            st.add(e)
    return st


def nibble_matching(g: ColouredBipartiteGraph, target_coverage: float, restarts: int,
                    rng: np.random.Generator) -> NibbleResult:
    """Random greedy rainbow matching; best of up to ``restarts`` runs.

    Coverage is the matching size over the smaller part.
    """
    side = min(len(g.part_a), len(g.part_b))
    if side == 0 or not g.edges:
        return NibbleResult(RainbowMatching(()), 0.0, 0, 0)
    best, best_cov, steps = None, -1.0, 0
    for run in range(1, max(1, restarts) + 1):
        st = _greedy(g, rng)
        steps += st.mutations
        cov = len(st.edges) / side
        if cov > best_cov:
            best, best_cov = st, cov
        if cov >= target_coverage:
            break
    return NibbleResult(best.to_matching(), best_cov, run, steps)


def _augment_bfs(g: ColouredBipartiteGraph, st: _MatchState, forbidden: np.ndarray,
                 depth_bound: int, rng: np.random.Generator | None) -> list[int] | None:
    """Shortest-first search for an alternating sequence; returns new edge ids and removed ids."""
    _, _, _, ea, eb, ec, _ = g._index
    adj = _adjacency(g)
    max_new = depth_bound // 2
    starts = np.flatnonzero(st.mate_a < 0)
    if rng is not None:
        starts = rng.permutation(starts)
    edge_ok = ~forbidden[ec].any(axis=1) if len(g.edges) else np.zeros(0, bool)
    for a0 in starts.tolist():
        # node: (a-vertex, parent node id, edge used to reach the b before it, depth in new edges)
        nodes = [(a0, -1, -1, 0)]
        seen_b = set()
        queue = deque([0])
        while queue:
            nid = queue.popleft()
            a, _, _, depth = nodes[nid]
            if depth >= max_new:
                continue
            path_colours = _path_colours(nodes, nid, ec)
            for e in adj[a]:
                if not edge_ok[e]:
                    continue
                b = eb[e]
                if b in seen_b:
                    continue
                cs = ec[e]
                if any(c in path_colours for c in cs.tolist()):
                    continue
                mate = st.mate_b[b]
                if mate < 0:
                    return _collect(nodes, nid, e)
                seen_b.add(b)
                nodes.append((int(ea[mate]), nid, e, depth + 1))
                queue.append(len(nodes) - 1)
    return None


def _path_colours(nodes, nid, ec) -> set:
    out = set()
    while nid > 0:
        _, parent, e, _ = nodes[nid]
        out.update(ec[e].tolist())
        nid = parent
    return out


def _collect(nodes, nid, last_edge) -> list[int]:
    new = [last_edge]
    while nid > 0:
        _, parent, e, _ = nodes[nid]
        new.append(e)
        nid = parent
    return new


def _adjacency(g: ColouredBipartiteGraph) -> list[list[int]]:
    cached = g.__dict__.get("_adj")
    if cached is None:
        ea = g._index[3]
        cached = [[] for _ in g.part_a]
        for e, a in enumerate(ea.tolist()):
            cached[a].append(e)
        g.__dict__["_adj"] = cached
    return cached


def _apply(st: _MatchState, new_edges: list[int]) -> None:
    """Swap out the matching edges at the b-ends of all but the last new edge."""
    removed = [int(st.mate_b[st.eb[e]]) for e in new_edges if st.mate_b[st.eb[e]] >= 0]
    for e in removed:
        st.remove(e)
    for e in new_edges:
        st.add(e)


def augment(g: ColouredBipartiteGraph, m: RainbowMatching, blocked: Iterable[Hashable] = (),
            depth_bound: int = 10, rng: np.random.Generator | None = None) -> RainbowMatching | None:
    """Grow ``m`` by one edge along an augmenting sequence of at most ``depth_bound`` vertices.

    New edges must be pairwise colour-disjoint, avoid every colour of ``m`` and
    every colour in ``blocked``. Returns ``None`` when no such sequence is found.
    """
    st = _MatchState.from_matching(g, m)
    found = _augment_into(g, st, set(blocked), depth_bound, rng)
    if not found:
        return None
    out = st.to_matching()
    if len(out) != len(m) + 1:
        raise RainbowViolation("augmentation did not grow the matching by exactly one edge")
    return out


def _augment_into(g, st: _MatchState, blocked: set, depth_bound: int, rng) -> bool:
    forbidden = st.colour_used.copy()
    if blocked:
        for i, c in enumerate(g.colours):
            if c in blocked:
                forbidden[i] = True
    new = _augment_bfs(g, st, forbidden, depth_bound, rng)
    if new is None:
        return False
    _apply(st, new)
    return True


def augment_staged(parts: Sequence[ColouredBipartiteGraph], m: RainbowMatching, a, b,
                   blocked: Iterable[Hashable] = ()) -> RainbowMatching | None:
    """The fixed five-stage scheme between uncovered ``a`` and ``b``.

    ``parts[1..5]`` supply, in order, the edges a-b1, b-a1, a2-b3, b2-a3 and
    a4-b4; matching edges are b1-a2, a1-b2, b3-a4 and a3-b4. The result is the
    sequence a, b1, a2, b3, a4, b4, a3, b2, a1, b.
    """
    forbidden = set(m.colours()) | set(blocked)
    mate_of_a = {x: (y, cs) for x, y, cs in m.edges}
    mate_of_b = {y: (x, cs) for x, y, cs in m.edges}
    if a in mate_of_a or b in mate_of_b:
        return None

    def free_edges(part):
        return [(x, y, cs) for x, y, cs in part.edges if not forbidden.intersection(cs)]

    g1, g2, g3, g4, g5 = (free_edges(p) for p in parts[1:6])
    b1s = {y: cs for x, y, cs in g1 if x == a and y in mate_of_b}
    a2s = {mate_of_b[y][0]: y for y in b1s}
    b3s: dict = {}
    for x, y, cs in g3:
        if x in a2s and y in mate_of_b:
            b3s.setdefault(y, []).append((x, cs))
    a4s = {mate_of_b[y][0]: y for y in b3s}
    a1s = {x: cs for x, y, cs in g2 if y == b and x in mate_of_a}
    b2s = {mate_of_a[x][0]: x for x in a1s}
    a3s: dict = {}
    for x, y, cs in g4:
        if y in b2s and x in mate_of_a:
            a3s.setdefault(x, []).append((y, cs))
    b4s = {mate_of_a[x][0]: x for x in a3s}
    for a4, b4, cs5 in g5:
        if a4 not in a4s or b4 not in b4s:
            continue
        b3 = a4s[a4]
        a3 = b4s[b4]
        for a2, cs3 in b3s[b3]:
            b1 = a2s[a2]
            for b2, cs4 in a3s[a3]:
                a1 = b2s[b2]
                seq = [a, b1, a2, b3, a4, b4, a3, b2, a1, b]
                if len({("A", v) for v in seq[0::2][:3] + [a3, a1]} | {("B", v) for v in [b1, b3, b4, b2, b]}) != 10:
                    continue
                new = [(a, b1, b1s[b1]), (a2, b3, cs3), (a4, b4, cs5), (a3, b2, cs4), (a1, b, a1s[a1])]
                used = [c for _, _, cs in new for c in cs]
                if len(set(used)) != len(used):
                    continue
                drop = {(b1, a2), (b3, a4), (b4, a3), (b2, a1)}
                kept = [e for e in m.edges if (e[1], e[0]) not in drop]
                return RainbowMatching(tuple(kept + new))
    return None


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class PipelineResult:
    config: PartialConfig | None
    attempts: int
    records: list = field(default_factory=list)

    @property
    def success(self) -> bool:
        return self.config is not None


def _record(records: list, phase: str, **fields) -> None:
    rec = {"phase": phase, **fields}
    records.append(rec)
    log.debug(json.dumps(rec, sort_keys=True, default=str))


def complete_via_pipeline(cfg: PartialConfig, params: PipelineParams = PipelineParams(),
                          rng: np.random.Generator | None = None, raise_on_failure: bool = False) -> PipelineResult:
    """Randomized completion; any returned board has been validated.

    Each attempt reruns the random steps (sparsify, split, greedy, augment).
    A failure after ``params.restarts`` attempts is inconclusive.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    records: list = []
    n = cfg.n
    if cfg.is_complete:
        return PipelineResult(cfg, 0, records)
    g = board_to_graph(cfg)
    da, db = g.degrees()
    _record(records, "reduce", n=n, queens=len(cfg), part=len(g.part_a), edges=len(g.edges),
            min_degree=int(min(da.min(), db.min())))
    if da.min() == 0 or db.min() == 0:
        _record(records, "give_up", reason="a free row or column has no unattacked square")
        return _finish(None, 0, records, raise_on_failure)
    w0 = board_edge_weights(g, n)
    try:
        shift = weight_shift_regularize(g, w0)
    except RegularizationError as exc:
        _record(records, "regularize_failed", reason=str(exc))
        shift = None
    if shift is not None:
        mu = float(shift.mu)
        weights = np.asarray(shift.weights, dtype=float)
        _record(records, "regularize", d_bar=float(shift.d_bar), d_prime=float(shift.d_prime),
                c=shift.c, mu=mu, shifts=shift.iterations, max_drift=float(shift.max_drift))
        if (weights / (1 + mu)).min() < 0:
            _record(records, "regularize_failed", reason="negative edge probability")
            shift = None
    if shift is None:
        mu, weights = 0.0, w0
    for attempt in range(1, params.restarts + 1):
        sp = sparsify(g, weights, mu, rng)
        sub = sp.graph
        split = colour_split(sub, params, rng)
        g0 = split.parts[0]
        nib = nibble_matching(g0, 1.0, params.nibble_restarts, rng)
        _record(records, "nibble", attempt=attempt, sparse_edges=len(sub.edges), g0_edges=len(g0.edges),
                degree_deviation=sp.max_deviation, matched=len(nib.matching), coverage=nib.coverage)
        matching = _finish_matching(g, sub, nib.matching, params, rng, records, attempt)
        if matching is None:
            continue
        squares = matching_to_squares(matching)
        full = list(cfg.queens) + squares
        if len(full) != n or not is_valid_partial(full, n):
            raise RainbowViolation("pipeline produced an invalid board")
        return PipelineResult(PartialConfig(n, full), attempt, records)
    return _finish(None, params.restarts, records, raise_on_failure)


def _finish(config, attempts, records, raise_on_failure):
    if config is None and raise_on_failure:
        raise HeuristicFailure(f"no completion after {attempts} attempts")
    return PipelineResult(config, attempts, records)


def _finish_matching(g, sub, m0: RainbowMatching, params, rng, records, attempt):
    """Augment to a perfect matching: first inside the sparse graph, then in the full one."""
    side = len(g.part_a)
    st = _MatchState(sub)
    for a, b, _ in m0.edges:
        st.add(sub.edge_id(a, b))
    g0_ids = set(st.edges)
    augments = 0
    while len(st.edges) < side:
        if not _augment_into(sub, st, set(), params.augment_depth, rng):
            break
        augments += 1
    reserve = sum(1 for e in st.edges if e not in g0_ids)
    _record(records, "augment_sparse", attempt=attempt, augmentations=augments, matched=len(st.edges),
            reserve_edges=reserve, blocked_colours=params.t * reserve)
    if len(st.edges) == side:
        return st.to_matching()
    full = _MatchState(g)
    for e in st.edges:
        a, b, _ = sub.edges[e]
        full.add(g.edge_id(a, b))
    extra = 0
    while len(full.edges) < side:
        if not _augment_into(g, full, set(), params.augment_depth, rng):
            break
        extra += 1
    _record(records, "augment_full", attempt=attempt, augmentations=extra, matched=len(full.edges))
    if len(full.edges) == side:
        return full.to_matching()
    return None
