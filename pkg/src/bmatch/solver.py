"""Exact solver for bounded-degree bipartite assignment.

The engine is a successive-shortest-path primal-dual method working on the
original vertices plus one extra *pool* node that accounts for optional
capacity (everything a vertex may take beyond what it must take).  Each
unmet demand unit is routed along a cheapest augmenting path in the
residual graph under node potentials, so every intermediate matching is a
cheapest matching for the demand units already placed, and the final one
is a global optimum certified by its dual values.

Node potentials: ``p[i]`` (rows), ``q[j]`` (columns), ``mu`` (pool), with
reduced pair cost ``c[i][j] - p[i] - q[j]``.  Invariants kept after every
update: unmatched pairs have reduced cost >= 0, matched pairs <= 0, and
every available pool arc has non-negative reduced cost.  Exposed labels
(``SolverState.labels``) are the weight-space view of the same duals:
``l_a[i] = offset - p[i]``, ``l_b[j] = -q[j]``, identical on the demand
and surplus copy of a vertex, and initialized at the row maximum of the
transformed weights / zero.

Two phases, mirroring the two vertex sides:

* Phase 1 roots at every row whose demand is unmet (index order) and
  routes one unit per search toward a column that still needs partners
  or — when total row demand exceeds total column demand — into spare
  column capacity ("parking").
* Phase 2 roots at every column whose demand is still unmet and searches
  backward to the pool, entering through spare row capacity.

Paths may pass through the pool (park one unit, feed another), so a
single augmentation can add more than one pair; this is required for
optimality, not an optimization.  After the phases a zero-cost cleanup
drops pairs that no demand on either side needs (any such pair must cost
0 at an optimum, which is asserted); this keeps the result free of
surplus-surplus matches so it projects cleanly onto vertex copies.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .expansion import CopyRef, ExpandedGraph, build_expanded_graph, project_matching
from .model import Assignment, Instance, normalize_instance, validate_instance

__all__ = [
    "INF",
    "InfeasibleInstanceError",
    "InternalSolverError",
    "CapacitatedMatching",
    "AlternatingForest",
    "AugmentingPath",
    "SolveReport",
    "SolverState",
    "is_free",
    "grow_forest",
    "augment",
    "solve_ga",
    "solve_lca",
]

INF = 2**62

_HARD_PREFIXES = ("shape:", "type:")


class InfeasibleInstanceError(ValueError):
    """No assignment can satisfy every demand within the capacities.

    ``root`` (when set) is the vertex copy whose demand got stuck, and
    ``reached`` lists the vertices its search could still reach — together
    they certify the bottleneck.
    """

    def __init__(self, message: str, root: CopyRef | None = None, reached: tuple[str, ...] = ()):
        super().__init__(message)
        self.root = root
        self.reached = reached


class InternalSolverError(RuntimeError):
    """A solver invariant broke mid-run; the result would be untrustworthy."""


@dataclass
class CapacitatedMatching:
    """Mutable matching over original pairs with per-copy bookkeeping.

    ``routed[i]`` counts row i's matches on its demand copy and
    ``parked[j]`` column j's matches on its surplus copy; the other two
    copy counts follow from the degrees.  ``num``/``quota`` expose the
    four counter arrays per vertex copy.
    """

    graph: ExpandedGraph
    matched: np.ndarray  # (s, t) bool
    deg_a: np.ndarray
    deg_b: np.ndarray
    routed: np.ndarray
    parked: np.ndarray

    @classmethod
    def empty(cls, graph: ExpandedGraph) -> "CapacitatedMatching":
        s, t = graph.instance.s, graph.instance.t
        return cls(
            graph=graph,
            matched=np.zeros((s, t), dtype=bool),
            deg_a=np.zeros(s, dtype=np.int64),
            deg_b=np.zeros(t, dtype=np.int64),
            routed=np.zeros(s, dtype=np.int64),
            parked=np.zeros(t, dtype=np.int64),
        )

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(*(np.nonzero(self.matched)), strict=True))

    def covered(self, j: int) -> int:
        """Column j matches counted against its demand copy."""
        return int(self.deg_b[j] - self.parked[j])

    def num(self, copy: CopyRef) -> int:
        group, k = copy
        if group == "a":
            return int(self.routed[k])
        if group == "a'":
            return int(self.deg_a[k] - self.routed[k])
        if group == "b":
            return int(self.deg_b[k] - self.parked[k])
        if group == "b'":
            return int(self.parked[k])
        raise ValueError(f"unknown copy group {group!r}")

    def quota(self, copy: CopyRef) -> int:
        return self.graph.quota(copy)

    def total_cost(self) -> int:
        c = np.asarray(self.graph.instance.cost, dtype=np.int64)
        return int(c[self.matched].sum())

    def copy_pairs(self) -> tuple[tuple[CopyRef, CopyRef], ...]:
        """Allocate every matched pair to vertex copies, never surplus-surplus.

        Valid whenever no pair exceeds the demand on both of its sides
        (always true after a solve, which prunes such pairs); raises
        ``ValueError`` otherwise.  Demand slots are handed out lowest
        index first, so the allocation is deterministic.
        """
        inst = self.graph.instance
        alpha = inst.a_demand
        beta = inst.b_demand
        row_loose = [self.deg_a[i] > alpha[i] for i in range(inst.s)]
        col_loose = [self.deg_b[j] > beta[j] for j in range(inst.t)]
        a_spent = [0] * inst.s
        b_spent = [0] * inst.t
        out: list[tuple[CopyRef, CopyRef]] = []
        for i, j in sorted(self.pairs):
            i, j = int(i), int(j)
            if row_loose[i] and col_loose[j]:
                raise ValueError(
                    f"no copy allocation: pair ({i}, {j}) exceeds demand on both sides"
                )
            if not row_loose[i]:
                a_side: CopyRef = ("a", i)
            elif a_spent[i] < self.num(("a", i)):
                a_side = ("a", i)
                a_spent[i] += 1
            else:
                a_side = ("a'", i)
            if not col_loose[j]:
                b_side: CopyRef = ("b", j)
            elif b_spent[j] < self.num(("b", j)):
                b_side = ("b", j)
                b_spent[j] += 1
            else:
                b_side = ("b'", j)
            out.append((a_side, b_side))
        return tuple(out)


def is_free(copy: CopyRef, m: CapacitatedMatching) -> bool:
    """True iff the vertex copy can take one more match (num < quota)."""
    return m.num(copy) < m.quota(copy)


@dataclass(frozen=True)
class AlternatingForest:
    """Snapshot of one augmenting search.

    ``dist`` holds reduced-cost distances from the root over node ids
    0..s-1 (rows), s..s+t-1 (columns), s+t (pool); INF marks unreached.
    ``slack`` is the doubled per-copy view of finishing costs on the side
    the search ends on: entries 0..n-1 for demand copies, n..2n-1 for
    surplus copies, INF where that copy cannot absorb the path.  For
    row-rooted searches there is additionally ``a_side_finish``: the cost
    of finishing by returning one of a row's optional matches to the pool.
    """

    root: CopyRef
    orientation: str  # "row" (phase 1) or "col" (phase 2)
    dist: tuple[int, ...]
    parent: tuple[int, ...]
    settled: tuple[bool, ...]
    slack: tuple[int, ...]
    a_side_finish: tuple[int, ...]
    terminal: int  # node id where the search finished
    terminal_dist: int


@dataclass(frozen=True)
class AugmentingPath:
    """Ordered primal operations realizing one cheapest augmentation."""

    root: CopyRef
    leaf: CopyRef
    steps: tuple[tuple, ...]  # ("match"|"unmatch", i, j) / ("park"|"release", j) / ("feed"|"unfeed", i)
    finished_at_pool: bool
    forest: AlternatingForest

    @property
    def edges(self) -> tuple[tuple[int, int, bool], ...]:
        """Pair steps as (i, j, was_matched) for inspection."""
        return tuple(
            (op[1], op[2], op[0] == "unmatch") for op in self.steps if op[0] in ("match", "unmatch")
        )


@dataclass(frozen=True)
class SolveReport:
    """Per-solve diagnostics; ``dual_objective`` equals the optimal cost."""

    algorithm: str
    phase1_augmentations: int
    phase2_augmentations: int
    dual_updates: int
    dual_objective: int
    pruned_pairs: int
    wall_time_ms: float


class SolverState:
    """Matching plus dual potentials; owns all mutable state of one solve."""

    def __init__(self, inst: Instance):
        self.graph = build_expanded_graph(inst)
        self.inst = inst
        self.matching = CapacitatedMatching.empty(self.graph)
        self.c = np.asarray(inst.cost, dtype=np.int64)
        self.alpha = np.asarray(inst.a_demand, dtype=np.int64)
        self.alpha_cap = np.asarray(inst.a_capacity, dtype=np.int64)
        self.beta = np.asarray(inst.b_demand, dtype=np.int64)
        self.beta_cap = np.asarray(inst.b_capacity, dtype=np.int64)
        # Feasible initial duals: reduced costs start >= 0 everywhere.
        self.p = self.c.min(axis=1).astype(np.int64)
        self.q = np.zeros(inst.t, dtype=np.int64)
        self.mu = 0
        # How many demand units may still end in spare column capacity.
        self.park_budget = max(0, int(self.alpha.sum() - self.beta.sum()))
        self.dual_updates = 0

    @property
    def s(self) -> int:
        return self.inst.s

    @property
    def t(self) -> int:
        return self.inst.t

    def labels(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Weight-space vertex labels (shared by demand and surplus copies)."""
        off = self.graph.transform.offset
        return tuple(int(off - x) for x in self.p), tuple(int(-x) for x in self.q)

    def label(self, copy: CopyRef) -> int:
        la, lb = self.labels()
        return la[copy[1]] if copy[0] in ("a", "a'") else lb[copy[1]]

    def reduced_costs(self) -> np.ndarray:
        return self.c - self.p[:, None] - self.q[None, :]

    def check_dual_invariants(self) -> None:
        """Raise if any residual arc has negative reduced cost."""
        rc = self.reduced_costs()
        m = self.matching
        if np.any(rc[~m.matched] < 0):
            raise InternalSolverError("unmatched pair with negative reduced cost")
        if np.any(rc[m.matched] > 0):
            raise InternalSolverError("matched pair with positive reduced cost")
        fed = m.deg_a - m.routed
        if np.any((self.mu + self.p)[fed < self.alpha_cap - self.alpha] < 0):
            raise InternalSolverError("pool->row arc with negative reduced cost")
        if np.any((-self.p - self.mu)[fed > 0] < 0):
            raise InternalSolverError("row->pool arc with negative reduced cost")
        if np.any((self.q - self.mu)[m.parked < self.beta_cap - self.beta] < 0):
            raise InternalSolverError("column->pool arc with negative reduced cost")
        if np.any((self.mu - self.q)[m.parked > 0] < 0):
            raise InternalSolverError("pool->column arc with negative reduced cost")

    def dual_objective(self) -> int:
        """Value of the dual solution carried by the current potentials.

        By weak duality it lower-bounds every feasible assignment's cost;
        at termination it equals the matched cost, certifying optimality.
        """
        r = self.mu + self.p
        s_ = self.q - self.mu
        w = np.maximum(0, r[:, None] + s_[None, :] - self.c)
        value = (
            int((self.alpha * np.maximum(r, 0)).sum())
            - int((self.alpha_cap * np.maximum(-r, 0)).sum())
            + int((self.beta * np.maximum(s_, 0)).sum())
            - int((self.beta_cap * np.maximum(-s_, 0)).sum())
            - int(w.sum())
        )
        return value

    def apply_potentials(self, forest: AlternatingForest) -> None:
        """Shift potentials so the augmenting path's arcs become tight."""
        d = np.asarray(forest.dist, dtype=np.int64)
        cap = forest.terminal_dist
        if cap <= 0:
            return
        shift = np.minimum(d, cap)
        if forest.orientation == "row":
            self.p -= shift[: self.s]
            self.q += shift[self.s : self.s + self.t]
            self.mu += int(shift[self.s + self.t])
        else:
            self.p += shift[: self.s]
            self.q -= shift[self.s : self.s + self.t]
            self.mu -= int(shift[self.s + self.t])
        self.dual_updates += 1


def _reconstruct(parent: np.ndarray, start: int) -> list[int]:
    """Follow parent pointers from ``start`` until a node without one."""
    chain = [start]
    while parent[chain[-1]] >= 0:
        chain.append(int(parent[chain[-1]]))
    return chain


def _steps_from_chain(chain: list[int], s: int, t: int) -> tuple[tuple, ...]:
    """Turn a node-id chain into primal operations.

    Row-rooted chains run root->leaf and column-rooted ones leaf->root,
    but both list nodes in arc direction, so consecutive (u, v) is
    always one residual arc u->v.
    """
    pool = s + t
    steps: list[tuple] = []
    for u, v in zip(chain, chain[1:], strict=False):
        if u < s and s <= v < pool:
            steps.append(("match", u, v - s))
        elif s <= u < pool and v < s:
            steps.append(("unmatch", v, u - s))
        elif s <= u < pool and v == pool:
            steps.append(("park", u - s))
        elif u == pool and s <= v < pool:
            steps.append(("release", v - s))
        elif u == pool and v < s:
            steps.append(("feed", v))
        elif u < s and v == pool:
            steps.append(("unfeed", u))
        else:
            raise InternalSolverError(f"impossible arc {u}->{v} in augmenting path")
    return tuple(steps)


def grow_forest(state: SolverState, root: CopyRef) -> AugmentingPath:
    """Find a cheapest augmenting path from a free demand copy.

    Row roots (phase 1) search forward toward a column that still needs
    partners, spare column capacity, or a returnable optional row match;
    column roots (phase 2) search backward to the pool through spare row
    capacity.  Ties prefer finishing at a demand copy over a surplus
    copy, then the lowest index.  Raises ``InfeasibleInstanceError`` when
    no finish is reachable, with the reached vertex set as certificate.
    """
    if root[0] == "a":
        if not is_free(root, state.matching):
            raise ValueError(f"root {root!r} is not a free demand copy")
        return _grow_row(state, root[1])
    if root[0] == "b":
        if not is_free(root, state.matching):
            raise ValueError(f"root {root!r} is not a free demand copy")
        return _grow_col(state, root[1])
    raise ValueError(f"roots must be demand copies, got {root!r}")


def _stuck(state: SolverState, root: CopyRef, settled: np.ndarray) -> InfeasibleInstanceError:
    s, t = state.s, state.t
    reached = tuple(
        [f"a{i}" for i in range(s) if settled[i]]
        + [f"b{j}" for j in range(t) if settled[s + j]]
        + (["pool"] if settled[s + t] else [])
    )
    return InfeasibleInstanceError(
        f"demand at {root[0]}{root[1]} cannot be met: no augmenting path "
        f"leaves the reachable set {reached}",
        root=root,
        reached=reached,
    )


def _grow_row(state: SolverState, r: int) -> AugmentingPath:
    s, t = state.s, state.t
    pool = s + t
    m = state.matching
    c, p, q, mu = state.c, state.p, state.q, state.mu
    fed = m.deg_a - m.routed
    park_open = m.parked < (state.beta_cap - state.beta)
    feed_open = fed < (state.alpha_cap - state.alpha)
    covered = m.deg_b - m.parked

    dist = np.full(pool + 1, INF, dtype=np.int64)
    parent = np.full(pool + 1, -1, dtype=np.int64)
    settled = np.zeros(pool + 1, dtype=bool)
    dist[r] = 0
    terminal = -1

    while True:
        cand = np.where(settled, INF, dist)
        v = int(cand.argmin())
        dv = int(cand[v])
        if dv >= INF:
            raise _stuck(state, ("a", r), settled)
        settled[v] = True
        if s <= v < pool and covered[v - s] < state.beta[v - s]:
            terminal = v  # a column that still needs partners: finish here
            break
        if v == pool and state.park_budget > 0:
            terminal = v
            break
        if v < s:
            i = v
            nd = dv + (c[i] - p[i] - q)
            blk = slice(s, pool)
            ok = (~m.matched[i]) & (~settled[blk]) & (nd < dist[blk])
            dist[blk][ok] = nd[ok]
            parent[blk][ok] = i
            if fed[i] > 0 and not settled[pool]:
                ndp = dv + (-int(p[i]) - mu)
                if ndp < dist[pool]:
                    dist[pool] = ndp
                    parent[pool] = i
        elif v < pool:
            j = v - s
            nd = dv + (p + int(q[j]) - c[:, j])
            blk = slice(0, s)
            ok = m.matched[:, j] & (~settled[blk]) & (nd < dist[blk])
            dist[blk][ok] = nd[ok]
            parent[blk][ok] = v
            if park_open[j] and not settled[pool]:
                ndp = dv + (int(q[j]) - mu)
                if ndp < dist[pool]:
                    dist[pool] = ndp
                    parent[pool] = v
        else:
            # Pool without park budget left: pass through it.
            nd = dv + (mu + p)
            ok = feed_open & (~settled[:s]) & (nd < dist[:s])
            dist[:s][ok] = nd[ok]
            parent[:s][ok] = pool
            nd = dv + (mu - q)
            blk = slice(s, pool)
            ok = (m.parked > 0) & (~settled[blk]) & (nd < dist[blk])
            dist[blk][ok] = nd[ok]
            parent[blk][ok] = pool

    D = int(dist[terminal])
    # Finishing-cost views per column copy (doubled layout), for inspection.
    db = dist[s:pool]
    slack_demand = np.where((covered < state.beta) & (db < INF), db, INF)
    park_cost = db + (q - mu)
    slack_surplus = np.where(
        park_open & (db < INF) & (state.park_budget > 0), park_cost, INF
    )
    a_finish = np.where(
        (fed > 0) & (dist[:s] < INF) & (state.park_budget > 0),
        dist[:s] + (-p - mu),
        INF,
    )

    if terminal == pool:
        # Choose the finishing copy: spare column slots first, lowest index,
        # then returnable row matches.
        leaf: CopyRef | None = None
        for j in range(t):
            if park_open[j] and dist[s + j] < INF and dist[s + j] + int(q[j]) - mu == D:
                leaf = ("b'", j)
                parent[pool] = s + j
                break
        if leaf is None:
            for i in range(s):
                if fed[i] > 0 and dist[i] < INF and dist[i] - int(p[i]) - mu == D:
                    leaf = ("a'", i)
                    parent[pool] = i
                    break
        if leaf is None:
            raise InternalSolverError("pool finish without a finishing arc")
    else:
        leaf = ("b", terminal - s)

    chain = _reconstruct(parent, terminal)[::-1]  # root -> terminal, arc direction
    forest = AlternatingForest(
        root=("a", r),
        orientation="row",
        dist=tuple(int(x) for x in dist),
        parent=tuple(int(x) for x in parent),
        settled=tuple(bool(x) for x in settled),
        slack=tuple(int(x) for x in slack_demand) + tuple(int(x) for x in slack_surplus),
        a_side_finish=tuple(int(x) for x in a_finish),
        terminal=terminal,
        terminal_dist=D,
    )
    return AugmentingPath(
        root=("a", r),
        leaf=leaf,
        steps=_steps_from_chain(chain, s, t),
        finished_at_pool=(terminal == pool),
        forest=forest,
    )


def _grow_col(state: SolverState, jr: int) -> AugmentingPath:
    s, t = state.s, state.t
    pool = s + t
    m = state.matching
    c, p, q, mu = state.c, state.p, state.q, state.mu
    fed = m.deg_a - m.routed
    feed_open = fed < (state.alpha_cap - state.alpha)

    # Backward search: dist[v] = cheapest reduced cost of a forward path
    # v -> ... -> root column.  Terminal is the pool (the unit source).
    dist = np.full(pool + 1, INF, dtype=np.int64)
    parent = np.full(pool + 1, -1, dtype=np.int64)  # next hop toward the root
    settled = np.zeros(pool + 1, dtype=bool)
    dist[s + jr] = 0

    while True:
        cand = np.where(settled, INF, dist)
        v = int(cand.argmin())
        dv = int(cand[v])
        if dv >= INF:
            raise _stuck(state, ("b", jr), settled)
        settled[v] = True
        if v == pool:
            break
        if s <= v < pool:
            j = v - s
            nd = dv + (c[:, j] - p - int(q[j]))
            blk = slice(0, s)
            ok = (~m.matched[:, j]) & (~settled[blk]) & (nd < dist[blk])
            dist[blk][ok] = nd[ok]
            parent[blk][ok] = v
            if m.parked[j] > 0 and not settled[pool]:
                ndp = dv + (mu - int(q[j]))
                if ndp < dist[pool]:
                    dist[pool] = ndp
                    parent[pool] = v
        else:
            i = v
            nd = dv + (int(p[i]) + q - c[i])
            blk = slice(s, pool)
            ok = m.matched[i] & (~settled[blk]) & (nd < dist[blk])
            dist[blk][ok] = nd[ok]
            parent[blk][ok] = i
            if feed_open[i] and not settled[pool]:
                ndp = dv + (mu + int(p[i]))
                if ndp < dist[pool]:
                    dist[pool] = ndp
                    parent[pool] = i

    D = int(dist[pool])
    # Entry arc out of the pool: spare row capacity first, lowest index,
    # then parked column units.
    leaf: CopyRef | None = None
    for i in range(s):
        if feed_open[i] and dist[i] < INF and dist[i] + mu + int(p[i]) == D:
            leaf = ("a'", i)
            parent[pool] = i
            break
    if leaf is None:
        for j in range(t):
            if m.parked[j] > 0 and dist[s + j] < INF and dist[s + j] + mu - int(q[j]) == D:
                leaf = ("b'", j)
                parent[pool] = s + j
                break
    if leaf is None:
        raise InternalSolverError("pool finish without a finishing arc")

    da = dist[:s]
    slack_surplus = np.where(feed_open & (da < INF), da + (mu + p), INF)
    chain = _reconstruct(parent, pool)  # pool -> ... -> root, arc direction
    forest = AlternatingForest(
        root=("b", jr),
        orientation="col",
        dist=tuple(int(x) for x in dist),
        parent=tuple(int(x) for x in parent),
        settled=tuple(bool(x) for x in settled),
        slack=tuple([INF] * s) + tuple(int(x) for x in slack_surplus),
        a_side_finish=(),
        terminal=pool,
        terminal_dist=D,
    )
    return AugmentingPath(
        root=("b", jr),
        leaf=leaf,
        steps=_steps_from_chain(chain, s, t),
        finished_at_pool=False,
        forest=forest,
    )


def augment(m: CapacitatedMatching, path: AugmentingPath) -> CapacitatedMatching:
    """Apply one augmenting path to the matching, in place.

    Swaps matched and unmatched pairs along the path and updates every
    copy counter; a malformed path (double match, counter out of range)
    raises ``InternalSolverError``.  Plain alternating paths add exactly
    one pair; pool-passing paths add one pair per pool transit as well.
    """
    inst = m.graph.instance
    for op in path.steps:
        kind = op[0]
        if kind == "match":
            _, i, j = op
            if m.matched[i, j]:
                raise InternalSolverError(f"path matches already-matched pair ({i}, {j})")
            m.matched[i, j] = True
            m.deg_a[i] += 1
            m.deg_b[j] += 1
        elif kind == "unmatch":
            _, i, j = op
            if not m.matched[i, j]:
                raise InternalSolverError(f"path unmatches unmatched pair ({i}, {j})")
            m.matched[i, j] = False
            m.deg_a[i] -= 1
            m.deg_b[j] -= 1
        elif kind == "park":
            j = op[1]
            m.parked[j] += 1
            if m.parked[j] > inst.b_capacity[j] - inst.b_demand[j]:
                raise InternalSolverError(f"column {j} parked above its surplus quota")
        elif kind == "release":
            j = op[1]
            if m.parked[j] == 0:
                raise InternalSolverError(f"column {j} released below zero")
            m.parked[j] -= 1
        elif kind in ("feed", "unfeed"):
            pass  # row-side split is tracked by deg_a - routed
        else:
            raise InternalSolverError(f"unknown path step {op!r}")
    if path.root[0] == "a":
        r = path.root[1]
        m.routed[r] += 1
        if m.routed[r] > inst.a_demand[r]:
            raise InternalSolverError(f"row {r} routed above its demand quota")
    if np.any(m.deg_a > np.asarray(inst.a_capacity)) or np.any(
        m.deg_b > np.asarray(inst.b_capacity)
    ):
        raise InternalSolverError("augmentation exceeded a capacity")
    return m


def _prune_unneeded_pairs(state: SolverState) -> int:
    """Drop pairs that no demand on either side needs.

    At an optimum any such pair costs 0 (otherwise dropping it would beat
    the optimum), so this never changes the total cost; a non-zero cost
    here means the solve was wrong and is raised loudly.  Afterwards every
    remaining pair leans on a demand slot on at least one side, which is
    exactly what the copy allocation needs.
    """
    m = state.matching
    removed = 0
    changed = True
    while changed:
        changed = False
        for i, j in sorted(zip(*np.nonzero(m.matched), strict=True)):
            i, j = int(i), int(j)
            if m.deg_a[i] > state.alpha[i] and m.deg_b[j] > state.beta[j]:
                if state.c[i, j] != 0:
                    raise InternalSolverError(
                        f"optimal matching carries a droppable pair ({i}, {j}) "
                        f"of non-zero cost {int(state.c[i, j])}"
                    )
                m.matched[i, j] = False
                m.deg_a[i] -= 1
                m.deg_b[j] -= 1
                m.parked[j] -= 1
                removed += 1
                changed = True
    return removed


def _screen(inst: Instance) -> Instance:
    """Validate and normalize; malformed input raises ValueError,
    unsatisfiable bounds raise InfeasibleInstanceError."""
    report = validate_instance(inst)
    if not report.feasible_necessary:
        if any(v.startswith(_HARD_PREFIXES) for v in report.violations):
            raise ValueError("malformed instance: " + "; ".join(report.violations))
        raise InfeasibleInstanceError(
            "instance bounds cannot be satisfied: " + "; ".join(report.violations)
        )
    return normalize_instance(inst)


def _solve(inst: Instance, algorithm: str, observer: Callable[[SolverState], None] | None) -> tuple[Assignment, SolveReport]:
    t0 = time.perf_counter()
    norm = _screen(inst)
    state = SolverState(norm)
    m = state.matching
    ph1 = ph2 = 0

    for i in range(state.s):
        while m.routed[i] < state.alpha[i]:
            path = grow_forest(state, ("a", i))
            if path.finished_at_pool:
                state.park_budget -= 1
            augment(m, path)
            state.apply_potentials(path.forest)
            ph1 += 1
            if observer is not None:
                observer(state)
    for j in range(state.t):
        while m.covered(j) < state.beta[j]:
            path = grow_forest(state, ("b", j))
            augment(m, path)
            state.apply_potentials(path.forest)
            ph2 += 1
            if observer is not None:
                observer(state)

    if np.any(m.routed != state.alpha) or any(
        m.covered(j) != state.beta[j] for j in range(state.t)
    ):
        raise InternalSolverError("phases ended with unmet demand")

    cost = m.total_cost()
    dual = state.dual_objective()
    if dual != cost:
        raise InternalSolverError(
            f"dual objective {dual} does not certify the matched cost {cost}"
        )
    pruned = _prune_unneeded_pairs(state)
    assignment = project_matching(state.graph, m.copy_pairs())
    if assignment.total_cost != cost:
        raise InternalSolverError("pruning changed the total cost")

    report = SolveReport(
        algorithm=algorithm,
        phase1_augmentations=ph1,
        phase2_augmentations=ph2,
        dual_updates=state.dual_updates,
        dual_objective=dual,
        pruned_pairs=pruned,
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
    )
    return assignment, report


def solve_ga(
    inst: Instance, observer: Callable[[SolverState], None] | None = None
) -> tuple[Assignment, SolveReport]:
    """Minimum-cost assignment under general demand/capacity bounds.

    Returns the optimal assignment and a report whose ``dual_objective``
    equals the cost (the optimality certificate).  Raises
    ``InfeasibleInstanceError`` when demands cannot be met and
    ``ValueError`` on malformed input.  ``observer``, if given, is called
    with the solver state after every augmentation.
    """
    return _solve(inst, "ga", observer)


def solve_lca(
    inst: Instance, observer: Callable[[SolverState], None] | None = None
) -> tuple[Assignment, SolveReport]:
    """solve_ga restricted to unit demands (every vertex needs exactly one
    partner; capacities stay arbitrary).  Rejects other demand vectors."""
    norm = _screen(inst)
    if any(d != 1 for d in norm.a_demand) or any(d != 1 for d in norm.b_demand):
        raise ValueError("this algorithm requires every demand to be exactly 1")
    assignment, report = _solve(norm, "lca", observer)
    return assignment, report
