"""Exact desk-scale oracles.

* every set partition of a small ground set, and the partition LP over a
  sub-collection of components, solved exactly;
* the optimal Steiner tree (by Steiner-subset enumeration) and the optimal
  r-restricted Steiner tree (by search over hypertrees of the catalog);
* integrality gaps, the extension of an LP point by one more component,
  the Fano-plane point of value 35/4, and the rank-drop check along an
  optimal tree's Kruskal timeline.

Every oracle output is a rational number.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .components import ComponentCatalog, FullComponent
from .graph import (DisjointSets, Edge, GuardError, Instance, InstanceError, edge_cost_sum,
                    induced_subgraph, kruskal, quasi_bipartite_b)
from .lp import LpSolution, solve_covering
from .mstdual import Partition, collection_graph, kruskal_timeline

MAX_GROUND = 12
MAX_STEINER = 16
MAX_BRUTE_COMPONENTS = 22
MAX_DP_TERMINALS = 14
_ZERO = Fraction(0)


# ---------------------------------------------------------------- partitions

def _check_ground(size: int, max_ground: int):
    if size > max_ground:
        raise GuardError(f"ground set of {size} vertices exceeds the partition guard of {max_ground}")


def restricted_growth_strings(g: int) -> np.ndarray:
    """All set partitions of ``range(g)`` as block-label rows, in lexicographic order."""
    if g == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rows = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)  # largest label used so far, per row
    for _ in range(1, g):
        reps = (top + 2).astype(np.int64)
        idx = np.repeat(np.arange(len(rows)), reps)
        offsets = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
        label = offsets.astype(np.int8)
        rows = np.concatenate([rows[idx], label[:, None]], axis=1)
        top = np.maximum(top[idx], label)
    return rows


def enumerate_partitions(ground: Iterable[int], max_ground: int = MAX_GROUND) -> Iterator[Partition]:
    """Every partition of ``ground`` exactly once, in restricted-growth order."""
    ground = sorted(set(ground))
    _check_ground(len(ground), max_ground)
    for labels in restricted_growth_strings(len(ground)):
        blocks: dict[int, list[int]] = {}
        for v, lab in zip(ground, labels):
            blocks.setdefault(int(lab), []).append(v)
        yield Partition.of(blocks.values())


def _distinct_per_row(cols: np.ndarray) -> np.ndarray:
    if cols.shape[1] == 0:
        return np.zeros(cols.shape[0], dtype=np.int64)
    s = np.sort(cols, axis=1)
    return 1 + (np.diff(s, axis=1) != 0).sum(axis=1)


# ---------------------------------------------------------------- the partition LP

ROW_CHUNK = 1 << 16


@dataclass
class PartitionLp:
    """The covering LP over sub-collection ``members``.

    Variables are the edges of the members (``edge_vars``) followed by the
    catalog components outside the sub-collection (``component_vars``).
    Rows are all partitions of the ground set ``R + V(S)``; rows with a zero
    right-hand side are dropped since every coefficient is nonnegative.
    Only the partitions are stored; coefficient rows are computed on demand,
    a chunk at a time, so a ground set of 12 stays within a few hundred MB.
    """

    catalog: ComponentCatalog
    members: frozenset[int]
    ground: tuple[int, ...]
    edge_vars: tuple[Edge, ...]
    component_vars: tuple[int, ...]
    labels: np.ndarray = field(repr=False)     # restricted growth strings, rhs >= 1 only
    rhs: np.ndarray = field(repr=False)

    @property
    def costs(self) -> list[Fraction]:
        comps = self.catalog.components
        return [c for _, _, c in self.edge_vars] + [comps[k].cost for k in self.component_vars]

    @property
    def num_vars(self) -> int:
        return len(self.edge_vars) + len(self.component_vars)

    def partition(self, row: int) -> Partition:
        blocks: dict[int, list[int]] = {}
        for v, lab in zip(self.ground, self.labels[row]):
            blocks.setdefault(int(lab), []).append(v)
        return Partition.of(blocks.values())

    def rows(self, index=slice(None), columns: Sequence[int] | None = None) -> np.ndarray:
        """Coefficient rows (int64) for the given row indices, optionally only some columns."""
        labels = self.labels[index]
        if columns is None:
            columns = range(self.num_vars)
        pos = {v: i for i, v in enumerate(self.ground)}
        ne = len(self.edge_vars)
        cols = []
        for j in columns:
            if j < ne:
                u, v, _ = self.edge_vars[j]
                cols.append((labels[:, pos[u]] != labels[:, pos[v]]).astype(np.int64))
            else:
                K = self.catalog.components[self.component_vars[j - ne]]
                cols.append(_distinct_per_row(labels[:, [pos[t] for t in sorted(K.terminals)]]) - 1)
        if not cols:
            return np.zeros((len(labels), 0), dtype=np.int64)
        return np.stack(cols, axis=1).astype(np.int64)

    @property
    def matrix(self) -> np.ndarray:
        """The whole coefficient matrix; only sensible for small ground sets."""
        return self.rows()

    def objective(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.costs, x)), _ZERO)

    def violated_rows(self, x: Sequence[Fraction]) -> np.ndarray:
        """Row indices whose constraint fails at ``x``, most violated first."""
        x = [Fraction(v) for v in x]
        den = math.lcm(1, *(v.denominator for v in x))
        support = [j for j, v in enumerate(x) if v]
        xi = [int(x[j] * den) for j in support]
        # coefficients are at most the ground size, so this bounds every row sum
        small = max(xi, default=0) * len(self.ground) * max(1, len(xi)) < 2 ** 62
        vec = np.array(xi, dtype=np.int64 if small else object)
        bad_idx, bad_slack = [], []
        for start in range(0, len(self.rhs), ROW_CHUNK):
            chunk = slice(start, start + ROW_CHUNK)
            block = self.rows(chunk, support)
            rhs = self.rhs[chunk]
            if not small:
                block, rhs = block.astype(object), rhs.astype(object)
            slack = block @ vec - rhs * den
            bad = np.nonzero(slack < 0)[0]
            bad_idx.append(bad + start)
            bad_slack.append(slack[bad])
        if not bad_idx:
            return np.zeros(0, dtype=np.int64)
        idx = np.concatenate(bad_idx)
        slack = np.concatenate(bad_slack)
        return idx[np.argsort(slack, kind="stable")]

    def is_feasible(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.num_vars or any(Fraction(v) < 0 for v in x):
            return False
        return len(self.violated_rows(x)) == 0


def build_partition_lp(catalog: ComponentCatalog, members: Iterable[int],
                       max_ground: int = MAX_GROUND) -> PartitionLp:
    members = frozenset(members)
    verts, edges = collection_graph(catalog, members)
    ground = tuple(verts)
    _check_ground(len(ground), max_ground)
    pos = {v: i for i, v in enumerate(ground)}
    labels = restricted_growth_strings(len(ground))
    term_cols = [pos[t] for t in sorted(catalog.terminals)]
    rhs = _distinct_per_row(labels[:, term_cols]) - 1
    keep = rhs >= 1
    comp_vars = tuple(k for k in range(len(catalog)) if k not in members)
    return PartitionLp(catalog, members, ground, tuple(edges), comp_vars, labels[keep],
                       rhs[keep].astype(np.int64))


@dataclass(frozen=True)
class LpResult:
    value: Fraction
    x: tuple[Fraction, ...]
    dual: dict[int, Fraction]      # row index of the LP -> y
    lp: PartitionLp
    rounds: int

    def point(self) -> dict:
        """Nonzero coordinates, keyed by ('edge', (u, v)) or ('component', k)."""
        out = {}
        for i, v in enumerate(self.x):
            if v:
                out[self.lp_key(i)] = v
        return out

    def lp_key(self, i: int):
        ne = len(self.lp.edge_vars)
        if i < ne:
            u, v, _ = self.lp.edge_vars[i]
            return ("edge", (u, v))
        return ("component", self.lp.component_vars[i - ne])


DIRECT_ROW_LIMIT = 400


def solve_partition_lp(catalog: ComponentCatalog, members: Iterable[int] | None = None,
                       method: str = "auto", max_ground: int = MAX_GROUND) -> LpResult:
    """Exact optimum of the partition LP of sub-collection ``members``.

    ``method="direct"`` hands every row to the simplex; ``"cutting"`` starts
    from a few rows and adds the most violated ones until the simplex optimum
    satisfies all of them (an exact certificate for the full LP, since the
    dual weights on the active rows stay feasible).  ``"auto"`` picks by
    row count.
    """
    if members is None:
        members = catalog.pair_indices
    lp = build_partition_lp(catalog, members, max_ground)
    costs = lp.costs
    nrows = len(lp.rhs)
    if nrows == 0:
        return LpResult(_ZERO, tuple(_ZERO for _ in costs), {}, lp, 0)
    if method == "auto":
        method = "direct" if nrows <= DIRECT_ROW_LIMIT else "cutting"
    if method == "direct":
        sol = solve_covering(lp.matrix.tolist(), lp.rhs.tolist(), costs)
        return LpResult(sol.value, sol.x, dict(sol.y), lp, 1)
    if method != "cutting":
        raise ValueError(f"unknown method {method!r}")
    active = [0]  # row 0 is the all-singletons partition (largest rhs)
    rounds = 0
    while True:
        rounds += 1
        sub = lp.rows(active)
        sol = solve_covering(sub.tolist(), lp.rhs[active].tolist(), costs)
        bad = lp.violated_rows(sol.x)
        if len(bad) == 0:
            dual = {active[i]: w for i, w in sol.y.items()}
            return LpResult(sol.value, sol.x, dual, lp, rounds)
        present = set(active)
        fresh = [int(i) for i in bad if int(i) not in present][:48]
        active.extend(fresh)


# ---------------------------------------------------------------- optimal trees

def brute_force_opt(inst: Instance, max_steiner: int = MAX_STEINER) -> tuple[Fraction, list[Edge]]:
    """Minimum Steiner tree: best MST of ``G[R + W]`` over Steiner subsets ``W``."""
    steiner = list(inst.steiner_vertices)
    if len(steiner) > max_steiner:
        raise GuardError(f"{len(steiner)} Steiner vertices exceed the guard of {max_steiner}")
    terms = sorted(inst.terminals)
    if len(terms) <= 1:
        return _ZERO, []
    best: tuple[Fraction, list[Edge]] | None = None
    for size in range(len(steiner) + 1):
        for W in itertools.combinations(steiner, size):
            keep = set(terms) | set(W)
            sub = [e for e in inst.edges if e[0] in keep and e[1] in keep]
            tree = kruskal(sorted(keep), sub)
            if len(tree) != len(keep) - 1:
                continue
            cost = edge_cost_sum(tree)
            if best is None or cost < best[0]:
                best = (cost, tree)
    if best is None:
        raise InstanceError("terminals are not connected")
    return best


def _is_hyperforest_step(ds: DisjointSets, terms: Sequence[int]) -> bool:
    roots = [ds.find(t) for t in terms]
    return len(set(roots)) == len(roots)


def brute_force_opt_r(catalog: ComponentCatalog, max_components: int = MAX_BRUTE_COMPONENTS
                      ) -> tuple[Fraction, tuple[int, ...]]:
    """Cheapest spanning hypertree of the catalog by exhaustive search.

    A sub-collection qualifies when its terminal sets are acyclic (each new
    set meets distinct classes) and ``sum(|K| - 1) == |R| - 1``.
    """
    n = len(catalog)
    if n > max_components:
        raise GuardError(f"{n} components exceed the exhaustive guard of {max_components}")
    terms = sorted(catalog.terminals)
    need = len(terms) - 1
    comps = catalog.components
    order = sorted(range(n), key=lambda k: (comps[k].cost, k))
    best = [None, None]

    def dfs(pos: int, chosen: list[int], rank: int, cost: Fraction, ds: DisjointSets):
        if best[0] is not None and cost > best[0]:
            return
        if rank == need:
            key = tuple(sorted(chosen))
            if best[0] is None or cost < best[0] or (cost == best[0] and key < best[1]):
                best[0], best[1] = cost, key
            return
        for i in range(pos, n):
            k = order[i]
            K = comps[k]
            if rank + K.size - 1 > need:
                continue
            kt = sorted(K.terminals)
            if not _is_hyperforest_step(ds, kt):
                continue
            saved = (dict(ds.parent), dict(ds.rank), ds.count)
            for t in kt[1:]:
                ds.union(kt[0], t)
            chosen.append(k)
            dfs(i + 1, chosen, rank + K.size - 1, cost + K.cost, ds)
            chosen.pop()
            ds.parent, ds.rank, ds.count = saved

    dfs(0, [], 0, _ZERO, DisjointSets(terms))
    if best[0] is None:
        if need == 0:
            return _ZERO, ()
        raise InstanceError("catalog does not span the terminals")
    return best[0], best[1]


def opt_r_dp(catalog: ComponentCatalog, max_terminals: int = MAX_DP_TERMINALS
             ) -> tuple[Fraction, tuple[int, ...]]:
    """Cheapest spanning hypertree by dynamic programming over terminal subsets.

    ``F(X)`` is the cheapest hypertree spanning exactly ``X``, rooted at
    ``t = min X``.  The branches at ``t`` split ``X - t``; the branch holding
    the next-smallest element is peeled off as a tree ``A(Y)`` in which ``t``
    lies in one component ``K``, the rest of ``Y`` hanging below the other
    terminals of ``K``.
    """
    terms = sorted(catalog.terminals)
    k = len(terms)
    if k > max_terminals:
        raise GuardError(f"{k} terminals exceed the hypertree DP guard of {max_terminals}")
    pos = {t: i for i, t in enumerate(terms)}
    comps = catalog.components
    by_mask: dict[int, int] = {}
    for idx, K in enumerate(comps):
        m = 0
        for t in K.terminals:
            m |= 1 << pos[t]
        by_mask[m] = idx
    # components containing each terminal bit, as (mask, index)
    containing = {i: [(m, c) for m, c in by_mask.items() if m >> i & 1] for i in range(k)}
    INF = None

    def low(m):
        return (m & -m).bit_length() - 1

    @lru_cache(maxsize=None)
    def F(X: int):
        if X & (X - 1) == 0:
            return (_ZERO, ())
        t = low(X)
        rest = X ^ (1 << t)
        m = rest & -rest
        best = A(X, t)
        others = rest ^ m
        sub = others
        while True:
            Y = (1 << t) | m | sub
            if Y != X:
                a = A(Y, t)
                if a is not INF:
                    f = F((X ^ Y) | (1 << t))
                    if f is not INF:
                        cand = (a[0] + f[0], tuple(sorted(a[1] + f[1])))
                        if best is INF or cand < best:
                            best = cand
            if sub == 0:
                break
            sub = (sub - 1) & others
        return best

    @lru_cache(maxsize=None)
    def A(Y: int, t: int):
        best = INF
        for km, c in containing[t]:
            if km & ~Y:
                continue
            d = D(km ^ (1 << t), Y ^ km)
            if d is INF:
                continue
            cand = (comps[c].cost + d[0], tuple(sorted((c,) + d[1])))
            if best is INF or cand < best:
                best = cand
        return best

    @lru_cache(maxsize=None)
    def D(Q: int, Z: int):
        if Q == 0:
            return (_ZERO, ()) if Z == 0 else INF
        q = low(Q)
        best = INF
        sub = Z
        while True:
            f = F(sub | (1 << q))
            if f is not INF:
                d = D(Q ^ (1 << q), Z ^ sub)
                if d is not INF:
                    cand = (f[0] + d[0], tuple(sorted(f[1] + d[1])))
                    if best is INF or cand < best:
                        best = cand
            if sub == 0:
                break
            sub = (sub - 1) & Z
        return best

    if k <= 1:
        return _ZERO, ()
    res = F((1 << k) - 1)
    if res is INF:
        raise InstanceError("catalog does not span the terminals")
    return res


def optimal_r_tree(catalog: ComponentCatalog) -> tuple[Fraction, tuple[int, ...]]:
    """opt_r and a witness: exhaustive search for small catalogs, the DP otherwise."""
    if len(catalog) <= MAX_BRUTE_COMPONENTS:
        return brute_force_opt_r(catalog)
    return opt_r_dp(catalog)


def is_hypertree(catalog: ComponentCatalog, members: Iterable[int]) -> bool:
    members = list(members)
    terms = sorted(catalog.terminals)
    ds = DisjointSets(terms)
    total = 0
    for k in members:
        kt = sorted(catalog.components[k].terminals)
        if not _is_hyperforest_step(ds, kt):
            return False
        for t in kt[1:]:
            ds.union(kt[0], t)
        total += len(kt) - 1
    return total == len(terms) - 1


def tree_loss(catalog: ComponentCatalog, members: Iterable[int]) -> Fraction:
    return sum((catalog.components[k].loss for k in members), _ZERO)


# ---------------------------------------------------------------- gap and extension

@dataclass(frozen=True)
class OracleResult:
    opt: Fraction | None
    opt_r: Fraction
    lp_value: Fraction | None
    opt_tree: tuple[Edge, ...] | None
    opt_r_components: tuple[int, ...]
    lp_point: dict | None

    @property
    def gap(self) -> Fraction | None:
        return None if not self.lp_value else self.opt_r / self.lp_value


def integrality_gap(catalog: ComponentCatalog, members: Iterable[int] | None = None,
                    max_ground: int = MAX_GROUND) -> tuple[Fraction, Fraction, Fraction]:
    """(opt_r, lp_value, opt_r / lp_value) for the LP of ``members`` (default: pairs)."""
    opt_r, _ = optimal_r_tree(catalog)
    lp = solve_partition_lp(catalog, members, max_ground=max_ground)
    if lp.value == 0:
        raise ZeroDivisionError("LP value is zero")
    return opt_r, lp.value, opt_r / lp.value


def run_oracles(inst: Instance, catalog: ComponentCatalog, max_ground: int = MAX_GROUND,
                with_lp: bool = True) -> OracleResult:
    opt, tree = brute_force_opt(inst)
    opt_r, comps = optimal_r_tree(catalog)
    lp = solve_partition_lp(catalog, max_ground=max_ground) if with_lp else None
    return OracleResult(opt, opt_r, lp.value if lp else None, tuple(tree), comps,
                        lp.point() if lp else None)


def extend_primal(lp: PartitionLp, x: Sequence[Fraction], j: int) -> tuple[PartitionLp, list[Fraction]]:
    """Move component ``j`` into the sub-collection, spreading ``x_j`` onto its edges.

    Returns the larger LP and the extended point: every edge of ``j`` gets the
    old value of ``x_j``; all other coordinates are copied.
    """
    if j in lp.members:
        raise ValueError(f"component {j} is already in the sub-collection")
    x = list(x)
    if len(x) != lp.num_vars:
        raise ValueError("point has the wrong dimension")
    ne = len(lp.edge_vars)
    old = {("edge", (u, v)): x[i] for i, (u, v, _) in enumerate(lp.edge_vars)}
    old.update({("component", k): x[ne + i] for i, k in enumerate(lp.component_vars)})
    xj = old.pop(("component", j))
    for u, v, _ in lp.catalog.components[j].edges:
        old[("edge", (u, v))] = xj
    big = build_partition_lp(lp.catalog, lp.members | {j}, max_ground=max(len(lp.ground), MAX_GROUND))
    out = [old[("edge", (u, v))] for u, v, _ in big.edge_vars]
    out += [old[("component", k)] for k in big.component_vars]
    return big, out


def incidence_point(lp: PartitionLp, components: Iterable[int]) -> list[Fraction]:
    """0/1 point of an S-decomposition: components in S contribute their edges."""
    chosen = set(components)
    edge_on = set()
    for k in chosen & lp.members:
        edge_on.update((u, v) for u, v, _ in lp.catalog.components[k].edges)
    x = [Fraction(int((u, v) in edge_on)) for u, v, _ in lp.edge_vars]
    x += [Fraction(int(k in chosen)) for k in lp.component_vars]
    return x


# ---------------------------------------------------------------- Fano point

def skutella_point(lp: PartitionLp) -> list[Fraction]:
    """x_K = 1/4 on the cheapest 5-terminal components (cost 5), zero elsewhere."""
    comps = lp.catalog.components
    five = [k for k in lp.component_vars if comps[k].size == 5 and comps[k].cost == 5]
    if len(five) != 7:
        raise InstanceError(f"expected 7 five-terminal components of cost 5, found {len(five)}")
    ne = len(lp.edge_vars)
    x = [_ZERO] * lp.num_vars
    for i, k in enumerate(lp.component_vars):
        if k in five:
            x[ne + i] = Fraction(1, 4)
    return x


# ---------------------------------------------------------------- rank drop

@dataclass(frozen=True)
class RankDropEvent:
    y: Fraction
    rank: int
    steiner_rank: int
    ok: bool


def rankdrop_events(catalog: ComponentCatalog, components: Iterable[int], b: int) -> list[RankDropEvent]:
    """Check ``(rbar - 1) >= (b+1)/(2b+1) (r - 1)`` on each positive-duration
    partition of the Kruskal timeline of the given tree's own graph."""
    verts, edges = collection_graph(catalog, components)
    _, timeline = kruskal_timeline(verts, edges, catalog.terminals)
    out = []
    for ev in timeline.events:
        if ev.y > 0:
            ok = (ev.steiner_rank - 1) * (2 * b + 1) >= (b + 1) * (ev.rank - 1)
            out.append(RankDropEvent(ev.y, ev.rank, ev.steiner_rank, ok))
    return out


def rankdrop_check(catalog: ComponentCatalog, components: Iterable[int], b: int | None = None) -> bool:
    if b is None:
        b = max(1, quasi_bipartite_b(catalog.instance))
    return all(ev.ok for ev in rankdrop_events(catalog, components, b))


def mst_on_terminals(inst: Instance) -> Fraction:
    """mst(G[R]) of a metric-closed instance."""
    sub = induced_subgraph(inst, inst.terminals)
    tree = kruskal(range(sub.n), sub.edges)
    if len(tree) != sub.n - 1:
        raise InstanceError("terminals are not pairwise adjacent; close the instance first")
    return edge_cost_sum(tree)
