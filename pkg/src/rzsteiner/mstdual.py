"""Kruskal's algorithm read as a primal-dual process over vertex partitions.

Running Kruskal from time 0 and adding each edge at time equal to its cost
keeps a partition of the vertices into forest components.  The partition
active on ``[tau_prev, tau)`` receives dual value ``tau - tau_prev``.  That
timeline is a feasible dual whose objective equals the tree cost, and its
Steiner-rank objective is the ``smst`` lower bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .components import ComponentCatalog, FullComponent
from .graph import DisconnectedError, DisjointSets, Edge, Instance, edge_cost_sum, kruskal

_ZERO = Fraction(0)


@dataclass(frozen=True)
class Partition:
    """A partition of a finite vertex set into nonempty disjoint blocks."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise ValueError("empty block")
            if seen & b:
                raise ValueError("blocks overlap")
            seen |= b

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(sorted((frozenset(b) for b in blocks), key=min)))

    @classmethod
    def singletons(cls, ground: Iterable[int]) -> "Partition":
        return cls.of([v] for v in ground)

    @property
    def ground(self) -> frozenset[int]:
        return frozenset().union(*self.blocks)

    @property
    def rank(self) -> int:
        return len(self.blocks)

    @cached_property
    def block_index(self) -> dict[int, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}

    def crossing(self, edges: Iterable[Edge]) -> list[Edge]:
        idx = self.block_index
        return [e for e in edges if idx[e[0]] != idx[e[1]]]


def steiner_rank(p: Partition, terminals: Iterable[int]) -> int:
    """Number of blocks that contain at least one terminal."""
    terminals = set(terminals)
    return sum(1 for b in p.blocks if b & terminals)


def rank_contribution(p: Partition, K: FullComponent | Iterable[int]) -> int:
    """Number of blocks met by the terminals of ``K``, minus one."""
    terms = K.terminals if isinstance(K, FullComponent) else set(K)
    idx = p.block_index
    return len({idx[t] for t in terms}) - 1


@dataclass(frozen=True)
class DualEvent:
    time: Fraction       # when the merge edge became tight
    y: Fraction          # how long the partition before the merge was active
    rank: int            # r(pi) of that partition
    steiner_rank: int    # r-bar(pi)
    edge: Edge


@dataclass(frozen=True)
class DualTimeline:
    """Merge sequence of one Kruskal run, plus the partition duals it induces."""

    ground: tuple[int, ...]
    terminals: frozenset[int]
    merges: tuple[Edge, ...]

    @cached_property
    def events(self) -> tuple[DualEvent, ...]:
        ds = DisjointSets(self.ground)
        has_term = {v: v in self.terminals for v in self.ground}
        rank = len(self.ground)
        srank = sum(has_term.values())
        prev = _ZERO
        out = []
        for e in self.merges:
            u, v, c = e
            out.append(DualEvent(c, c - prev, rank, srank, e))
            ru, rv = ds.find(u), ds.find(v)
            tu, tv = has_term[ru], has_term[rv]
            ds.union(u, v)
            has_term[ds.find(u)] = tu or tv
            rank -= 1
            if tu and tv:
                srank -= 1
            prev = c
        return tuple(out)

    @property
    def total_time(self) -> Fraction:
        return self.merges[-1][2] if self.merges else _ZERO

    def partitions(self) -> Iterator[tuple[Partition, Fraction]]:
        """Yield ``(partition, y)`` for every event; partitions are built lazily."""
        ds = DisjointSets(self.ground)
        for ev in self.events:
            yield Partition.of(ds.classes()), ev.y
            ds.union(ev.edge[0], ev.edge[1])

    def objective(self) -> Fraction:
        """Sum of (r(pi) - 1) * y_pi."""
        return sum(((ev.rank - 1) * ev.y for ev in self.events), _ZERO)

    def steiner_objective(self) -> Fraction:
        """Sum of (r-bar(pi) - 1) * y_pi, i.e. the smst value."""
        return sum(((ev.steiner_rank - 1) * ev.y for ev in self.events), _ZERO)


def kruskal_timeline(vertices: Sequence[int], edges: Sequence[Edge], terminals: Iterable[int]
                     ) -> tuple[list[Edge], DualTimeline]:
    """Kruskal on an explicit vertex/edge list; ties keep the order of ``edges``."""
    ground = tuple(sorted(vertices))
    tree = kruskal(ground, edges)
    if len(tree) != len(ground) - 1:
        raise DisconnectedError("graph is not connected")
    terms = frozenset(terminals) & frozenset(ground)
    return tree, DualTimeline(ground, terms, tuple(tree))


def kruskal_dual(g: Instance) -> tuple[list[Edge], DualTimeline]:
    return kruskal_timeline(range(g.n), g.edges, g.terminals)


def bottleneck_matrix(tree: Sequence[Edge], terminals: Iterable[int]) -> dict[tuple[int, int], Fraction]:
    """Maximum edge cost on the tree path between each terminal pair."""
    adj: dict[int, list[tuple[int, Fraction]]] = {}
    for u, v, c in tree:
        adj.setdefault(u, []).append((v, c))
        adj.setdefault(v, []).append((u, c))
    terms = sorted(set(terminals))
    out = {}
    for s in terms:
        best = {s: _ZERO}
        stack = [s]
        while stack:
            u = stack.pop()
            for v, c in adj.get(u, ()):
                if v not in best:
                    best[v] = max(best[u], c)
                    stack.append(v)
        for t in terms:
            if t > s:
                if t not in best:
                    raise DisconnectedError(f"tree does not connect {s} and {t}")
                out[(s, t)] = best[t]
    return out


def _terms_of(K) -> frozenset[int]:
    return K.terminals if isinstance(K, FullComponent) else frozenset(K)


def dual_load(timeline: DualTimeline, K: FullComponent | Iterable[int]) -> Fraction:
    """Sum over partitions of rc_K(pi) * y_pi, accumulated along the timeline."""
    terms = _terms_of(K)
    ds = DisjointSets(timeline.ground)
    total = _ZERO
    for ev in timeline.events:
        rc = len({ds.find(t) for t in terms}) - 1
        total += rc * ev.y
        ds.union(ev.edge[0], ev.edge[1])
    return total


def dual_load_bottleneck(tree: Sequence[Edge], K: FullComponent | Iterable[int]) -> Fraction:
    """Same quantity as :func:`dual_load`: MST of K's terminals under bottleneck distances."""
    terms = sorted(_terms_of(K))
    d = bottleneck_matrix(tree, terms)
    edges = [(a, b, d[(a, b)]) for a, b in sorted(d)]
    return edge_cost_sum(kruskal(terms, edges))


@dataclass(frozen=True)
class CollectionState:
    """MST, timeline and bounds of the working graph of a sub-collection S."""

    catalog: ComponentCatalog
    members: frozenset[int]
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    tree: tuple[Edge, ...]
    timeline: DualTimeline
    mst_cost: Fraction
    loss_cost: Fraction
    smst_value: Fraction

    def component(self, k: int) -> FullComponent:
        return self.catalog.components[k]

    def outside(self) -> list[int]:
        return [k for k in range(len(self.catalog)) if k not in self.members]


def collection_graph(catalog: ComponentCatalog, members: Iterable[int]) -> tuple[list[int], list[Edge]]:
    """Vertices R + V(S) and edges E(S), edges in working-graph index order."""
    members = sorted(set(members))
    verts = set(catalog.terminals)
    edges: list[Edge] = []
    for k in members:
        comp = catalog.components[k]
        verts |= comp.steiner
        edges.extend(comp.edges)
    order = catalog.edge_rank
    edges.sort(key=lambda e: order[(e[0], e[1])])
    return sorted(verts), edges


def collection_state(catalog: ComponentCatalog, members: Iterable[int]) -> CollectionState:
    members = frozenset(members)
    missing = set(catalog.pair_indices) - members
    if missing:
        raise ValueError("a collection must contain every terminal pair")
    verts, edges = collection_graph(catalog, members)
    tree, timeline = kruskal_timeline(verts, edges, catalog.terminals)
    loss = sum((catalog.components[k].loss for k in members), _ZERO)
    return CollectionState(catalog, members, tuple(verts), tuple(edges), tuple(tree), timeline,
                           edge_cost_sum(tree), loss, timeline.steiner_objective())


def initial_state(catalog: ComponentCatalog) -> CollectionState:
    return collection_state(catalog, catalog.pair_indices)


def is_violated(state: CollectionState, k: int) -> bool:
    """True when component ``k`` breaks its dual packing constraint."""
    comp = state.component(k)
    return dual_load(state.timeline, comp) > comp.cost


def mst_with(state: CollectionState, k: int) -> Fraction:
    """mst(S + K) computed as an MST of the current tree plus E(K).

    Edges of S outside the current MST are never needed again (cycle
    property), so this equals a full recomputation.
    """
    comp = state.component(k)
    if k in state.members:
        return state.mst_cost
    order = state.catalog.edge_rank
    edges = sorted(state.tree + comp.edges, key=lambda e: order[(e[0], e[1])])
    verts = set(state.vertices) | comp.steiner
    tree = kruskal(verts, edges)
    return edge_cost_sum(tree)


def add_component(state: CollectionState, k: int) -> CollectionState:
    if k in state.members:
        raise ValueError(f"component {k} is already in the collection")
    new = collection_state(state.catalog, state.members | {k})
    if __debug__:
        assert new.mst_cost == mst_with(state, k)
        comp = state.component(k)
        load = dual_load(state.timeline, comp)
        if load > comp.cost:
            # the exchanged tree T + E(K) - {e_1..e_q} bounds the new MST
            assert new.mst_cost <= state.mst_cost + comp.cost - load < state.mst_cost
    return new


def smst_drop(state: CollectionState, k: int) -> Fraction:
    """smst(S) - smst(S + K), via mst difference plus loss(K)."""
    comp = state.component(k)
    return state.mst_cost - mst_with(state, k) + comp.loss


def selection_value(state: CollectionState, k: int) -> Fraction | float:
    """loss(K) / (smst(S) - smst(S + K)); +inf when the denominator is not positive."""
    denom = smst_drop(state, k)
    if denom <= 0:
        return math.inf
    return state.component(k).loss / denom


def intmst_sum(vertices: Iterable[int], edges: Sequence[Edge]) -> Fraction:
    """MST cost from the graphic-matroid rank function.

    Sums ``(r(H) - r(H_{<=x}))`` over the gaps between consecutive distinct
    edge costs, which is the integral of that step function.
    """
    vertices = list(vertices)

    def rank(limit):
        ds = DisjointSets(vertices)
        for u, v, c in edges:
            if limit is None or c <= limit:
                ds.union(u, v)
        return len(vertices) - ds.count

    full = rank(None)
    levels = sorted({c for _, _, c in edges} | {_ZERO})
    total = _ZERO
    for lo, hi in zip(levels, levels[1:]):
        total += (full - rank(lo)) * (hi - lo)
    return total
