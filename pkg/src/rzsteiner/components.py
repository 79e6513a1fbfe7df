"""Full components: minimum-cost trees whose leaves are exactly a terminal
subset and whose internal vertices are Steiner, their loss, and the catalog
of all r-restricted components glued into one working graph.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .graph import (
    DisjointSets,
    Edge,
    GuardError,
    Instance,
    InstanceError,
    edge_cost_sum,
    graph_loss,
    is_tree,
    kruskal,
    prune_steiner_leaves,
)

MAX_CATALOG_TERMINALS = 20

_INF = float("inf")


@dataclass(frozen=True)
class FullComponent:
    terminals: frozenset[int]
    edges: tuple[Edge, ...]
    steiner: frozenset[int]
    cost: Fraction
    loss_edges: tuple[Edge, ...]
    loss: Fraction

    @property
    def size(self) -> int:
        return len(self.terminals)

    @property
    def vertices(self) -> frozenset[int]:
        return self.terminals | self.steiner

    def sorted_terminals(self) -> tuple[int, ...]:
        return tuple(sorted(self.terminals))


def component_loss(comp: FullComponent | Sequence[Edge], terminals: Iterable[int] | None = None
                   ) -> tuple[tuple[Edge, ...], Fraction]:
    """Loss edges and loss cost of a component (or of any tree given as edges)."""
    if isinstance(comp, FullComponent):
        edges, terminals = comp.edges, comp.terminals
    else:
        edges = tuple(comp)
        if terminals is None:
            raise TypeError("terminals are required when passing a bare edge list")
    terminals = frozenset(terminals)
    vertices = {t for t in terminals}
    for u, v, _ in edges:
        vertices.update((u, v))
    loss = graph_loss(sorted(vertices), edges, terminals)
    return tuple(loss), edge_cost_sum(loss)


def make_component(inst: Instance, edges: Sequence[Edge]) -> FullComponent:
    """Wrap a tree given by its edges as a FullComponent, validating the shape."""
    edges = tuple(edges)
    verts: set[int] = set()
    deg: dict[int, int] = {}
    for u, v, _ in edges:
        verts.update((u, v))
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    if not is_tree(verts, edges):
        raise InstanceError("component edges do not form a tree")
    terms = frozenset(v for v in verts if inst.is_terminal(v))
    steiner = frozenset(verts - terms)
    if any(deg[t] != 1 for t in terms):
        raise InstanceError("terminal of a full component must be a leaf")
    if any(deg[s] < 2 for s in steiner):
        raise InstanceError("Steiner vertex of a full component must be internal")
    loss_edges, loss = component_loss(edges, terms)
    return FullComponent(terms, edges, steiner, edge_cost_sum(edges), loss_edges, loss)


def _splice_degree_two(inst: Instance, edges: list[Edge]) -> list[Edge]:
    # a Steiner vertex of degree 2 can be bypassed by the direct edge between its
    # neighbours whenever that edge is no more expensive (always, after closure)
    changed = True
    while changed:
        changed = False
        adj: dict[int, list[Edge]] = {}
        for e in edges:
            adj.setdefault(e[0], []).append(e)
            adj.setdefault(e[1], []).append(e)
        for s in sorted(adj):
            if inst.is_terminal(s) or len(adj[s]) != 2:
                continue
            (e1, e2) = adj[s]
            a = e1[0] if e1[1] == s else e1[1]
            b = e2[0] if e2[1] == s else e2[1]
            if inst.is_terminal(a) and inst.is_terminal(b):
                continue
            c = inst.cost(a, b)
            if c is not None and c <= e1[2] + e2[2]:
                edges = [e for e in edges if e is not e1 and e is not e2]
                edges.append((min(a, b), max(a, b), c))
                changed = True
                break
    return edges


class _SubsetDP:
    """Dreyfus-Wagner style tables restricted to terminal-leaf trees.

    ``g[mask][v]`` is the cheapest tree containing Steiner vertex ``v`` whose
    terminals are exactly ``mask`` and are all leaves.  ``split[mask][v]``
    additionally forces ``v`` to have at least two children.
    """

    def __init__(self, inst: Instance, terminals: Sequence[int], max_size: int):
        self.inst = inst
        self.terms = list(terminals)
        self.steiner = list(inst.steiner_vertices)
        self.k = len(self.terms)
        self.max_size = max_size
        self.g: dict[int, dict[int, tuple]] = {}
        self.split: dict[int, dict[int, tuple]] = {}
        sset = set(self.steiner)
        self.steiner_adj = {
            v: [(u, c) for u, c in inst.adjacency[v] if u in sset] for v in self.steiner
        }
        self._run()

    def _relax(self, seeds: dict[int, tuple]) -> dict[int, tuple]:
        # Dijkstra over Steiner-Steiner edges from the seed costs
        best = dict(seeds)
        heap = [(val[0], v) for v, val in seeds.items()]
        heapq.heapify(heap)
        done = set()
        while heap:
            d, v = heapq.heappop(heap)
            if v in done or d != best[v][0]:
                continue
            done.add(v)
            for u, c in self.steiner_adj[v]:
                nd = d + c
                if u not in best or nd < best[u][0]:
                    best[u] = (nd, "ext", v)
                    heapq.heappush(heap, (nd, u))
        return best

    def _run(self):
        inst = self.inst
        for i, t in enumerate(self.terms):
            seeds = {}
            for v in self.steiner:
                c = inst.cost(v, t)
                if c is not None:
                    seeds[v] = (c, "base", t)
            self.g[1 << i] = self._relax(seeds)
        masks = [m for m in range(1, 1 << self.k) if 2 <= m.bit_count() <= self.max_size]
        masks.sort(key=lambda m: (m.bit_count(), m))
        for mask in masks:
            low = mask & -mask
            rest = mask ^ low
            splits: dict[int, tuple] = {}
            # enumerate sub = low | part with part a proper submask of rest
            part = rest
            while True:
                sub = low | part
                if sub != mask:
                    other = mask ^ sub
                    ga, gb = self.g.get(sub), self.g.get(other)
                    if ga and gb:
                        for v in self.steiner:
                            if v in ga and v in gb:
                                val = ga[v][0] + gb[v][0]
                                if v not in splits or val < splits[v][0]:
                                    splits[v] = (val, "split", sub)
                if part == 0:
                    break
                part = (part - 1) & rest
            self.split[mask] = splits
            if mask.bit_count() < self.max_size:
                self.g[mask] = self._relax(splits)

    def best(self, mask: int) -> tuple[Fraction, int] | None:
        splits = self.split.get(mask)
        if not splits:
            return None
        v = min(splits, key=lambda v: (splits[v][0], v))
        return splits[v][0], v

    def _edges(self, mask: int, v: int, entry: tuple, out: list[Edge]):
        _, kind, arg = entry
        if kind == "base":
            out.append((min(v, arg), max(v, arg), self.inst.cost(v, arg)))
        elif kind == "ext":
            out.append((min(v, arg), max(v, arg), self.inst.cost(v, arg)))
            self._edges(mask, arg, self.g[mask][arg], out)
        else:
            sub = arg
            other = mask ^ sub
            self._edges(sub, v, self.g[sub][v], out)
            self._edges(other, v, self.g[other][v], out)

    def tree(self, mask: int) -> list[Edge] | None:
        found = self.best(mask)
        if found is None:
            return None
        _, v = found
        out: list[Edge] = []
        self._edges(mask, v, self.split[mask][v], out)
        return out


def _finish(inst: Instance, terms: frozenset[int], edges: list[Edge]) -> FullComponent:
    # zero-cost ties can let two subtrees share a Steiner vertex; repair that
    edges = list(dict.fromkeys(edges))
    verts = {x for e in edges for x in e[:2]}
    if not is_tree(verts, edges):
        edges = kruskal(sorted(verts), edges)
    edges = prune_steiner_leaves(edges, terms)
    edges = _splice_degree_two(inst, edges)
    edges.sort(key=lambda e: (e[0], e[1]))
    comp = make_component(inst, edges)
    assert comp.terminals == terms
    return comp


def min_full_component(inst: Instance, K: Iterable[int]) -> FullComponent | None:
    """Cheapest full component spanning exactly the terminals ``K``.

    For a terminal pair the direct edge is returned when it exists.  Returns
    None when no tree with leaf set ``K`` and Steiner interior exists.
    """
    K = sorted(set(K))
    if len(K) < 2:
        raise InstanceError("a full component needs at least two terminals")
    for t in K:
        if not inst.is_terminal(t):
            raise InstanceError(f"{inst.label(t)} is not a terminal")
    if len(K) == 2:
        c = inst.cost(K[0], K[1])
        if c is not None:
            return make_component(inst, [(K[0], K[1], c)])
    dp = _SubsetDP(inst, K, len(K))
    tree = dp.tree((1 << len(K)) - 1)
    if tree is None:
        return None
    return _finish(inst, frozenset(K), tree)


@dataclass(frozen=True)
class ComponentCatalog:
    """One minimum-cost component per achievable terminal subset of size <= r.

    ``components`` live in the coordinates of ``working_graph``: terminals
    keep indices ``0..|R|-1`` (in increasing original order) and every
    component receives private clones of its Steiner vertices.
    ``working_graph.clone_of`` maps back to ``instance``.
    """

    r: int
    instance: Instance
    components: tuple[FullComponent, ...]
    working_graph: Instance
    originals: tuple[FullComponent, ...]

    @property
    def terminals(self) -> frozenset[int]:
        return self.working_graph.terminals

    @cached_property
    def pair_indices(self) -> tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.components) if k.size == 2)

    @cached_property
    def index_of(self) -> dict[frozenset[int], int]:
        return {k.terminals: i for i, k in enumerate(self.components)}

    @cached_property
    def edge_owner(self) -> dict[tuple[int, int], int]:
        return {(u, v): i for i, k in enumerate(self.components) for u, v, _ in k.edges}

    @cached_property
    def edge_rank(self) -> dict[tuple[int, int], int]:
        """Position of each working-graph edge; the global tie-break order."""
        return {(u, v): i for i, (u, v, _) in enumerate(self.working_graph.edges)}

    def __len__(self):
        return len(self.components)

    def to_original(self, v: int) -> int:
        return self.working_graph.clone_of[v]


def build_catalog(inst: Instance, r: int) -> ComponentCatalog:
    """Enumerate r-restricted minimum-cost full components and glue them.

    ``inst`` should already be metric-closed.  Subsets are enumerated by
    bitmask, so at most ``MAX_CATALOG_TERMINALS`` terminals are accepted.
    """
    if r < 2:
        raise InstanceError(f"r must be at least 2, got {r}")
    terms = sorted(inst.terminals)
    if len(terms) > MAX_CATALOG_TERMINALS:
        raise GuardError(f"{len(terms)} terminals exceed the catalog guard of {MAX_CATALOG_TERMINALS}")
    r = min(r, len(terms))
    originals: list[FullComponent] = []
    for a, b in itertools.combinations(terms, 2):
        c = inst.cost(a, b)
        if c is not None:
            originals.append(make_component(inst, [(a, b, c)]))
    if r >= 3:
        dp = _SubsetDP(inst, terms, r)
        masks = [m for m in range(1, 1 << len(terms)) if 3 <= m.bit_count() <= r]
        masks.sort(key=lambda m: (m.bit_count(), [i for i in range(len(terms)) if m >> i & 1]))
        for m in masks:
            tree = dp.tree(m)
            if tree is None:
                continue
            K = frozenset(terms[i] for i in range(len(terms)) if m >> i & 1)
            originals.append(_finish(inst, K, tree))
    originals.sort(key=lambda k: (k.size, k.sorted_terminals()))

    # working graph: terminals first, then per-component Steiner clones
    new_id = {t: i for i, t in enumerate(terms)}
    clone_of = {i: t for i, t in enumerate(terms)}
    labels = [inst.label(t) for t in terms]
    nxt = len(terms)
    comps = []
    work_edges: list[Edge] = []
    for ci, comp in enumerate(originals):
        local = dict(new_id)
        for s in sorted(comp.steiner):
            local[s] = nxt
            clone_of[nxt] = s
            labels.append(f"{inst.label(s)}#{ci}")
            nxt += 1
        edges = tuple(sorted(((min(local[u], local[v]), max(local[u], local[v]), c)
                              for u, v, c in comp.edges), key=lambda e: (e[0], e[1])))
        loss_edges = tuple((min(local[u], local[v]), max(local[u], local[v]), c)
                           for u, v, c in comp.loss_edges)
        comps.append(FullComponent(frozenset(local[t] for t in comp.terminals), edges,
                                   frozenset(local[s] for s in comp.steiner), comp.cost,
                                   loss_edges, comp.loss))
        work_edges.extend(edges)
    working = Instance(nxt, frozenset(range(len(terms))), tuple(work_edges),
                       clone_of=clone_of, labels=tuple(labels))
    return ComponentCatalog(r, inst, tuple(comps), working, tuple(originals))
