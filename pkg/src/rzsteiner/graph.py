"""Graph core: instances with exact rational costs, union-find, and the
metric-closure preprocessing used by every other module.

Vertices are dense integer indices ``0..n-1``.  Edges are stored as
``(u, v, cost)`` triples with ``u < v`` and ``cost`` a :class:`Fraction`.
The position of an edge in ``Instance.edges`` is its index; ties between
equal-cost edges are always broken by that index.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

Edge = tuple[int, int, Fraction]


class InstanceError(ValueError):
    """Raised for malformed instances (bad indices, loops, negative costs)."""


class DisconnectedError(InstanceError):
    """Raised when terminals (or a graph that must be connected) are split."""


class GuardError(RuntimeError):
    """Raised when an exact oracle would exceed its desk-scale size guard."""


def as_cost(value) -> Fraction:
    """Convert ints, decimal strings, ``"p/q"`` strings or Fractions to a Fraction.

    Floats are rejected: they are rarely the exact value the caller meant.
    """
    if isinstance(value, float):
        raise InstanceError(f"float cost {value!r}; pass a Fraction, int or string")
    cost = Fraction(value)
    if cost < 0:
        raise InstanceError(f"negative cost {cost}")
    return cost


@dataclass(frozen=True)
class Instance:
    """Undirected graph with rational edge costs and a terminal set.

    ``clone_of`` maps vertices of a derived graph (for example the working
    graph of a component catalog) to vertices of the instance they were
    derived from.  ``labels`` are optional display names.
    """

    n: int
    terminals: frozenset[int]
    edges: tuple[Edge, ...]
    clone_of: Mapping[int, int] | None = None
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        seen = set()
        norm = []
        for u, v, c in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InstanceError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            if u == v:
                raise InstanceError(f"self-loop at vertex {u}")
            if v < u:
                u, v = v, u
            if (u, v) in seen:
                raise InstanceError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            norm.append((u, v, as_cost(c)))
        object.__setattr__(self, "edges", tuple(norm))
        terms = frozenset(self.terminals)
        for t in terms:
            if not 0 <= t < self.n:
                raise InstanceError(f"terminal {t} outside 0..{self.n - 1}")
        object.__setattr__(self, "terminals", terms)
        if self.labels is not None and len(self.labels) != self.n:
            raise InstanceError("labels must name every vertex")

    @classmethod
    def build(cls, n: int, terminals: Iterable[int], edges: Iterable[tuple], **kw) -> "Instance":
        return cls(n, frozenset(terminals), tuple((u, v, as_cost(c)) for u, v, c in edges), **kw)

    @cached_property
    def terminal_mask(self) -> int:
        mask = 0
        for t in self.terminals:
            mask |= 1 << t
        return mask

    def is_terminal(self, v: int) -> bool:
        return bool(self.terminal_mask >> v & 1)

    @cached_property
    def steiner_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if not self.is_terminal(v))

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
        adj: list[list[tuple[int, Fraction]]] = [[] for _ in range(self.n)]
        for u, v, c in self.edges:
            adj[u].append((v, c))
            adj[v].append((u, c))
        return tuple(tuple(a) for a in adj)

    @cached_property
    def edge_costs(self) -> dict[tuple[int, int], Fraction]:
        return {(u, v): c for u, v, c in self.edges}

    def cost(self, u: int, v: int) -> Fraction | None:
        if v < u:
            u, v = v, u
        return self.edge_costs.get((u, v))

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)

    @property
    def total_cost(self) -> Fraction:
        return sum((c for _, _, c in self.edges), Fraction(0))


class DisjointSets:
    """Union-find with path halving and union by rank."""

    def __init__(self, items: int | Iterable[int]):
        if isinstance(items, int):
            items = range(items)
        self.parent = {v: v for v in items}
        self.rank = dict.fromkeys(self.parent, 0)
        self.count = len(self.parent)

    def find(self, v: int) -> int:
        parent = self.parent
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    def union(self, u: int, v: int) -> bool:
        """Merge the classes of ``u`` and ``v``; return False if already merged."""
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if self.rank[ru] < self.rank[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        if self.rank[ru] == self.rank[rv]:
            self.rank[ru] += 1
        self.count -= 1
        return True

    def classes(self) -> list[frozenset[int]]:
        groups: dict[int, set[int]] = {}
        for v in self.parent:
            groups.setdefault(self.find(v), set()).add(v)
        return sorted((frozenset(g) for g in groups.values()), key=min)


def kruskal(vertices: Iterable[int], edges: Sequence[Edge]) -> list[Edge]:
    """Minimum spanning forest; equal costs keep their order in ``edges``."""
    ds = DisjointSets(vertices)
    forest = []
    for e in sorted(edges, key=lambda e: e[2]):
        if ds.union(e[0], e[1]):
            forest.append(e)
    return forest


def edge_cost_sum(edges: Iterable[Edge]) -> Fraction:
    return sum((c for _, _, c in edges), Fraction(0))


def dijkstra(inst: Instance, source: int, allowed: frozenset[int] | None = None
             ) -> tuple[dict[int, Fraction], dict[int, int]]:
    """Shortest-path distances and predecessors from ``source``.

    When ``allowed`` is given, only vertices in it are visited.
    """
    dist = {source: Fraction(0)}
    pred: dict[int, int] = {}
    heap = [(Fraction(0), source)]
    done = set()
    adj = inst.adjacency
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, c in adj[u]:
            if allowed is not None and v not in allowed:
                continue
            nd = d + c
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, pred


def shortest_path(inst: Instance, u: int, v: int) -> list[int]:
    dist, pred = dijkstra(inst, u)
    if v not in dist:
        raise DisconnectedError(f"no path between {inst.label(u)} and {inst.label(v)}")
    path = [v]
    while path[-1] != u:
        path.append(pred[path[-1]])
    return path[::-1]


def steiner_neighborhoods(inst: Instance) -> list[frozenset[int]]:
    """Connected components of the subgraph induced by the Steiner vertices."""
    ds = DisjointSets(inst.steiner_vertices)
    for u, v, _ in inst.edges:
        if not inst.is_terminal(u) and not inst.is_terminal(v):
            ds.union(u, v)
    return ds.classes()


def quasi_bipartite_b(inst: Instance) -> int:
    """Largest Steiner neighborhood; 0 when there are no Steiner vertices."""
    return max((len(s) for s in steiner_neighborhoods(inst)), default=0)


def metric_closure(inst: Instance) -> Instance:
    """Apply the preprocessing assumptions to ``inst``.

    Every terminal pair, and every Steiner vertex together with each vertex of
    its Steiner neighborhood and each terminal, is joined by an edge priced at
    the shortest-path distance.  No other edges are created, so Steiner
    neighborhoods (and hence ``b``) are unchanged.
    """
    terms = sorted(inst.terminals)
    dist = {}
    for s in range(inst.n):
        dist[s] = dijkstra(inst, s)[0]
    for i, a in enumerate(terms):
        for b in terms[i + 1:]:
            if b not in dist[a]:
                raise DisconnectedError(
                    f"terminals {inst.label(a)} and {inst.label(b)} are not connected")
    pairs = set()
    for i, a in enumerate(terms):
        for b in terms[i + 1:]:
            pairs.add((a, b))
    for hood in steiner_neighborhoods(inst):
        for v in hood:
            for u in list(hood) + terms:
                if u != v and u in dist[v]:
                    pairs.add((min(u, v), max(u, v)))
    edges = tuple((u, v, dist[u][v]) for u, v in sorted(pairs))
    return Instance(inst.n, inst.terminals, edges, clone_of=inst.clone_of, labels=inst.labels)


def induced_subgraph(inst: Instance, keep: Iterable[int]) -> Instance:
    """The subgraph induced by ``keep``, reindexed in increasing vertex order.

    New vertex ``i`` is the ``i``-th smallest kept vertex; ``clone_of`` records
    the old index so results can be mapped back.
    """
    order = sorted(set(keep))
    for v in order:
        if not 0 <= v < inst.n:
            raise InstanceError(f"vertex {v} not in instance")
    index = {v: i for i, v in enumerate(order)}
    edges = tuple((index[u], index[v], c) for u, v, c in inst.edges if u in index and v in index)
    terms = frozenset(index[t] for t in inst.terminals if t in index)
    labels = tuple(inst.label(v) for v in order) if inst.labels else None
    return Instance(len(order), terms, edges, clone_of={i: v for i, v in enumerate(order)}, labels=labels)


def is_tree(vertices: Iterable[int], edges: Sequence[Edge]) -> bool:
    vs = set(vertices)
    if len(edges) != len(vs) - 1:
        return False
    ds = DisjointSets(vs)
    return all(ds.union(u, v) for u, v, _ in edges)


def prune_steiner_leaves(edges: Iterable[Edge], terminals: frozenset[int] | set[int]) -> list[Edge]:
    """Repeatedly drop edges hanging off degree-1 non-terminal vertices."""
    edges = list(edges)
    while True:
        deg: dict[int, int] = {}
        for u, v, _ in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        leaves = {v for v, d in deg.items() if d == 1 and v not in terminals}
        if not leaves:
            return edges
        edges = [e for e in edges if e[0] not in leaves and e[1] not in leaves]


def graph_loss(vertices: Iterable[int], edges: Sequence[Edge], terminals) -> list[Edge]:
    """Cheapest edge subset leaving every component with a terminal.

    Computed as a minimum spanning forest after contracting all terminals
    into one super-node.  Edge order breaks ties.
    """
    vertices = list(vertices)
    terminals = set(terminals)
    if not terminals & set(vertices):
        raise InstanceError("loss is undefined without a terminal")
    hub = min(t for t in vertices if t in terminals)

    def rep(v):
        return hub if v in terminals else v

    ds = DisjointSets({rep(v) for v in vertices})
    loss = []
    for e in sorted(edges, key=lambda e: e[2]):
        if ds.union(rep(e[0]), rep(e[1])):
            loss.append(e)
    if ds.count != 1:
        raise DisconnectedError("some Steiner vertex cannot reach a terminal")
    return loss
