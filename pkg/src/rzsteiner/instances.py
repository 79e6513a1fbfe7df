"""Reading and writing STP files, and the named and random instance families.

Only the combinatorial part of the SteinLib STP format is understood:
``SECTION Comment``, ``SECTION Graph`` and ``SECTION Terminals``.  Other
sections are skipped with a warning.
"""
from __future__ import annotations

import random
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .graph import DisjointSets, Instance, InstanceError, metric_closure


class StpSyntaxError(InstanceError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


_NUMBER = re.compile(r"^[+]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$|^\d+/\d+$")


def _parse_cost(token: str, lineno: int) -> Fraction:
    if not _NUMBER.match(token):
        raise StpSyntaxError(lineno, f"bad cost {token!r}")
    return Fraction(token)


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise StpSyntaxError(lineno, f"bad {what} {token!r}") from None


def parse_stp(text: str) -> Instance:
    """Parse an STP document; node ids are 1-based in the file, 0-based after."""
    lines = text.splitlines()
    section = None
    seen_sections: set[str] = set()
    nodes = None
    declared_edges = None
    declared_terms = None
    edges: list[tuple[int, int, Fraction]] = []
    terms: list[tuple[int, int]] = []
    pairs: set[tuple[int, int]] = set()
    eof = False
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if eof:
            raise StpSyntaxError(lineno, "content after EOF")
        tok = line.split()
        head = tok[0].upper()
        if section is None and not seen_sections and "STP FILE" in line.upper():
            continue  # magic header line "33D32945 STP File, STP Format Version 1.0"
        if head == "SECTION":
            if section is not None:
                raise StpSyntaxError(lineno, f"SECTION inside unfinished section {section}")
            if len(tok) < 2:
                raise StpSyntaxError(lineno, "SECTION without a name")
            section = tok[1].lower()
            if section in seen_sections:
                raise StpSyntaxError(lineno, f"repeated section {tok[1]}")
            seen_sections.add(section)
            if section not in ("comment", "graph", "terminals"):
                warnings.warn(f"line {lineno}: ignoring unsupported section {tok[1]}", stacklevel=2)
            continue
        if head == "END":
            if section is None:
                raise StpSyntaxError(lineno, "END outside a section")
            section = None
            continue
        if head == "EOF":
            if section is not None:
                raise StpSyntaxError(lineno, f"EOF inside section {section}")
            eof = True
            continue
        if section is None:
            raise StpSyntaxError(lineno, f"unexpected {tok[0]!r} outside a section")
        if section == "comment":
            continue
        if section == "graph":
            if head == "NODES":
                if len(tok) != 2:
                    raise StpSyntaxError(lineno, "expected 'Nodes n'")
                nodes = _parse_int(tok[1], lineno, "node count")
            elif head == "EDGES":
                if len(tok) != 2:
                    raise StpSyntaxError(lineno, "expected 'Edges m'")
                declared_edges = (lineno, _parse_int(tok[1], lineno, "edge count"))
            elif head in ("E", "A"):
                if len(tok) != 4:
                    raise StpSyntaxError(lineno, "expected 'E u v cost'")
                if nodes is None:
                    raise StpSyntaxError(lineno, "edge before 'Nodes'")
                u = _parse_int(tok[1], lineno, "node id")
                v = _parse_int(tok[2], lineno, "node id")
                for x in (u, v):
                    if not 1 <= x <= nodes:
                        raise StpSyntaxError(lineno, f"node {x} outside 1..{nodes}")
                if u == v:
                    raise StpSyntaxError(lineno, f"self-loop at node {u}")
                key = (min(u, v), max(u, v))
                if key in pairs:
                    raise StpSyntaxError(lineno, f"duplicate edge {u} {v}")
                pairs.add(key)
                edges.append((u - 1, v - 1, _parse_cost(tok[3], lineno)))
            else:
                raise StpSyntaxError(lineno, f"unknown Graph keyword {tok[0]!r}")
            continue
        if section == "terminals":
            if head == "TERMINALS":
                if len(tok) == 2:
                    declared_terms = (lineno, _parse_int(tok[1], lineno, "terminal count"))
            elif head == "T":
                if len(tok) != 2:
                    raise StpSyntaxError(lineno, "expected 'T i'")
                terms.append((lineno, _parse_int(tok[1], lineno, "terminal id")))
            else:
                raise StpSyntaxError(lineno, f"unknown Terminals keyword {tok[0]!r}")
            continue
        # unsupported sections: skip their body
    last = len(lines)
    if section is not None:
        raise StpSyntaxError(last, f"section {section} not closed by END")
    if "graph" not in seen_sections:
        raise StpSyntaxError(last, "missing SECTION Graph")
    if "terminals" not in seen_sections:
        raise StpSyntaxError(last, "missing SECTION Terminals")
    if nodes is None:
        raise StpSyntaxError(last, "missing 'Nodes' line")
    if declared_edges is not None and declared_edges[1] != len(edges):
        raise StpSyntaxError(declared_edges[0], f"'Edges {declared_edges[1]}' but {len(edges)} edge lines")
    terminal_ids = set()
    for lineno, t in terms:
        if not 1 <= t <= nodes:
            raise StpSyntaxError(lineno, f"terminal {t} outside 1..{nodes}")
        terminal_ids.add(t - 1)
    if declared_terms is not None and declared_terms[1] != len(terms):
        raise StpSyntaxError(declared_terms[0], f"'Terminals {declared_terms[1]}' but {len(terms)} terminal lines")
    labels = tuple(str(i + 1) for i in range(nodes))  # file ids, for messages
    return Instance(nodes, frozenset(terminal_ids), tuple(edges), labels=labels)


def _format_cost(c: Fraction) -> str:
    """Integer, exact decimal when the denominator is 2^a 5^b, else ``p/q``."""
    if c.denominator == 1:
        return str(c.numerator)
    d = c.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{c.numerator}/{c.denominator}"
    digits = 0
    while (c * 10 ** digits).denominator != 1:
        digits += 1
    s = str((c * 10 ** digits).numerator).rjust(digits + 1, "0")
    return f"{s[:-digits]}.{s[-digits:]}"


def write_stp(inst: Instance, name: str | None = None) -> str:
    """Serialize ``inst`` (labels and clone maps are not stored)."""
    out = ["33D32945 STP File, STP Format Version 1.0", ""]
    out += ["SECTION Comment"]
    if name:
        out.append(f'Name "{name}"')
    out += ["END", "", "SECTION Graph", f"Nodes {inst.n}", f"Edges {len(inst.edges)}"]
    for u, v, c in inst.edges:
        out.append(f"E {u + 1} {v + 1} {_format_cost(c)}")
    out += ["END", "", "SECTION Terminals", f"Terminals {len(inst.terminals)}"]
    for t in sorted(inst.terminals):
        out.append(f"T {t + 1}")
    out += ["END", "", "EOF", ""]
    return "\n".join(out)


# ---------------------------------------------------------------- named instances

FANO_LINES = ((1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6))


def generate_skutella() -> Instance:
    """Fano-plane instance: integrality gap 8/7 for the pairs-only partition LP.

    Vertices 0..6 are the points (terminals), 7..13 the lines (Steiner),
    14 an apex terminal joined to every line.  A point and a line are
    adjacent exactly when the point is *not* on the line.  All costs are 1.
    """
    edges = []
    for li, line in enumerate(FANO_LINES):
        s = 7 + li
        for p in range(1, 8):
            if p not in line:
                edges.append((p - 1, s, 1))
        edges.append((s, 14, 1))
    labels = tuple([f"p{p}" for p in range(1, 8)] + [f"L{i}" for i in range(1, 8)] + ["apex"])
    return Instance.build(15, list(range(7)) + [14], edges, labels=labels)


def generate_star(k: int = 3, cost=1) -> Instance:
    """One Steiner centre (vertex ``k``) joined to ``k`` terminals; no other edges."""
    if k < 1:
        raise InstanceError("a star needs at least one terminal")
    labels = tuple([f"t{i + 1}" for i in range(k)] + ["s"])
    return Instance.build(k + 1, range(k), [(i, k, cost) for i in range(k)], labels=labels)


def generate_path(n: int = 2, cost=5) -> Instance:
    """Path on ``n`` terminals with equal edge costs (PATH2 for the defaults)."""
    if n < 1:
        raise InstanceError("a path needs at least one vertex")
    return Instance.build(n, range(n), [(i, i + 1, cost) for i in range(n - 1)])


def generate_triangle() -> Instance:
    """Terminals a, b, c with ab = 1, bc = 2, ac = 3."""
    return Instance.build(3, range(3), [(0, 1, 1), (1, 2, 2), (0, 2, 3)], labels=("a", "b", "c"))


FIG3_LABELS = ("t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "s1", "s2", "s3", "s4")
FIG3_EDGES = (
    ("t1", "s1", 4), ("t2", "s2", 2), ("t3", "s2", 6), ("t4", "s1", 5),
    ("t5", "s3", 3), ("t6", "s3", 8), ("t7", "s4", 5), ("t8", "s4", 3),
    ("t6", "s4", 4), ("s1", "s2", 5), ("s1", "s3", 2),
)


def generate_fig3() -> Instance:
    """The loss illustration: a tree on 12 nodes whose loss costs 8.

    ``s2`` is a terminal of degree 3 joining two full components; s1, s3
    and s4 are Steiner.
    """
    idx = {name: i for i, name in enumerate(FIG3_LABELS)}
    terms = [idx[x] for x in FIG3_LABELS if x.startswith("t")] + [idx["s2"]]
    edges = [(idx[a], idx[b], c) for a, b, c in FIG3_EDGES]
    return Instance.build(len(FIG3_LABELS), terms, edges, labels=FIG3_LABELS)


# ---------------------------------------------------------------- random families

@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a generated instance; the same spec always gives the same graph.

    ``n`` is the total number of vertices.  For ``random_bquasi`` the
    Steiner vertices form ``clusters`` random trees, the first of exactly
    ``b`` vertices, the rest of at most ``b``; all remaining vertices are
    terminals.
    """

    family: str = "random_bquasi"
    n: int = 8
    b: int = 1
    r: int | None = None
    seed: int = 0
    cost_range: tuple[int, int] = (1, 10)
    clusters: int | None = None
    terminals: int | None = None
    closed: bool = True


class InfeasibleSpecError(InstanceError):
    pass


def generate_random_bquasi(spec: GeneratorSpec) -> Instance:
    b, n = spec.b, spec.n
    if b < 1:
        raise InfeasibleSpecError(f"b must be at least 1, got {b}")
    if n < b + 2:
        raise InfeasibleSpecError(f"n = {n} leaves fewer than two terminals beside a cluster of size {b}")
    lo, hi = spec.cost_range
    if not 0 <= lo <= hi:
        raise InfeasibleSpecError(f"bad cost range {spec.cost_range}")
    rng = random.Random(spec.seed)
    if spec.clusters is not None and spec.clusters < 1:
        raise InfeasibleSpecError("need at least one Steiner cluster")
    if spec.terminals is not None:
        k = spec.terminals
        if not 2 <= k <= n - b:
            raise InfeasibleSpecError(f"{k} terminals do not fit beside a cluster of size {b}")
    elif spec.clusters is not None:
        lo_k = max(2, n - b * spec.clusters)
        hi_k = n - b - (spec.clusters - 1)
        if lo_k > hi_k:
            raise InfeasibleSpecError(f"{spec.clusters} clusters of size <= {b} do not fit in {n} vertices")
        k = rng.randint(lo_k, hi_k)
    else:
        k = rng.randint(max(2, (n - b + 1) // 2), n - b)
    sizes = _cluster_sizes(rng, n - k, b, spec.clusters)

    def cost():
        return rng.randint(lo, hi)

    terms = list(range(k))
    edges: dict[tuple[int, int], int] = {}
    nxt = k
    for size in sizes:
        members = list(range(nxt, nxt + size))
        nxt += size
        for i in range(1, size):  # random tree inside the cluster
            j = members[rng.randrange(i)]
            edges[(j, members[i])] = cost()
        for v in members:
            for t in rng.sample(terms, min(3, k)):
                edges[(t, v)] = cost()
    # join the terminals into one connected graph
    order = terms[:]
    rng.shuffle(order)
    comp = _components(n, edges)
    for i in range(1, k):
        a, c = order[i - 1], order[i]
        if comp[a] != comp[c]:
            edges[(min(a, c), max(a, c))] = cost()
            comp = _components(n, edges)
    extra = rng.randint(0, k)
    for _ in range(extra):
        a, c = rng.sample(terms, 2) if k >= 2 else (0, 0)
        if a != c:
            edges.setdefault((min(a, c), max(a, c)), cost())
    inst = Instance.build(n, terms, [(u, v, c) for (u, v), c in sorted(edges.items())])
    return metric_closure(inst) if spec.closed else inst


def _cluster_sizes(rng: random.Random, total: int, b: int, clusters: int | None) -> list[int]:
    """Split ``total`` Steiner vertices into clusters of size <= b, the first of size b."""
    if clusters is None:
        sizes, rest = [b], total - b
        while rest > 0:
            sizes.append(rng.randint(1, min(b, rest)))
            rest -= sizes[-1]
        return sizes
    if not b + clusters - 1 <= total <= b * clusters:
        raise InfeasibleSpecError(f"{total} Steiner vertices do not split into {clusters} clusters "
                                  f"of size <= {b} with one of size {b}")
    sizes = [b] + [1] * (clusters - 1)
    for _ in range(total - sum(sizes)):
        grow = [i for i in range(1, clusters) if sizes[i] < b]
        sizes[rng.choice(grow)] += 1
    return sizes


def _components(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    ds = DisjointSets(n)
    for u, v in edges:
        ds.union(u, v)
    return [ds.find(v) for v in range(n)]


def generate(spec: GeneratorSpec) -> Instance:
    if spec.family == "skutella":
        return generate_skutella()
    if spec.family == "star":
        return generate_star(max(1, spec.n - 1))
    if spec.family == "path":
        return generate_path(spec.n)
    if spec.family == "fig3":
        return generate_fig3()
    if spec.family == "random_bquasi":
        return generate_random_bquasi(spec)
    raise InstanceError(f"unknown family {spec.family!r}")
