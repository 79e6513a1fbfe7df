"""The invariant suite run by ``rzsteiner verify`` on a single instance."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .components import build_catalog
from .graph import (DisjointSets, GuardError, Instance, edge_cost_sum, graph_loss, metric_closure,
                    quasi_bipartite_b)
from .mstdual import (collection_state, dual_load, dual_load_bottleneck, initial_state,
                      intmst_sum, kruskal_dual)
from .oracle import (MAX_GROUND, brute_force_opt, optimal_r_tree, rankdrop_check,
                     solve_partition_lp)
from .solver import rz_solve


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str          # "pass", "fail" or "skip"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def floyd_warshall(inst: Instance) -> list[list[Fraction | None]]:
    n = inst.n
    d: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for v in range(n):
        d[v][v] = Fraction(0)
    for u, v, c in inst.edges:
        if d[u][v] is None or c < d[u][v]:
            d[u][v] = d[v][u] = c
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            if dik is None:
                continue
            di = d[i]
            for j in range(n):
                if dk[j] is not None and (di[j] is None or dik + dk[j] < di[j]):
                    di[j] = dik + dk[j]
    return d


def complementary_slackness(timeline, tree) -> bool:
    """Each tree edge is crossed by partitions whose durations add up to its cost."""
    # an edge crosses exactly the partitions active before its own merge event
    elapsed = {}
    time = Fraction(0)
    for ev in timeline.events:
        time += ev.y
        elapsed[ev.edge[:2]] = time
    return all(elapsed.get((u, v)) == c for u, v, c in tree)


def run_checks(inst: Instance, r: int, max_ground: int = MAX_GROUND) -> list[CheckResult]:
    results: list[CheckResult] = []

    def check(name: str, fn: Callable[[], tuple[bool, str] | bool]):
        try:
            out = fn()
        except GuardError as exc:
            results.append(CheckResult(name, "skip", str(exc)))
            return
        except AssertionError as exc:
            results.append(CheckResult(name, "fail", str(exc)))
            return
        ok, detail = out if isinstance(out, tuple) else (out, "")
        results.append(CheckResult(name, "pass" if ok else "fail", detail))

    closed = metric_closure(inst)
    terms = sorted(inst.terminals)

    check("closure is idempotent", lambda: metric_closure(closed) == closed)

    def closure_prices():
        d = floyd_warshall(inst)
        return all(closed.cost(a, b) == d[a][b] for i, a in enumerate(terms) for b in terms[i + 1:])
    check("closure prices equal shortest paths", closure_prices)
    check("closure keeps b", lambda: quasi_bipartite_b(closed) == quasi_bipartite_b(inst))

    def strong_duality():
        tree, tl = kruskal_dual(closed)
        return tl.objective() == edge_cost_sum(tree) and complementary_slackness(tl, tree)
    check("Kruskal dual equals tree cost", strong_duality)

    if len(terms) < 2:
        return results
    catalog = build_catalog(closed, r)
    comps = catalog.components

    def catalog_shape():
        seen_edges, seen_steiner = set(), set()
        for K in comps:
            deg: dict[int, int] = {}
            for u, v, _ in K.edges:
                deg[u] = deg.get(u, 0) + 1
                deg[v] = deg.get(v, 0) + 1
                if (u, v) in seen_edges:
                    return False, f"edge {(u, v)} shared"
                seen_edges.add((u, v))
            if any(deg[t] != 1 for t in K.terminals) or any(deg[s] < 2 for s in K.steiner):
                return False, f"bad degrees in component {sorted(K.terminals)}"
            if seen_steiner & K.steiner:
                return False, "Steiner clone shared"
            seen_steiner |= K.steiner
            if edge_cost_sum(K.edges) != K.cost or edge_cost_sum(K.loss_edges) != K.loss:
                return False, "cost bookkeeping"
        return True, f"{len(comps)} components"
    check("catalog components are disjoint full components", catalog_shape)

    def fact_one():
        everything = collection_state(catalog, range(len(catalog)))
        loss = graph_loss(everything.vertices, everything.edges, catalog.terminals)
        return edge_cost_sum(loss) == everything.loss_cost
    check("loss of a collection is the sum of component losses", fact_one)

    state0 = initial_state(catalog)
    check("dual load: timeline equals bottleneck MST",
          lambda: all(dual_load(state0.timeline, K) == dual_load_bottleneck(state0.tree, K) for K in comps))
    check("graphic rank integral equals MST",
          lambda: intmst_sum(state0.vertices, state0.edges) == state0.mst_cost)

    report = rz_solve(inst, r)
    final = report.state
    check("mst = smst + loss on the final collection",
          lambda: final.mst_cost == final.smst_value + final.loss_cost)
    check("every iteration has f < 1", lambda: all(it.f < 1 for it in report.iterations))
    check("mst strictly decreases",
          lambda: all(a.mst > b.mst for a, b in zip(report.iterations, report.iterations[1:]))
          and (not report.iterations or report.iterations[0].mst < report.mst0))
    check("final dual is feasible", lambda: report.dual_feasible)
    check("lifted tree spans the terminals", lambda: _spans(report.final_tree, terms))

    state = {}

    def opt_r():
        state["opt_r"], state["tstar"] = optimal_r_tree(catalog)
        return report.lower_bound <= state["opt_r"] <= report.pruned_cost, \
            f"lower bound {report.lower_bound} <= opt_r {state['opt_r']} <= cost {report.pruned_cost}"
    check("lower bound <= opt_r <= pruned cost", opt_r)

    def opt():
        best, _ = brute_force_opt(inst)
        return best <= min(state.get("opt_r", best), report.final_cost), f"opt {best}"
    check("opt <= opt_r and opt <= final cost", opt)

    def lp_sandwich():
        lp = solve_partition_lp(catalog, final.members, max_ground=max_ground)
        o = state.get("opt_r")
        ok = report.lower_bound <= lp.value and (o is None or lp.value <= o)
        return ok, f"smst {report.lower_bound} <= lp {lp.value} <= opt_r {o}"
    check("smst <= LP value <= opt_r", lp_sandwich)

    if "tstar" in state:
        check("rank drop along the optimal tree",
              lambda: rankdrop_check(catalog, state["tstar"], max(1, quasi_bipartite_b(inst))))
    return results


def _spans(tree, terms) -> bool:
    if len(terms) <= 1:
        return True
    ds = DisjointSets({t for t in terms} | {v for e in tree for v in e[:2]})
    for u, v, _ in tree:
        if not ds.union(u, v):
            return False
    return len({ds.find(t) for t in terms}) == 1
