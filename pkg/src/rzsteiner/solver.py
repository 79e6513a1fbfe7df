"""The iterated primal-dual loop with the relative-loss selection rule.

Start from the terminal-pair edges, whose MST timeline is a dual solution.
While some catalog component ``K`` has more dual load than cost (it is
*violated*), add the violated component minimising

    f(K) = loss(K) / (smst(S) - smst(S + K))

and recompute.  The final MST is the answer, and the final ``smst`` is a
lower bound on the optimal r-restricted tree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .components import ComponentCatalog, build_catalog
from .graph import (Edge, Instance, InstanceError, dijkstra, edge_cost_sum, kruskal,
                    metric_closure, prune_steiner_leaves, quasi_bipartite_b)
from .mstdual import (CollectionState, add_component, dual_load, initial_state, is_violated,
                      selection_value)

_ZERO = Fraction(0)


class MissingOracleError(ValueError):
    pass


@dataclass(frozen=True)
class Iteration:
    component: int                    # catalog index
    terminals: tuple[int, ...]        # original vertex ids
    f: Fraction
    mst: Fraction                     # values after adding the component
    smst: Fraction
    loss: Fraction


@dataclass
class RunReport:
    r: int
    b: int
    terminal_count: int
    mst0: Fraction                                 # mst(G[R]) of the closed graph
    iterations: list[Iteration]
    raw_cost: Fraction                             # MST of the final working graph
    pruned_cost: Fraction                          # after dropping Steiner leaves
    final_cost: Fraction                           # lifted to the input graph
    final_tree: tuple[Edge, ...]                   # input-graph coordinates
    lower_bound: Fraction                          # smst of the final collection
    components: tuple[int, ...]                    # final collection, catalog indices
    dual_feasible: bool
    catalog: ComponentCatalog | None = field(default=None, repr=False)
    state: CollectionState | None = field(default=None, repr=False)
    oracle: dict | None = None                     # filled in by callers that ran oracles

    @property
    def oracle_opt_r(self) -> Fraction | None:
        return None if self.oracle is None else self.oracle.get("opt_r")


def _lift(inst: Instance, closed_edges, clone_of) -> list[Edge]:
    """Replace each closed-graph edge by a shortest path of the input graph."""
    preds: dict[int, dict[int, int]] = {}
    out: dict[tuple[int, int], Fraction] = {}
    for u, v, _ in closed_edges:
        a, b = clone_of[u], clone_of[v]
        if a not in preds:
            preds[a] = dijkstra(inst, a)[1]
        pred = preds[a]
        x = b
        while x != a:
            p = pred[x]
            key = (min(p, x), max(p, x))
            out[key] = inst.cost(p, x)
            x = p
    return [(u, v, c) for (u, v), c in sorted(out.items())]


def _trivial(inst: Instance, r: int) -> RunReport:
    return RunReport(r, quasi_bipartite_b(inst), len(inst.terminals), _ZERO, [], _ZERO, _ZERO,
                     _ZERO, (), _ZERO, (), True)


def rz_solve(inst: Instance, r: int) -> RunReport:
    """Run the loop on ``inst`` with components of at most ``r`` terminals."""
    if r < 2:
        raise InstanceError(f"r must be at least 2, got {r}")
    if len(inst.terminals) <= 1:
        return _trivial(inst, r)
    closed = metric_closure(inst)
    catalog = build_catalog(closed, r)
    state = initial_state(catalog)
    mst0 = state.mst_cost
    iterations: list[Iteration] = []
    while True:
        best = None
        for k in state.outside():
            if not is_violated(state, k):
                continue
            f = selection_value(state, k)
            if best is None or (f, k) < best:
                best = (f, k)
        if best is None:
            break
        f, k = best
        if not f < 1:
            raise AssertionError(f"violated component {k} has selection value {f} >= 1")
        old = state.mst_cost
        state = add_component(state, k)
        if not state.mst_cost < old:
            raise AssertionError("mst did not decrease")
        comp = catalog.components[k]
        iterations.append(Iteration(k, tuple(sorted(catalog.to_original(t) for t in comp.terminals)),
                                    f, state.mst_cost, state.smst_value, state.loss_cost))
    terms = catalog.terminals
    pruned = prune_steiner_leaves(state.tree, terms)
    lifted = _lift(inst, pruned, {v: catalog.to_original(v) for e in pruned for v in e[:2]})
    keep = sorted({v for e in lifted for v in e[:2]} | set(inst.terminals))
    final = prune_steiner_leaves(kruskal(keep, lifted), inst.terminals)
    final.sort(key=lambda e: (e[0], e[1]))
    feasible = not any(dual_load(state.timeline, catalog.components[k]) > catalog.components[k].cost
                       for k in state.outside())
    return RunReport(
        r=catalog.r, b=quasi_bipartite_b(inst), terminal_count=len(terms), mst0=mst0,
        iterations=iterations, raw_cost=state.mst_cost, pruned_cost=edge_cost_sum(pruned),
        final_cost=edge_cost_sum(final), final_tree=tuple(final), lower_bound=state.smst_value,
        components=tuple(sorted(state.members)), dual_feasible=feasible,
        catalog=catalog, state=state)


# ---------------------------------------------------------------- guarantees

def _round_up(x: mpmath.mpf, digits: int) -> Fraction:
    scale = 10 ** digits
    return Fraction(int(mpmath.ceil(x * scale)), scale)


def theorem_bound(b: int, digits: int = 12) -> Fraction:
    """Approximation guarantee for b-quasi-bipartite graphs, rounded up.

    1.279 for b <= 1, 1 + 1/e for b in 2..4 and 1 + ln(3 - 2/b)/2 beyond.
    A graph without Steiner vertices (b = 0) is also 1-quasi-bipartite.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    if b <= 1:
        return Fraction(1279, 1000)
    with mpmath.workdps(digits + 30):
        if b <= 4:
            value = 1 + 1 / mpmath.e
        else:
            value = 1 + mpmath.log(3 - mpmath.mpf(2) / b) / 2
        return _round_up(value, digits)


def certify_ratio(report: RunReport, b: int | None = None, require_oracle: bool = False,
                  digits: int = 12) -> tuple[Fraction, bool | None]:
    """(bound, raw_cost <= bound * opt_r), or (bound, None) without an oracle value.

    The raw cost of the final MST is the algorithm's own r-restricted tree;
    pruning and lifting only lower it, so the check is the strict one.
    """
    if b is None:
        b = report.b
    bound = theorem_bound(b, digits)
    opt_r = report.oracle_opt_r
    if opt_r is None:
        if require_oracle:
            raise MissingOracleError("certify_ratio needs oracle_opt_r to decide satisfaction")
        return bound, None
    return bound, report.raw_cost <= bound * opt_r


@dataclass(frozen=True)
class TpcostCheck:
    bound: mpmath.mpf        # opt_r + l* ln(1 + (mst - opt_r)/l*)
    satisfied: bool
    premise: bool            # l* <= opt_r / 2


def tpcost_bound(opt_r: Fraction, lstar: Fraction, mst_r: Fraction, dps: int = 50) -> mpmath.mpf:
    with mpmath.workdps(dps):
        if lstar == 0 or mst_r == opt_r:
            return mpmath.mpf(opt_r.numerator) / opt_r.denominator
        o = mpmath.mpf(opt_r.numerator) / opt_r.denominator
        ell = mpmath.mpf(lstar.numerator) / lstar.denominator
        m = mpmath.mpf(mst_r.numerator) / mst_r.denominator
        return o + ell * mpmath.log(1 + (m - o) / ell)


def tpcost_bound_check(report: RunReport, opt_r: Fraction, lstar: Fraction,
                       mst_r: Fraction | None = None) -> TpcostCheck:
    """Compare the raw cost against ``opt_r + l* ln(1 + (mst_r - opt_r)/l*)`` at 60 digits."""
    if mst_r is None:
        mst_r = report.mst0
    premise = 2 * lstar <= opt_r
    cost = report.raw_cost
    if lstar == 0 or mst_r == opt_r:
        # the logarithm vanishes (or its l -> 0 limit is 0): the bound is opt_r exactly
        return TpcostCheck(tpcost_bound(opt_r, lstar, mst_r), cost <= opt_r, premise)
    with mpmath.workdps(60):
        bound = tpcost_bound(opt_r, lstar, mst_r, dps=60)
        lhs = mpmath.mpf(cost.numerator) / cost.denominator
        ok = bool(lhs <= bound)
    return TpcostCheck(bound, ok, premise)


def as_float(x) -> float:
    if isinstance(x, Fraction):
        return x.numerator / x.denominator
    if isinstance(x, float) and math.isinf(x):
        return x
    return float(x)
