"""Follow the iterated primal-dual loop step by step.

Starting from the complete graph on the terminals, each round adds the
violated full component with the smallest relative loss.  We print the dual
load of the chosen component, the MST before and after, and finally compare
with the exact optimum.

    python demos/03_watch_the_loop.py [seed]
"""
import sys

from rzsteiner import GeneratorSpec, generate_random_bquasi
from rzsteiner.mstdual import add_component, dual_load, initial_state, is_violated, selection_value
from rzsteiner.oracle import brute_force_opt, optimal_r_tree, tree_loss
from rzsteiner.solver import certify_ratio, rz_solve

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 4
inst = generate_random_bquasi(GeneratorSpec(n=10, b=2, seed=seed, cost_range=(1, 9), closed=False))
r = 4
print(f"seed {seed}: {inst.n} vertices, terminals {sorted(inst.terminals)}, r = {r}")

report = rz_solve(inst, r)
catalog = report.catalog
state = initial_state(catalog)
print(f"catalog: {len(catalog)} components; mst on terminals = {state.mst_cost}")

for step, it in enumerate(report.iterations, 1):
    comp = catalog.components[it.component]
    violated = sum(1 for k in state.outside() if is_violated(state, k))
    load = dual_load(state.timeline, comp)
    assert selection_value(state, it.component) == it.f
    print(f"round {step}: {violated} violated; add {list(it.terminals)} "
          f"cost {comp.cost} load {load} loss {comp.loss} f = {it.f}")
    before = state.mst_cost
    state = add_component(state, it.component)
    print(f"          mst {before} -> {state.mst_cost}   smst {state.smst_value}")

print()
print("no violated component left:", report.dual_feasible)
print(f"raw {report.raw_cost}  pruned {report.pruned_cost}  lifted {report.final_cost}")
print("lower bound from the final dual:", report.lower_bound)

opt_r, tstar = optimal_r_tree(catalog)
report.oracle = {"opt_r": opt_r}
bound, ok = certify_ratio(report)
print(f"opt_r = {opt_r} (loss {tree_loss(catalog, tstar)}), opt = {brute_force_opt(inst)[0]}")
print(f"ratio {float(report.raw_cost / opt_r):.4f} against guarantee {float(bound):.4f}: {ok}")
