"""The Fano-plane instance: a partition LP with a gap of 8/7.

Seven points and seven lines of the Fano plane; each line is a Steiner
vertex joined to the four points it misses, plus an apex terminal joined to
every line.  All edges cost 1.  Every terminal pair is at distance 2, every
line gives a 5-terminal full component of cost 5, and a quarter of each of
those seven components is a fractional solution of value 35/4.  No tree
does better than 10.

    python demos/02_fano_gap.py        (takes a few seconds)
"""
import time
from fractions import Fraction

from rzsteiner import build_catalog, generate_skutella, metric_closure
from rzsteiner.oracle import brute_force_opt, build_partition_lp, opt_r_dp, skutella_point, solve_partition_lp

inst = generate_skutella()
print(f"{inst.n} vertices, {len(inst.terminals)} terminals, {len(inst.edges)} edges")

catalog = build_catalog(metric_closure(inst), 5)
sizes = {}
for comp in catalog.components:
    sizes[comp.size] = sizes.get(comp.size, 0) + 1
print("catalog by terminal count:", dict(sorted(sizes.items())))

lp = build_partition_lp(catalog, catalog.pair_indices)
x = skutella_point(lp)
print(f"{len(lp.rhs)} partition rows over {len(lp.ground)} terminals")
print("quarter point feasible:", lp.is_feasible(x), " value:", lp.objective(x))

start = time.perf_counter()
res = solve_partition_lp(catalog)
print(f"LP optimum {res.value} after {res.rounds} cutting rounds ({time.perf_counter() - start:.1f}s)")

opt_r, witness = opt_r_dp(catalog)
opt, _ = brute_force_opt(inst)
print("optimal 5-restricted tree:", opt_r, "using terminal sets",
      [sorted(inst.label(catalog.to_original(t)) for t in catalog.components[k].terminals) for k in witness])
print("optimal Steiner tree:", opt)
print("gap:", opt_r / res.value, "=", float(opt_r / res.value))
assert opt_r / res.value == Fraction(8, 7)
