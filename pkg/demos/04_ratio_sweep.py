"""Measured ratios against the guarantee, by neighbourhood size b.

For each b, generate instances with up to six terminals, run the loop with
r = |R| and compare with the exact optimal r-restricted tree.  Also report
the worst integrality gap of the pairs-only LP next to (2b+1)/(b+1).

    python demos/04_ratio_sweep.py [instances-per-b]
"""
import sys
from fractions import Fraction

from rzsteiner import GeneratorSpec, GuardError, generate_random_bquasi
from rzsteiner.oracle import integrality_gap, optimal_r_tree
from rzsteiner.solver import rz_solve, theorem_bound

count = int(sys.argv[1]) if len(sys.argv) > 1 else 40

print(f"{'b':>2} {'runs':>5} {'worst ratio':>12} {'guarantee':>10} {'worst gap':>10} {'gap bound':>10}")
for b in range(1, 6):
    worst_ratio, worst_gap, runs = Fraction(1), Fraction(1), 0
    for seed in range(count):
        k = 2 + seed % 5
        inst = generate_random_bquasi(GeneratorSpec(n=k + b + seed % (b + 1), b=b, seed=seed,
                                                    terminals=k, cost_range=(1, 10)))
        report = rz_solve(inst, max(2, k))
        opt_r, _ = optimal_r_tree(report.catalog)
        worst_ratio = max(worst_ratio, report.raw_cost / opt_r)
        try:
            worst_gap = max(worst_gap, integrality_gap(report.catalog)[2])
        except GuardError:
            pass
        runs += 1
    print(f"{b:>2} {runs:>5} {float(worst_ratio):>12.4f} {float(theorem_bound(b)):>10.4f} "
          f"{float(worst_gap):>10.4f} {float(Fraction(2 * b + 1, b + 1)):>10.4f}")
