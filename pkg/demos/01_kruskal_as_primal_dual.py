"""Kruskal's algorithm read as a primal-dual method.

Run the MST on a small graph and print the partition timeline: every time
two components merge, the current partition has been "alive" for y time
units.  Summing (blocks - 1) * y over the timeline gives back the tree cost,
and an edge's total crossing weight never exceeds its cost.

    python demos/01_kruskal_as_primal_dual.py
"""
from fractions import Fraction

from rzsteiner import Instance, kruskal_dual
from rzsteiner.graph import edge_cost_sum

inst = Instance.build(5, range(5), [
    (0, 1, 2), (1, 2, 3), (0, 2, 4), (2, 3, "5/2"), (3, 4, 1), (1, 4, 6),
])
tree, timeline = kruskal_dual(inst)

print("tree edges:", [(u, v, str(c)) for u, v, c in tree])
print()
print(f"{'partition':<28} {'blocks':>6} {'y':>6}")
for partition, y in timeline.partitions():
    blocks = " ".join("{" + ",".join(map(str, sorted(b))) + "}" for b in partition.blocks)
    print(f"{blocks:<28} {partition.rank:>6} {str(y):>6}")
print()
print("tree cost       ", edge_cost_sum(tree))
print("dual objective  ", timeline.objective())

# every edge: the partitions that separate its ends carry at most its cost
for u, v, c in inst.edges:
    crossing = sum((y for p, y in timeline.partitions() if p.block_index[u] != p.block_index[v]), Fraction(0))
    tight = "tight" if crossing == c else ""
    print(f"edge {u}-{v}  cost {str(c):>4}  crossing {str(crossing):>4}  {tight}")
