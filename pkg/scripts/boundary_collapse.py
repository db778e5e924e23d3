"""Distance between greedy and lazy densities as (q0, 2) approaches the boundary."""
from qexp import invariant_densities, new_base

for eps in (0.5, 0.2, 0.1, 0.05, 0.02, 0.01):
    d = invariant_densities(new_base(2 - eps, 2.0), 300)
    print(f"q0 = {2 - eps:.3f}   L1(h_greedy, h_lazy) = {d.h_greedy.l1_distance(d.h_lazy):.5f}")
