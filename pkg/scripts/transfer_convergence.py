"""L1 increments of the transfer operator started from the uniform density."""
import argparse

from qexp import FPOperator, StepFunction, invariant_densities, new_base, reference_base
from qexp.transfer import iterate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q0", type=float)
    ap.add_argument("--q1", type=float)
    ap.add_argument("--kind", default="greedy", choices=["greedy", "lazy"])
    ap.add_argument("--n", type=int, default=60)
    args = ap.parse_args()

    Q = new_base(args.q0, args.q1) if args.q0 else reference_base()
    h = invariant_densities(Q).density(args.kind)
    res = iterate(FPOperator(Q, args.kind), StepFunction.constant(Q.right, 1 / Q.right), args.n, stop_early=False)
    print("n  increment  breakpoints  outside")
    for i, (inc, nb, m) in enumerate(zip(res.increments, res.breakpoint_counts, res.mass_outside), 1):
        print(f"{i:3d}  {inc:.3e}  {nb:6d}  {m:.2e}")
    print(f"L1 distance to invariant density: {res.final.l1_distance(h):.3e}")


if __name__ == "__main__":
    main()
