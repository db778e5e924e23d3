"""Print the greedy and lazy invariant densities at the reference base."""
import argparse

from qexp import invariant_densities, reference_base
from qexp.density import DEFAULT_DEPTH


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    args = ap.parse_args()

    Q = reference_base()
    d = invariant_densities(Q, args.depth)
    print(f"q0={Q.q0:.12g} q1={Q.q1:.12g} r={Q.r:.6g} ell={Q.ell:.6g} right={Q.right:.6g}")
    for kind in ("greedy", "lazy"):
        h = d.density(kind)
        print(f"\n{kind}: mean {h.first_moment():.6f}")
        for a, b, v in h.support_pieces():
            print(f"  [{a:.6f}, {b:.6f})  {v:.6f}")


if __name__ == "__main__":
    main()
