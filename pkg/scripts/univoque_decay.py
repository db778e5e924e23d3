"""Fraction of sampled points whose greedy and lazy prefixes agree, against depth."""
import argparse

from qexp import new_base, reference_base
from qexp.ergodic import univoque_profile


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q0", type=float)
    ap.add_argument("--q1", type=float)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    Q = new_base(args.q0, args.q1) if args.q0 else reference_base()
    depths = (4, 8, 12, 16, 24, 32, 48, 64)
    for rep in univoque_profile(Q, depths, args.samples, args.seed):
        print(f"depth {rep.depth:3d}  {rep.mean:.5f} +- {rep.stderr:.5f}")


if __name__ == "__main__":
    main()
