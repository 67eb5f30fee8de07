"""Harnack and graph mean value ratios for a seeded family of harmonic functions."""
import argparse

from semiplanar.analysis import harmonic_family, verify_harnack, verify_mvi_graph
from semiplanar.tilings import generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", default="4^4")
    ap.add_argument("--radius", type=int, default=18)
    ap.add_argument("--fields", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    t = generate(args.kind, args.radius)
    solve = args.radius - 4
    positive = harmonic_family(t.graph, t.center, solve, args.fields, args.seed, positive=True)
    signed = harmonic_family(t.graph, t.center, solve, args.fields, args.seed)
    print("R,harnack,mvi")
    for R in range(2, solve // 2 + 1, 2):
        h = verify_harnack(t.graph, t.center, R, positive, solve)
        m = verify_mvi_graph(t.graph, t.center, R, signed)
        print(f"{R},{h.measured:.6f},{m.measured:.6f}")


if __name__ == "__main__":
    main()
