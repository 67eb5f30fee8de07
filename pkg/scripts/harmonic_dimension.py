"""Numerical dimension of harmonic functions of polynomial growth on a tiling."""
import argparse

from semiplanar.analysis import estimate_dimension
from semiplanar.tilings import generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kind", default="4^4")
    ap.add_argument("--radius", type=int, default=14)
    ap.add_argument("--growth", default="0.5,1,1.5,2")
    ap.add_argument("--radii", default="4,6,8,10")
    args = ap.parse_args()
    t = generate(args.kind, args.radius)
    radii = [int(r) for r in args.radii.split(",")]
    print("d,k,candidates,sensitivity")
    for d in (float(x) for x in args.growth.split(",")):
        est = estimate_dimension(t.graph, d, t.center, radii)
        sens = ";".join(f"{tau:g}:{k}" for tau, k in sorted(est.sensitivity.items()))
        print(f"{d:g},{est.k},{est.candidates},{sens}")


if __name__ == "__main__":
    main()
