"""Graph ball volumes and the volume comparison ratio for the flat tilings."""
import argparse

from semiplanar.analysis import verify_graph_volume
from semiplanar.graph import graph_ball
from semiplanar.tilings import PATTERNS, generate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=16)
    ap.add_argument("--kinds", default=",".join(PATTERNS))
    args = ap.parse_args()
    radii = range(1, args.radius - 2)
    print("kind,R,volume,volume/R^2")
    for kind in args.kinds.split(","):
        t = generate(kind, args.radius)
        for R in radii:
            vol = graph_ball(t.graph, t.center, R).volume
            print(f"{kind},{R},{vol},{vol / R ** 2:.4f}")
        rvc, vd = verify_graph_volume(t.graph, t.center, radii)
        print(f"# {kind}: worst comparison ratio {rvc.measured:.4f}, doubling {vd.measured:.4f}")


if __name__ == "__main__":
    main()
