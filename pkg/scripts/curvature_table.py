"""Exact curvature and total angle at the center of every built-in tiling and polyhedron."""
import argparse

from semiplanar.graph import total_angle, vertex_curvature
from semiplanar.tilings import PATTERNS, generate, polyhedron


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=int, default=4)
    args = ap.parse_args()
    print("graph,vertices,curvature,total_angle")
    for kind in PATTERNS:
        t = generate(kind, args.radius)
        v = t.center
        print(f"{kind},{t.graph.vertex_count},{vertex_curvature(t.graph, v)},"
              f"{total_angle(t.graph, v):.12f}")
    for kind in ("tetrahedron", "cube", "octahedron", "icosahedron", "dodecahedron"):
        g = polyhedron(kind)
        print(f"{kind},{g.vertex_count},{vertex_curvature(g, 0)},{total_angle(g, 0):.12f}")


if __name__ == "__main__":
    main()
