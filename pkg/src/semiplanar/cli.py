"""Command line entry point: ``semiplanar <command> [options]``.

Every output embeds the resolved RunConfig; nothing time-dependent is
written, so identical configs give byte-identical files.

Exit status: 0 success, 1 a numeric bound failed, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import tilings
from .analysis import SUITES, SuiteParams, deepest_vertex, estimate_dimension, run_suite
from .extension import extend
from .graph import InsufficientTruncation, SemiplanarGraph, hop_distances, is_nonneg_curvature, \
    total_angle, vertex_curvature
from .laplace import NonConvergence, ScalarField, ball_problem, solve_dirichlet
from .surface import NotDevelopable, SurfaceMesh, planar_layout, surface_ball_volume

COMMANDS = ("gen", "curvature", "solve", "extend", "surface", "verify", "dim")


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    kind: str | None = None
    radius: int | None = None
    p: int | None = None
    out: str | None = None
    format: str = "csv"
    ball: str | None = None
    boundary: str | None = None
    field: str | None = None
    ball_volume: str | None = None
    suite: str = "all"
    K: int = 64
    M: int = 4096
    h: float = 0.05
    d: float = 1.0
    radii: str = "4,6,8,10"
    tau: float = 1e-8
    eps: float = 0.25
    beta: float = 1.5
    delta: float = 0.1
    tol: float = 1e-12
    fields: int = 20
    seed: int = 0

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.K < 1 or self.M < 8 * self.K:
            raise ValueError(f"need K >= 1 and M >= 8K (got K={self.K}, M={self.M})")
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not 0 < self.tau < 1:
            raise ValueError("tau must lie in (0, 1)")
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        if self.beta < 1 or self.delta <= 0 or self.d < 0:
            raise ValueError("need beta >= 1, delta > 0, d >= 0")
        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"suite must be one of all, {', '.join(SUITES)}")
        if self.fields < 1:
            raise ValueError("fields must be positive")

    def echo(self) -> dict:
        return {k: v for k, v in sorted(asdict(self).items())}


class InputError(ValueError):
    pass


def _pair(text: str | None, name: str) -> tuple[int, float]:
    if not text:
        raise InputError(f"--{name} is required as p,R")
    try:
        a, b = text.split(",")
        return int(a), float(b)
    except ValueError:
        raise InputError(f"--{name} must look like p,R (got {text!r})") from None


def _radii(text: str) -> list[int]:
    try:
        return [int(r) for r in text.split(",") if r.strip()]
    except ValueError:
        raise InputError(f"--radii must be comma separated integers (got {text!r})") from None


def _graph(cfg: RunConfig) -> tuple[SemiplanarGraph, int]:
    """Graph and center: from a file (stored center or deepest vertex) or a tiling spec."""
    if cfg.graph:
        try:
            text = Path(cfg.graph).read_text()
        except OSError as exc:
            raise InputError(f"cannot read graph file: {exc}") from exc
        graph = tilings.loads(text)
        center = json.loads(text).get("center")
        if cfg.p is not None:
            center = cfg.p
        elif not isinstance(center, int):
            center = deepest_vertex(graph)
    elif cfg.kind:
        if cfg.radius is None:
            raise InputError("--radius is required with --kind")
        t = tilings.generate(cfg.kind, cfg.radius)
        graph, center = t.graph, (t.center if cfg.p is None else cfg.p)
    else:
        raise InputError("give --graph FILE or --kind KIND --radius R")
    if not 0 <= center < graph.vertex_count:
        raise InputError(f"vertex {center} is not in the graph")
    return graph, int(center)


def _csv(cfg: RunConfig, header, rows, notes=()) -> str:
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(cfg.echo(), sort_keys=True)}\n")
    for note in notes:
        buf.write(f"# note: {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(cfg: RunConfig, data: dict) -> str:
    return json.dumps({"config": cfg.echo(), **data}, sort_keys=False, separators=(",", ":")) + "\n"


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _f(x) -> str:
    return f"{float(x):.10g}"


# commands

def _gen(cfg: RunConfig) -> int:
    if not cfg.kind or cfg.radius is None:
        raise InputError("gen needs --kind and --radius")
    t = tilings.generate(cfg.kind, cfg.radius)
    data = t.graph.to_dict()
    data["center"] = t.center
    data["config"] = cfg.echo()
    _emit(cfg, json.dumps(data, separators=(",", ":")) + "\n")
    return 0


def _curvature(cfg: RunConfig) -> int:
    graph, _ = _graph(cfg)
    ok, bad, skipped = is_nonneg_curvature(graph)
    inner = [v for v in range(graph.vertex_count) if graph.is_interior(v)]
    rows = [[v, str(vertex_curvature(graph, v)), _f(total_angle(graph, v))] for v in inner]
    if cfg.format == "json":
        _emit(cfg, _json(cfg, {"curvature": {str(v): c for v, c, _ in rows},
                               "nonnegative": ok, "negative": bad,
                               "boundary_skipped": skipped}))
    else:
        notes = [f"nonnegative={ok}", f"boundary_skipped={len(skipped)}"]
        _emit(cfg, _csv(cfg, ["vertex", "curvature", "total_angle"], rows, notes))
    return 0


def _boundary_values(cfg: RunConfig, graph: SemiplanarGraph, p: int):
    spec = cfg.boundary
    if not spec:
        raise InputError("--boundary is required (expression in x, y, v or a field file)")
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        try:
            field = ScalarField.from_dict(json.loads(path.read_text()))
        except (OSError, KeyError, ValueError, TypeError) as exc:
            raise InputError(f"cannot read boundary field file: {exc}") from exc
        if len(field.values) != graph.vertex_count:
            raise InputError("boundary field length does not match the graph")
        return field.values
    try:
        xy = planar_layout(graph, p)
    except NotDevelopable:
        xy = np.full((graph.vertex_count, 2), np.nan)
    names = {k: getattr(np, k) for k in ("sin", "cos", "exp", "log", "sqrt", "abs", "pi", "tanh")}
    names.update(x=xy[:, 0], y=xy[:, 1], v=np.arange(graph.vertex_count, dtype=float))
    try:
        vals = eval(compile(spec, "<boundary>", "eval"), {"__builtins__": {}}, names)
    except Exception as exc:
        raise InputError(f"cannot evaluate boundary expression {spec!r}: {exc}") from exc
    return np.broadcast_to(np.asarray(vals, float), (graph.vertex_count,)).copy()


def _solve(cfg: RunConfig) -> int:
    graph, _ = _graph(cfg)
    p, R = _pair(cfg.ball, "ball")
    values = _boundary_values(cfg, graph, p)
    shell = np.flatnonzero(hop_distances(graph, p) == int(R) + 1)
    if not np.all(np.isfinite(values[shell])):
        raise InputError("boundary data undefined on the sphere (non-flat graph needs a field file)")
    field, report = solve_dirichlet(ball_problem(graph, p, int(R), values, cfg.tol))
    data = field.to_dict()
    data["report"] = {"iterations": report.iterations, "residual": _f(report.residual),
                      "method": report.method}
    data["config"] = cfg.echo()
    _emit(cfg, json.dumps(data, separators=(",", ":")) + "\n")
    return 0


def _extend(cfg: RunConfig) -> int:
    graph, _ = _graph(cfg)
    if not cfg.field:
        raise InputError("extend needs --field FILE")
    try:
        field = ScalarField.from_dict(json.loads(Path(cfg.field).read_text()))
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise InputError(f"cannot read field file: {exc}") from exc
    ext = extend(graph, field, cfg.K, cfg.M)
    data = ext.to_dict()
    data["config"] = cfg.echo()
    _emit(cfg, json.dumps(data, separators=(",", ":")) + "\n")
    return 0


def _surface(cfg: RunConfig) -> int:
    graph, _ = _graph(cfg)
    p, R = _pair(cfg.ball_volume, "ball-volume")
    mesh = SurfaceMesh(graph, cfg.h)
    value, eps = surface_ball_volume(mesh, p, R)
    if cfg.format == "json":
        _emit(cfg, _json(cfg, {"rows": [{"p": p, "R": R, "value": _f(value), "eps_quad": _f(eps)}]}))
    else:
        _emit(cfg, _csv(cfg, ["p", "R", "value", "eps_quad"], [[p, f"{R:g}", _f(value), _f(eps)]]))
    return 0


_HEADER = ["inequality_id", "graph", "params", "measured", "bound", "pass"]


def _verify(cfg: RunConfig) -> int:
    graph, p = _graph(cfg)
    params = SuiteParams(h=cfg.h, K=cfg.K, M=cfg.M, seed=cfg.seed, fields=cfg.fields, d=cfg.d,
                         beta=cfg.beta, delta=cfg.delta, eps=cfg.eps, tau=cfg.tau,
                         radii=tuple(_radii(cfg.radii)))
    reports, notes = run_suite(cfg.suite, graph, p, params)
    if cfg.format == "json":
        _emit(cfg, _json(cfg, {"rows": [dict(zip(_HEADER, r.row())) for r in reports],
                               "notes": notes}))
    else:
        _emit(cfg, _csv(cfg, _HEADER, [r.row() for r in reports], notes))
    return 1 if any(r.passed is False for r in reports) else 0


def _dim(cfg: RunConfig) -> int:
    graph, p = _graph(cfg)
    est = estimate_dimension(graph, cfg.d, p, _radii(cfg.radii), cfg.tau)
    taus = list(est.sensitivity)
    if cfg.format == "json":
        _emit(cfg, _json(cfg, {"d": cfg.d, "p": p, "k": est.k, "candidates": est.candidates,
                               "sensitivity": {f"{t:g}": k for t, k in est.sensitivity.items()},
                               "diagnostics": [{"index": x["index"], "pass": x["pass"],
                                                "C": [_f(c) for c in x["C"]]}
                                               for x in est.diagnostics]}))
    else:
        header = ["d", "p", "radii", "tau", "k", "candidates"] + [f"rank@{t:g}" for t in taus]
        row = [f"{cfg.d:g}", p, "/".join(map(str, est.radii)), f"{cfg.tau:g}", est.k,
               est.candidates] + [est.sensitivity[t] for t in taus]
        _emit(cfg, _csv(cfg, header, [row]))
    return 0


_DISPATCH = {"gen": _gen, "curvature": _curvature, "solve": _solve, "extend": _extend,
             "surface": _surface, "verify": _verify, "dim": _dim}


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        return _DISPATCH[cfg.command](cfg)
    except (InputError, ValueError, KeyError, InsufficientTruncation, NonConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semiplanar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, out_default_fmt="csv"):
        sp.add_argument("--graph", help="graph JSON file")
        sp.add_argument("--kind", help="tiling pattern instead of a file, e.g. 4.8.8")
        sp.add_argument("--radius", type=int, help="hop radius for --kind")
        sp.add_argument("--p", type=int, help="center vertex (default: stored or deepest)")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=out_default_fmt)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("gen", help="generate a tiling truncation")
    common(sp, "json")
    sp = sub.add_parser("curvature", help="exact curvature of interior vertices")
    common(sp)
    sp = sub.add_parser("solve", help="Dirichlet problem on a graph ball")
    common(sp, "json")
    sp.add_argument("--ball", help="p,R")
    sp.add_argument("--boundary", help="expression in x, y, v or a field JSON file")
    sp.add_argument("--tol", type=float, default=1e-12)
    sp = sub.add_parser("extend", help="extend a vertex field to the surface")
    common(sp, "json")
    sp.add_argument("--field", help="field JSON file")
    sp.add_argument("--K", type=int, default=64)
    sp.add_argument("--M", type=int, default=4096)
    sp = sub.add_parser("surface", help="geodesic ball volume on the polygonal surface")
    common(sp)
    sp.add_argument("--ball-volume", dest="ball_volume", help="p,R")
    sp.add_argument("--h", type=float, default=0.05)
    sp = sub.add_parser("verify", help="run inequality suites")
    common(sp)
    sp.add_argument("--suite", default="all", choices=("all",) + SUITES)
    for name, typ, default in (("K", int, 64), ("M", int, 4096), ("h", float, 0.05),
                               ("d", float, 1.0), ("tau", float, 1e-8), ("eps", float, 0.25),
                               ("beta", float, 1.5), ("delta", float, 0.1), ("fields", int, 20)):
        sp.add_argument(f"--{name}", type=typ, default=default)
    sp.add_argument("--radii", default="4,6,8,10")
    sp = sub.add_parser("dim", help="estimate the dimension of growth-d harmonic functions")
    common(sp)
    sp.add_argument("--d", type=float, default=1.0)
    sp.add_argument("--radii", default="4,6,8,10")
    sp.add_argument("--tau", type=float, default=1e-8)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in known})


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
