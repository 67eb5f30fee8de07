"""Discrete harmonic analysis on semiplanar graphs with nonnegative curvature."""

from .graph import (GraphValidationError, InsufficientTruncation, SemiplanarGraph, graph_ball,
                    graph_distance, hop_distances, is_nonneg_curvature, total_angle, validate,
                    vertex_curvature)
from .laplace import DirichletProblem, ScalarField, ball_problem, laplacian, solve_dirichlet
from .tilings import TilingSpec, generate, load, loads, polyhedron, save
from .surface import SurfaceMesh, SurfacePoint, face_geometry, planar_layout, surface_ball_volume
from .extension import ExtendedField, evaluate, extend

__all__ = [
    "GraphValidationError", "InsufficientTruncation", "SemiplanarGraph", "graph_ball",
    "graph_distance", "hop_distances", "is_nonneg_curvature", "total_angle", "validate",
    "vertex_curvature", "DirichletProblem", "ScalarField", "ball_problem", "laplacian",
    "solve_dirichlet", "TilingSpec", "generate", "load", "loads", "polyhedron", "save",
    "SurfaceMesh", "SurfacePoint", "face_geometry", "planar_layout", "surface_ball_volume",
    "ExtendedField", "evaluate", "extend",
]
