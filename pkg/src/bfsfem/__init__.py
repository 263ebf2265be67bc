"""Bogner-Fox-Schmit C1 rectangular finite elements.

Reference Hermite cubics, the 16 BFS shape functions, rectangular meshes,
C1 fields with batch evaluation, Gauss quadrature and Sobolev integrals.
"""
from .basis import ElementSize, dof_scale, index_map, shapeder, shapefun
from .field import (
    C1Field,
    eval_at_ref_points,
    eval_derivatives_at_ref_points,
    eval_on_edges,
    gather,
    interpolate,
    scatter,
)
from .functions import QUARTIC_EXACT, AnalyticField, Polynomial, quartic, x2y2
from .hermite1d import IntervalMap, eval_actual, eval_ref
from .integrals import IntegralValues, convergence_study, integrals, load_functional, norms
from .kernels import BACKEND
from .mesh import (
    MeshError,
    RectMesh,
    edge_midpoints,
    element_midpoints,
    level_mesh,
    load_mesh,
    refine,
    uniform_mesh,
    write_mesh,
)
from .quadrature import QuadratureRule, gauss_rule, integrate_on_mesh

__version__ = "0.1.0"

__all__ = [
    "AnalyticField", "BACKEND", "C1Field", "ElementSize", "IntegralValues", "IntervalMap",
    "MeshError", "Polynomial", "QUARTIC_EXACT", "QuadratureRule", "RectMesh",
    "convergence_study", "dof_scale", "edge_midpoints", "element_midpoints", "eval_actual",
    "eval_at_ref_points", "eval_derivatives_at_ref_points", "eval_on_edges", "eval_ref",
    "gather", "gauss_rule", "index_map", "integrals", "integrate_on_mesh", "interpolate",
    "level_mesh", "load_functional", "load_mesh", "norms", "quartic", "refine", "scatter",
    "shapeder", "shapefun", "uniform_mesh", "write_mesh", "x2y2",
]
