"""C1 fields on rectangular meshes.

A field stores four nodal DOFs per node, columns (v, vx, vy, vxy).
Per-element coefficient rows use the basis ordering: values at the four
local nodes, then x-derivatives, y-derivatives and mixed derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .basis import shape_tables, shapefun
from .functions import AnalyticField
from .mesh import LOCAL_NODES, LOCAL_SIDES, RectMesh

__all__ = [
    "C1Field",
    "Derivatives",
    "FD_STEP",
    "interpolate",
    "gather",
    "scatter",
    "eval_at_ref_points",
    "eval_derivatives_at_ref_points",
    "eval_all_at_ref_points",
    "eval_on_edges",
    "element_midpoint_values",
    "edge_midpoint_values",
]

FD_STEP = 1e-5  # relative to min(hx, hy)
COMPONENTS = ("v", "vx", "vy", "vxy")


class Derivatives(NamedTuple):
    dx: np.ndarray
    dy: np.ndarray
    dxx: np.ndarray
    dyy: np.ndarray
    dxy: np.ndarray


@dataclass(frozen=True, eq=False)
class C1Field:
    mesh: RectMesh
    dofs: np.ndarray

    def __post_init__(self):
        dofs = np.array(self.dofs, dtype=float)
        if dofs.shape != (self.mesh.n_nodes, 4):
            raise ValueError(f"dofs must have shape ({self.mesh.n_nodes}, 4), got {dofs.shape}")
        if not np.all(np.isfinite(dofs)):
            node = int(np.argmax(~np.all(np.isfinite(dofs), axis=1)))
            raise ValueError(f"non-finite DOF at node {node}")
        dofs.flags.writeable = False
        object.__setattr__(self, "dofs", dofs)

    def scaled(self, c: float) -> "C1Field":
        return C1Field(self.mesh, c * self.dofs)

    @classmethod
    def constant(cls, mesh: RectMesh, value: float = 1.0) -> "C1Field":
        dofs = np.zeros((mesh.n_nodes, 4))
        dofs[:, 0] = value
        return cls(mesh, dofs)


def _call(func, x, y, name, nodes) -> np.ndarray:
    out = np.broadcast_to(np.asarray(func(x, y), dtype=float), x.shape)
    bad = ~np.isfinite(out)
    if bad.any():
        k = int(np.argmax(bad))
        raise FloatingPointError(f"{name} is not finite at node {k} {tuple(nodes[k])}")
    return out


def interpolate(f: AnalyticField, mesh: RectMesh) -> C1Field:
    """Nodal interpolant: (v, vx, vy, vxy) of ``f`` at every node.

    Absent derivatives are replaced by central differences with step
    ``FD_STEP * min(hx, hy)``.
    """
    nodes = mesh.nodes
    x, y = nodes[:, 0], nodes[:, 1]
    d = FD_STEP * min(mesh.hx, mesh.hy)
    v = _call(f.v, x, y, "v", nodes)
    if f.vx is not None:
        vx = _call(f.vx, x, y, "vx", nodes)
    else:
        vx = (_call(f.v, x + d, y, "v", nodes) - _call(f.v, x - d, y, "v", nodes)) / (2 * d)
    if f.vy is not None:
        vy = _call(f.vy, x, y, "vy", nodes)
    else:
        vy = (_call(f.v, x, y + d, "v", nodes) - _call(f.v, x, y - d, "v", nodes)) / (2 * d)
    if f.vxy is not None:
        vxy = _call(f.vxy, x, y, "vxy", nodes)
    elif f.vx is not None:
        vxy = (_call(f.vx, x, y + d, "vx", nodes) - _call(f.vx, x, y - d, "vx", nodes)) / (2 * d)
    elif f.vy is not None:
        vxy = (_call(f.vy, x + d, y, "vy", nodes) - _call(f.vy, x - d, y, "vy", nodes)) / (2 * d)
    else:
        vxy = (
            _call(f.v, x + d, y + d, "v", nodes)
            - _call(f.v, x + d, y - d, "v", nodes)
            - _call(f.v, x - d, y + d, "v", nodes)
            + _call(f.v, x - d, y - d, "v", nodes)
        ) / (4 * d * d)
    return C1Field(mesh, np.column_stack([v, vx, vy, vxy]))


def gather(field: C1Field) -> np.ndarray:
    """Element coefficient matrix, shape (ne, 16)."""
    return kernels.gather(field.dofs, field.mesh.elements)


def scatter(mesh: RectMesh, coeffs: np.ndarray) -> C1Field:
    """Inverse of :func:`gather`, averaging the copies of each nodal DOF."""
    coeffs = np.asarray(coeffs, dtype=float).reshape(mesh.n_elements, 4, 4)  # (e, c, k)
    acc = np.zeros((mesh.n_nodes, 4))
    count = np.zeros(mesh.n_nodes)
    np.add.at(acc, mesh.elements.ravel(), coeffs.transpose(0, 2, 1).reshape(-1, 4))
    np.add.at(count, mesh.elements.ravel(), 1.0)
    return C1Field(mesh, acc / np.maximum(count, 1.0)[:, None])


def eval_at_ref_points(field: C1Field, ref_points) -> np.ndarray:
    """Field values, shape (ne, np), at reference points mapped into every element."""
    table = shapefun(ref_points, field.mesh.size)
    return kernels.evaluate(field.dofs, field.mesh.elements, table)


def eval_derivatives_at_ref_points(field: C1Field, ref_points) -> Derivatives:
    """The five derivative matrices (V1, V2, V11, V22, V12), each (ne, np)."""
    tables = shape_tables(ref_points, field.mesh.size)
    # shape_tables order: v, dx, dy, dxx, dyy, dxy
    return Derivatives(*(kernels.evaluate(field.dofs, field.mesh.elements, t) for t in tables[1:]))


def eval_all_at_ref_points(field: C1Field, ref_points) -> np.ndarray:
    """Value and five derivatives stacked, shape (6, ne, np)."""
    tables = shape_tables(ref_points, field.mesh.size)
    return np.stack([kernels.evaluate(field.dofs, field.mesh.elements, t) for t in tables])


def _edge_owner(mesh: RectMesh, element: str) -> tuple[np.ndarray, np.ndarray]:
    edges = mesh.edges
    left, right = edges.left, edges.right
    if element == "first":
        use_left = (left >= 0) & ((right < 0) | (left < right))
    elif element == "second":
        use_left = (left >= 0) & (right >= 0) & (left > right)
        use_left |= right < 0
    elif element == "left":
        use_left = left >= 0
    elif element == "right":
        use_left = right < 0
    else:
        raise ValueError(f"element must be 'first', 'second', 'left' or 'right', got {element!r}")
    owner = np.where(use_left, left, right)
    side = np.where(use_left, edges.local_side[:, 0], edges.local_side[:, 1])
    return owner, side


def eval_on_edges(field: C1Field, t, element: str = "first", derivatives: bool = False) -> np.ndarray:
    """Evaluate along every edge at parameters ``t`` from node_a to node_b.

    Each edge is evaluated from one incident element: by default the one
    with the lower index. ``element="second"`` picks the other one for
    interior edges (boundary edges have only one). Returns (nedge, nt), or
    (6, nedge, nt) with value and the five derivatives if ``derivatives``.
    """
    mesh = field.mesh
    t = np.atleast_1d(np.asarray(t, dtype=float))
    owner, side = _edge_owner(mesh, element)
    edge_nodes = mesh.edges.nodes
    first_local = LOCAL_SIDES[side, 0]
    reverse = mesh.elements[owner, first_local] != edge_nodes[:, 0]
    out = np.empty((6, len(owner), len(t)))
    for s in range(4):
        for rev in (False, True):
            group = np.flatnonzero((side == s) & (reverse == rev))
            if not len(group):
                continue
            p, q = LOCAL_SIDES[s][::-1] if rev else LOCAL_SIDES[s]
            ref = np.outer(1 - t, LOCAL_NODES[p]) + np.outer(t, LOCAL_NODES[q])
            tables = shape_tables(ref, mesh.size)
            slots = tables if derivatives else tables[:1]
            for k, table in enumerate(slots):
                out[k, group] = kernels.evaluate(field.dofs, mesh.elements[owner[group]], table)
    return out if derivatives else out[0]


def element_midpoint_values(field: C1Field, derivatives: bool = False) -> np.ndarray:
    """Values (ne,) at element centres, or (6, ne) including derivatives."""
    vals = eval_all_at_ref_points(field, [[0.5, 0.5]])[:, :, 0]
    return vals if derivatives else vals[0]


def edge_midpoint_values(field: C1Field, derivatives: bool = False) -> np.ndarray:
    vals = eval_on_edges(field, [0.5], derivatives=True)[:, :, 0]
    return vals if derivatives else vals[0]
