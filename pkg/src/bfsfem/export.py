"""Text exports: CSV tables, field files and legacy VTK structured grids.

Floats are written with 17 significant digits so output round-trips and
is byte-identical between runs.
"""
from __future__ import annotations

from typing import Iterable, Sequence, TextIO

import numpy as np

from .basis import DERIV_SLOTS, shape_tables
from .field import C1Field, eval_all_at_ref_points, eval_on_edges
from .mesh import RectMesh

__all__ = [
    "fmt",
    "write_csv",
    "write_field",
    "read_field",
    "write_table_csv",
    "write_samples_csv",
    "write_element_midpoints_csv",
    "write_edge_midpoints_csv",
    "write_vtk_structured",
]

FIELD_COLUMNS = ("v", "vx", "vy", "vxx", "vyy", "vxy")
TABLE_SLOTS = ("value",) + DERIV_SLOTS


def fmt(x) -> str:
    return format(float(x), ".17g")


def _cell(c) -> str:
    if isinstance(c, str):
        return c
    if isinstance(c, (int, np.integer)):
        return str(int(c))
    return fmt(c)


def write_csv(stream: TextIO, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_cell(c) for c in row) + "\n")


def write_field(field: C1Field, stream: TextIO) -> None:
    """Field file: ``dofs <n>`` then n lines ``v vx vy vxy``."""
    stream.write(f"dofs {len(field.dofs)}\n")
    for row in field.dofs:
        stream.write(" ".join(fmt(x) for x in row) + "\n")


def read_field(mesh: RectMesh, stream: TextIO) -> C1Field:
    rows, count = [], None
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if count is None:
            if len(parts) != 2 or parts[0] != "dofs":
                raise ValueError(f"line {lineno}: expected 'dofs <n>'")
            count = int(parts[1])
            continue
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 4 values, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
    if count is None or len(rows) != count:
        raise ValueError(f"expected {count} DOF rows, got {len(rows)}")
    if count != mesh.n_nodes:
        raise ValueError(f"field has {count} rows but the mesh has {mesh.n_nodes} nodes")
    return C1Field(mesh, np.array(rows).reshape(-1, 4))


def write_table_csv(stream: TextIO, points, size, indices: Sequence[int] = range(1, 17)) -> None:
    """Shape/derivative table as ``i,x,y,slot,value`` rows (i is 1-based)."""
    tables = shape_tables(points, size)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    rows = (
        (i, pts[p, 0], pts[p, 1], TABLE_SLOTS[s], tables[s, i - 1, p])
        for i in indices
        for s in range(len(TABLE_SLOTS))
        for p in range(len(pts))
    )
    write_csv(stream, ("i", "x", "y", "slot", "value"), rows)


def write_samples_csv(stream: TextIO, field: C1Field, ref_points) -> None:
    """``element,x,y,v,vx,vy,vxx,vyy,vxy`` at reference points in every element."""
    vals = eval_all_at_ref_points(field, ref_points)  # (6, ne, np)
    xy = field.mesh.map_points(ref_points)
    ne, npts = vals.shape[1:]
    rows = (
        (e, xy[e, p, 0], xy[e, p, 1], *vals[:, e, p])
        for e in range(ne)
        for p in range(npts)
    )
    write_csv(stream, ("element", "x", "y") + FIELD_COLUMNS, rows)


def write_element_midpoints_csv(stream: TextIO, field: C1Field) -> None:
    mid = field.mesh.map_points([[0.5, 0.5]])[:, 0, :]
    vals = eval_all_at_ref_points(field, [[0.5, 0.5]])[:, :, 0]
    rows = ((e, *mid[e], *vals[:, e]) for e in range(field.mesh.n_elements))
    write_csv(stream, ("element", "x", "y") + FIELD_COLUMNS, rows)


def write_edge_midpoints_csv(stream: TextIO, field: C1Field) -> None:
    mesh = field.mesh
    mid = mesh.nodes[mesh.edges.nodes].mean(axis=1)
    vals = eval_on_edges(field, [0.5], derivatives=True)[:, :, 0]
    owner = mesh.edges.elements[:, 0]
    rows = ((k, owner[k], *mid[k], *vals[:, k]) for k in range(mesh.n_edges))
    write_csv(stream, ("edge", "element", "x", "y") + FIELD_COLUMNS, rows)


def write_vtk_structured(stream: TextIO, field: C1Field, title: str = "bfsfem field") -> None:
    """Legacy ASCII VTK STRUCTURED_GRID with the four nodal DOFs as point scalars.

    Only full tensor grids with row-major node numbering can be written.
    """
    dims = field.mesh.is_structured_grid()
    if dims is None:
        raise ValueError("mesh is not a full row-major tensor grid")
    nx, ny = dims
    n = field.mesh.n_nodes
    stream.write("# vtk DataFile Version 3.0\n")
    stream.write(f"{title}\nASCII\nDATASET STRUCTURED_GRID\n")
    stream.write(f"DIMENSIONS {nx + 1} {ny + 1} 1\n")
    stream.write(f"POINTS {n} double\n")
    for x, y in field.mesh.nodes:
        stream.write(f"{fmt(x)} {fmt(y)} 0\n")
    stream.write(f"POINT_DATA {n}\n")
    for c, name in enumerate(("v", "vx", "vy", "vxy")):
        stream.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
        for x in field.dofs[:, c]:
            stream.write(fmt(x) + "\n")
