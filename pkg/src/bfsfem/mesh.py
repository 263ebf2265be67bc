"""Structured meshes of equal-size, axis-aligned rectangles.

Element node order is counter-clockwise from the bottom-left corner, so
local nodes 0..3 sit at reference positions (0,0), (1,0), (1,1), (0,1).
Meshes are immutable: arrays are flagged read-only and derived data
(edges) is computed lazily and cached.

Text format::

    # comment
    nodes <n>
    x y            (n lines)
    elements <ne>
    i1 i2 i3 i4    (ne lines, 1-based, counter-clockwise from bottom-left)
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from functools import cached_property
from typing import TextIO

import numpy as np

from .basis import ElementSize

__all__ = [
    "RectMesh",
    "EdgeSet",
    "MeshError",
    "MalformedLineError",
    "DanglingNodeError",
    "NonRectangularElementError",
    "OrientationError",
    "InconsistentSizeError",
    "DuplicateNodeError",
    "NonConformingError",
    "uniform_mesh",
    "level_mesh",
    "refine",
    "load_mesh",
    "read_mesh",
    "write_mesh",
    "element_midpoints",
    "edge_midpoints",
]

# Reference positions of the four local nodes
LOCAL_NODES = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
# Local node pairs forming the element sides: bottom, right, top, left
LOCAL_SIDES = np.array([[0, 1], [1, 2], [2, 3], [3, 0]])

SIZE_RTOL = 1e-9
DUPLICATE_RTOL = 1e-12


class MeshError(ValueError):
    """Invalid mesh input. ``lineno`` is the 1-based source line when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class MalformedLineError(MeshError):
    pass


class DanglingNodeError(MeshError):
    pass


class NonRectangularElementError(MeshError):
    pass


class OrientationError(MeshError):
    pass


class InconsistentSizeError(MeshError):
    pass


class DuplicateNodeError(MeshError):
    pass


class NonConformingError(MeshError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class EdgeSet:
    """Unique element sides.

    ``nodes`` holds (node_a, node_b) with node_a < node_b. ``left`` and
    ``right`` are the elements on either side of the directed segment
    a -> b, or -1 on the boundary. ``vertical`` is True for edges parallel
    to the y axis. ``local_side`` gives, for each edge and each of
    (left, right), the side number 0..3 (bottom, right, top, left) within
    that element, or -1.
    """

    nodes: np.ndarray
    left: np.ndarray
    right: np.ndarray
    vertical: np.ndarray
    local_side: np.ndarray

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def elements(self) -> np.ndarray:
        """(nedge, 2) incident elements, lower index first, -1 padded."""
        pair = np.stack([self.left, self.right], axis=1)
        lo = np.where(pair.min(axis=1) < 0, pair.max(axis=1), pair.min(axis=1))
        hi = np.where(pair.min(axis=1) < 0, -1, pair.max(axis=1))
        return np.stack([lo, hi], axis=1)

    @property
    def interior(self) -> np.ndarray:
        return (self.left >= 0) & (self.right >= 0)


@dataclass(frozen=True, eq=False)
class RectMesh:
    nodes: np.ndarray
    elements: np.ndarray
    size: ElementSize

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(np.asarray(self.nodes, dtype=float)))
        object.__setattr__(self, "elements", _frozen(np.asarray(self.elements, dtype=np.intp)))
        object.__setattr__(self, "size", ElementSize.coerce(self.size))

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def hx(self) -> float:
        return self.size.hx

    @property
    def hy(self) -> float:
        return self.size.hy

    @property
    def element_area(self) -> float:
        return self.size.hx * self.size.hy

    @property
    def origins(self) -> np.ndarray:
        """Bottom-left corner of every element, shape (ne, 2)."""
        return self.nodes[self.elements[:, 0]]

    def map_points(self, ref_points) -> np.ndarray:
        """Physical images of reference points in every element, shape (ne, np, 2)."""
        ref = np.asarray(ref_points, dtype=float).reshape(-1, 2)
        scale = np.array([self.size.hx, self.size.hy])
        return self.origins[:, None, :] + ref[None, :, :] * scale

    @cached_property
    def lattice(self) -> np.ndarray:
        """Integer (ix, iy) grid position of every node relative to the lowest corner."""
        lo = self.nodes.min(axis=0) if self.n_nodes else np.zeros(2)
        scale = np.array([self.size.hx, self.size.hy])
        return np.rint((self.nodes - lo) / scale).astype(np.int64)

    @cached_property
    def edges(self) -> EdgeSet:
        return _build_edges(self)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def is_structured_grid(self) -> tuple[int, int] | None:
        """Return (nx, ny) if the mesh is a full rectangular grid with row-major nodes."""
        if not self.n_elements:
            return None
        nx, ny = (self.lattice.max(axis=0)).tolist()
        if self.n_elements != nx * ny or self.n_nodes != (nx + 1) * (ny + 1):
            return None
        expected = np.arange(self.n_nodes)
        order = self.lattice[:, 1] * (nx + 1) + self.lattice[:, 0]
        return (nx, ny) if np.array_equal(order, expected) else None


def _build_edges(mesh: RectMesh) -> EdgeSet:
    ne, n = mesh.n_elements, mesh.n_nodes
    a = mesh.elements[:, LOCAL_SIDES[:, 0]].ravel()
    b = mesh.elements[:, LOCAL_SIDES[:, 1]].ravel()
    elem = np.repeat(np.arange(ne), 4)
    side = np.tile(np.arange(4), ne)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    keys = lo.astype(np.int64) * n + hi
    uniq, inverse, counts = np.unique(keys, return_inverse=True, return_counts=True)
    if np.any(counts > 2):
        bad = uniq[counts > 2][0]
        raise NonConformingError(
            f"edge ({bad // n + 1}, {bad % n + 1}) is shared by more than two elements"
        )
    nedge = len(uniq)
    edge_nodes = np.stack([uniq // n, uniq % n], axis=1).astype(np.intp)
    # The element sides run counter-clockwise, so the owning element lies to
    # the left of a -> b. It is on the left of the canonical lo -> hi
    # direction iff a < b.
    on_left = a < b
    left = np.full(nedge, -1, dtype=np.intp)
    right = np.full(nedge, -1, dtype=np.intp)
    local = np.full((nedge, 2), -1, dtype=np.intp)
    left[inverse[on_left]] = elem[on_left]
    local[inverse[on_left], 0] = side[on_left]
    right[inverse[~on_left]] = elem[~on_left]
    local[inverse[~on_left], 1] = side[~on_left]
    # two incidences on the same side would mean overlapping elements
    seen_left = np.bincount(inverse[on_left], minlength=nedge)
    seen_right = np.bincount(inverse[~on_left], minlength=nedge)
    if np.any(seen_left > 1) or np.any(seen_right > 1):
        raise NonConformingError("overlapping elements share an edge with equal orientation")
    vertical = mesh.lattice[edge_nodes[:, 0], 0] == mesh.lattice[edge_nodes[:, 1], 0]
    return EdgeSet(
        nodes=_frozen(edge_nodes),
        left=_frozen(left),
        right=_frozen(right),
        vertical=_frozen(vertical),
        local_side=_frozen(local),
    )


def uniform_mesh(xmin: float, xmax: float, ymin: float, ymax: float, nx: int, ny: int) -> RectMesh:
    """Tensor grid of nx-by-ny rectangles with row-major (x fastest) node numbering."""
    if not (xmax > xmin and ymax > ymin):
        raise MeshError(f"degenerate domain [{xmin}, {xmax}] x [{ymin}, {ymax}]")
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise MeshError(f"nx and ny must be positive integers, got {nx}, {ny}")
    nx, ny = int(nx), int(ny)
    xs = np.linspace(xmin, xmax, nx + 1)
    ys = np.linspace(ymin, ymax, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny))
    n1 = (iy * (nx + 1) + ix).ravel()
    elements = np.column_stack([n1, n1 + 1, n1 + nx + 2, n1 + nx + 1])
    return RectMesh(nodes, elements, ElementSize((xmax - xmin) / nx, (ymax - ymin) / ny))


def level_mesh(level: int, domain=(-1.0, 1.0, -1.0, 1.0)) -> RectMesh:
    """Uniform refinement ``level`` of a domain; level L has 2**L elements per direction."""
    if level < 0:
        raise MeshError(f"level must be non-negative, got {level}")
    n = 2**level
    return uniform_mesh(*domain, n, n)


def refine(mesh: RectMesh) -> RectMesh:
    """Split every rectangle into four congruent children.

    Nodes and elements of the result are numbered row-major over the
    refined lattice. Existing nodes keep their exact coordinates.
    """
    hx, hy = mesh.hx / 2, mesh.hy / 2
    lat = mesh.lattice
    lo = mesh.nodes.min(axis=0)
    corner = 2 * lat[mesh.elements[:, 0]]
    offsets = np.array([[0, 0], [1, 0], [1, 1], [0, 1]])
    # children lower-left corners, shape (ne, 4, 2)
    child = corner[:, None, :] + offsets[None, :, :]
    child = child.reshape(-1, 2)
    child_nodes = child[:, None, :] + offsets[None, :, :]  # (4ne, 4, 2)
    width = int(2 * lat[:, 0].max() + 2) if len(lat) else 1
    keys = child_nodes[..., 1] * width + child_nodes[..., 0]
    uniq, inverse = np.unique(keys.ravel(), return_inverse=True)
    elements = inverse.reshape(-1, 4)
    ix, iy = uniq % width, uniq // width
    nodes = np.column_stack([lo[0] + ix * hx, lo[1] + iy * hy])
    # keep coordinates of coarse nodes bit-for-bit
    old_keys = (2 * lat[:, 1]) * width + 2 * lat[:, 0]
    nodes[np.searchsorted(uniq, old_keys)] = mesh.nodes
    # row-major element order by lower-left corner
    order = np.argsort(keys[:, 0], kind="stable")
    return RectMesh(nodes, elements[order], ElementSize(hx, hy))


def element_midpoints(mesh: RectMesh) -> np.ndarray:
    return mesh.nodes[mesh.elements].mean(axis=1)


def edge_midpoints(mesh: RectMesh) -> np.ndarray:
    return mesh.nodes[mesh.edges.nodes].mean(axis=1)


# ---------------------------------------------------------------- file I/O


def _data_lines(stream: TextIO):
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _header(lines, keyword: str) -> tuple[int, int]:
    try:
        lineno, tokens = next(lines)
    except StopIteration:
        raise MalformedLineError(f"missing '{keyword} <count>' header") from None
    if len(tokens) != 2 or tokens[0] != keyword:
        raise MalformedLineError(f"expected '{keyword} <count>', got {' '.join(tokens)!r}", lineno)
    try:
        count = int(tokens[1])
    except ValueError:
        raise MalformedLineError(f"invalid {keyword} count {tokens[1]!r}", lineno) from None
    if count < 0:
        raise MalformedLineError(f"negative {keyword} count", lineno)
    return lineno, count


def _rows(lines, count: int, width: int, kind, what: str):
    rows, linenos = [], []
    for _ in range(count):
        try:
            lineno, tokens = next(lines)
        except StopIteration:
            raise MalformedLineError(f"file ended before all {count} {what} were read") from None
        if len(tokens) != width:
            raise MalformedLineError(f"expected {width} values per {what[:-1]} line, got {len(tokens)}", lineno)
        try:
            rows.append([kind(t) for t in tokens])
        except ValueError:
            raise MalformedLineError(f"cannot parse {what[:-1]} line {' '.join(tokens)!r}", lineno) from None
        linenos.append(lineno)
    return rows, linenos


def read_mesh(stream: TextIO) -> RectMesh:
    """Parse and validate a mesh from a text stream.

    Every validation failure raises a :class:`MeshError` subclass carrying
    the line number of the offending node or element.
    """
    lines = _data_lines(stream)
    _, n = _header(lines, "nodes")
    node_rows, node_lines = _rows(lines, n, 2, float, "nodes")
    _, ne = _header(lines, "elements")
    elem_rows, elem_lines = _rows(lines, ne, 4, int, "elements")
    for lineno, tokens in lines:
        raise MalformedLineError(f"unexpected trailing data {' '.join(tokens)!r}", lineno)

    nodes = np.array(node_rows, dtype=float).reshape(-1, 2)
    bad = ~np.all(np.isfinite(nodes), axis=1)
    if bad.any():
        raise MalformedLineError("non-finite node coordinate", node_lines[int(np.argmax(bad))])
    if ne == 0:
        raise MeshError("mesh has no elements")
    elements = np.array(elem_rows, dtype=np.int64).reshape(-1, 4) - 1
    dangling = np.any((elements < 0) | (elements >= n), axis=1)
    if dangling.any():
        e = int(np.argmax(dangling))
        raise DanglingNodeError(
            f"element refers to node outside 1..{n}: {' '.join(map(str, elements[e] + 1))}",
            elem_lines[e],
        )
    size = _validate_elements(nodes, elements, elem_lines)
    _validate_lattice(nodes, elements, size, node_lines, elem_lines)
    mesh = RectMesh(nodes, elements, size)
    mesh.edges  # noqa: B018 - raises on edges shared by more than two elements
    return mesh


def _first(mask) -> int | None:
    return int(np.argmax(mask)) if np.any(mask) else None


def _validate_elements(nodes, elements, elem_lines) -> ElementSize:
    srt = np.sort(elements, axis=1)
    e = _first(np.any(srt[:, 1:] == srt[:, :-1], axis=1))
    if e is not None:
        raise NonRectangularElementError("element repeats a node", elem_lines[e])
    corners = nodes[elements]  # (ne, 4, 2)
    lo = corners.min(axis=1)
    ext = corners.max(axis=1) - lo
    e = _first(np.any(ext <= 0, axis=1))
    if e is not None:
        raise NonRectangularElementError("element has zero extent", elem_lines[e])
    q = (corners - lo[:, None, :]) / ext[:, None, :]
    tol = SIZE_RTOL * ext.min(axis=1) / ext.max(axis=1)
    bad = np.any(np.abs(q - LOCAL_NODES) > tol[:, None, None], axis=(1, 2))
    e = _first(bad)
    if e is not None:
        # the right corner set in the wrong order is an orientation problem
        snapped = np.rint(q[e])
        corner_set = sorted(map(tuple, snapped.astype(int).tolist()))
        if np.all(np.abs(q[e] - snapped) <= tol[e]) and corner_set == [(0, 0), (0, 1), (1, 0), (1, 1)]:
            raise OrientationError(
                "element nodes must run counter-clockwise from the bottom-left corner", elem_lines[e]
            )
        raise NonRectangularElementError("element is not an axis-aligned rectangle", elem_lines[e])
    hx, hy = ext[0]
    dev = np.abs(ext - ext[0]).max(axis=1)
    e = _first(dev > SIZE_RTOL * min(hx, hy))
    if e is not None:
        raise InconsistentSizeError(
            f"element size ({ext[e, 0]}, {ext[e, 1]}) differs from ({hx}, {hy})", elem_lines[e]
        )
    return ElementSize(float(hx), float(hy))


def _validate_lattice(nodes, elements, size, node_lines, elem_lines) -> None:
    scale = np.array([size.hx, size.hy])
    rel = (nodes - nodes.min(axis=0)) / scale
    lat = np.rint(rel)
    # absolute misalignment allowed: SIZE_RTOL * min(hx, hy)
    off = (np.abs(rel - lat) * scale).max(axis=1)
    i = _first(off > SIZE_RTOL * min(size.hx, size.hy))
    if i is not None:
        raise NonConformingError("node is not aligned with the element grid", node_lines[i])
    lat = lat.astype(np.int64)
    keys = lat[:, 1] * (int(lat[:, 0].max()) + 1) + lat[:, 0]
    order = np.argsort(keys, kind="stable")
    dup = np.flatnonzero(keys[order][1:] == keys[order][:-1])
    if len(dup):
        i = int(order[1:][dup].min())
        raise DuplicateNodeError("node coincides with an earlier node", node_lines[i])
    cells = keys[elements[:, 0]]
    order = np.argsort(cells, kind="stable")
    dup = np.flatnonzero(cells[order][1:] == cells[order][:-1])
    if len(dup):
        e = int(order[1:][dup].min())
        raise NonConformingError("element overlaps an earlier element", elem_lines[e])


def write_mesh(mesh: RectMesh, stream: TextIO | None = None) -> str | None:
    """Write ``mesh`` in the text format; returns the text if no stream is given."""
    out = stream if stream is not None else io.StringIO()
    out.write(f"nodes {mesh.n_nodes}\n")
    for x, y in mesh.nodes:
        out.write(f"{x:.17g} {y:.17g}\n")
    out.write(f"elements {mesh.n_elements}\n")
    for row in mesh.elements + 1:
        out.write(" ".join(map(str, row.tolist())) + "\n")
    return out.getvalue() if stream is None else None


def load_mesh(source) -> RectMesh:
    """Read a mesh from a path or a text stream."""
    if hasattr(source, "read"):
        return read_mesh(source)
    with open(source, encoding="utf-8") as fh:
        return read_mesh(fh)
