"""Triangle ``.node`` / ``.ele`` reading and writing, plus synthetic grids."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass

import numpy as np

from .meshcore import Mesh
from .rng import SplitMix64


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where = f"{source}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


@dataclass
class NodeFile:
    count: int
    dim: int
    attr_count: int
    marker_flag: int
    base: int
    xy: np.ndarray
    markers: np.ndarray | None


@dataclass
class EleFile:
    count: int
    nodes_per_tri: int
    attr_count: int
    triangles: np.ndarray  # 0-based


def _data_lines(stream):
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    for lineno, raw in enumerate(stream, 1):
        text = raw.split("#", 1)[0].strip()
        if text:
            yield lineno, text.split()


def _ints(fields, lineno, what, source):
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise ParseError(f"non-integer field in {what}: {' '.join(fields)!r}", lineno, source) from None


def _floats(fields, lineno, source):
    try:
        vals = [float(f) for f in fields]
    except ValueError:
        raise ParseError(f"non-numeric coordinate: {' '.join(fields)!r}", lineno, source) from None
    if not all(np.isfinite(vals)):
        raise ParseError("coordinates must be finite", lineno, source)
    return vals


def _detect_base(first_index, lineno, source):
    if first_index not in (0, 1):
        raise ParseError(f"first index must be 0 or 1, got {first_index}", lineno, source)
    return first_index


def parse_node(stream, source: str | None = None) -> NodeFile:
    lines = _data_lines(stream)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty .node file", None, source) from None
    if len(header) < 2:
        raise ParseError("header needs <#vertices> <dim> [<#attrs> <#markers>]", lineno, source)
    head = _ints(header[:4], lineno, "header", source)
    count, dim = head[0], head[1]
    attrs = head[2] if len(head) > 2 else 0
    marker_flag = head[3] if len(head) > 3 else 0
    if count < 0 or attrs < 0:
        raise ParseError("negative count in header", lineno, source)
    if dim != 2:
        raise ParseError("dimension must be 2", lineno, source)
    if marker_flag not in (0, 1):
        raise ParseError("marker flag must be 0 or 1", lineno, source)

    ncols = 3 + attrs + marker_flag
    xy = np.empty((count, 2), dtype=np.float64)
    markers = np.empty(count, dtype=np.int64) if marker_flag else None
    base = None
    seen = 0
    for lineno, fields in lines:
        if seen == count:
            raise ParseError(f"more vertex rows than the declared {count}", lineno, source)
        if len(fields) != ncols:
            raise ParseError(f"expected {ncols} fields, got {len(fields)}", lineno, source)
        (idx,) = _ints(fields[:1], lineno, "vertex index", source)
        if base is None:
            base = _detect_base(idx, lineno, source)
        if idx != seen + base:
            raise ParseError(f"vertex index {idx} out of sequence (expected {seen + base})", lineno, source)
        xy[seen] = _floats(fields[1:3], lineno, source)
        _floats(fields[3:3 + attrs], lineno, source)
        if marker_flag:
            (markers[seen],) = _ints(fields[-1:], lineno, "boundary marker", source)
        seen += 1
    if seen != count:
        raise ParseError(f"declared {count} vertices but found {seen}", None, source)
    return NodeFile(count, dim, attrs, marker_flag, base if base is not None else 1, xy, markers)


def parse_ele(stream, node: NodeFile, source: str | None = None) -> EleFile:
    lines = _data_lines(stream)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ParseError("empty .ele file", None, source) from None
    head = _ints(header[:3], lineno, "header", source)
    if len(head) < 1:
        raise ParseError("header needs <#triangles> [<nodes per triangle> <#attrs>]", lineno, source)
    count = head[0]
    per = head[1] if len(head) > 1 else 3
    attrs = head[2] if len(head) > 2 else 0
    if count < 0 or attrs < 0:
        raise ParseError("negative count in header", lineno, source)
    if per != 3:
        raise ParseError("only linear triangles supported (nodes per triangle must be 3)", lineno, source)

    tris = np.empty((count, 3), dtype=np.int64)
    base = None
    seen = 0
    ncols = 4 + attrs
    for lineno, fields in lines:
        if seen == count:
            raise ParseError(f"more triangle rows than the declared {count}", lineno, source)
        if len(fields) != ncols:
            raise ParseError(f"expected {ncols} fields, got {len(fields)}", lineno, source)
        vals = _ints(fields[:4], lineno, "triangle row", source)
        _floats(fields[4:], lineno, source)
        if base is None:
            base = _detect_base(vals[0], lineno, source)
        if vals[0] != seen + base:
            raise ParseError(f"triangle index {vals[0]} out of sequence (expected {seen + base})", lineno, source)
        corners = [v - node.base for v in vals[1:]]
        for v, c in zip(vals[1:], corners):
            if not 0 <= c < node.count:
                raise ParseError(f"vertex reference {v} does not exist", lineno, source)
        if len(set(corners)) != 3:
            raise ParseError("triangle repeats a vertex", lineno, source)
        tris[seen] = corners
        seen += 1
    if seen != count:
        raise ParseError(f"declared {count} triangles but found {seen}", None, source)
    return EleFile(count, per, attrs, tris)


def to_mesh(node: NodeFile, ele: EleFile) -> Mesh:
    """Combine parsed files; file markers win over topological boundary detection."""
    boundary = None if node.markers is None else node.markers != 0
    return Mesh(node.xy, ele.triangles, boundary)


def write_node(mesh: Mesh) -> str:
    out = [f"{mesh.n_vertices} 2 0 1"]
    flags = mesh.boundary.astype(int).tolist()
    for i, ((x, y), b) in enumerate(zip(mesh.xy.tolist(), flags), 1):
        out.append(f"{i} {x!r} {y!r} {b}")
    return "\n".join(out) + "\n"


def write_ele(mesh: Mesh) -> str:
    out = [f"{mesh.n_triangles} 3 0"]
    for i, (a, b, c) in enumerate((mesh.triangles + 1).tolist(), 1):
        out.append(f"{i} {a} {b} {c}")
    return "\n".join(out) + "\n"


def read_mesh(node_path: str | os.PathLike, ele_path: str | os.PathLike) -> Mesh:
    """Load a mesh from disk, rejecting isolated vertices."""
    with open(node_path) as f:
        node = parse_node(f, source=str(node_path))
    with open(ele_path) as f:
        ele = parse_ele(f, node, source=str(ele_path))
    return to_mesh(node, ele).require_no_isolated()


def save_mesh(mesh: Mesh, node_path, ele_path) -> None:
    with open(node_path, "w") as f:
        f.write(write_node(mesh))
    with open(ele_path, "w") as f:
        f.write(write_ele(mesh))


def generate_synthetic(rows: int, cols: int, jitter: float = 0.0, seed: int = 0) -> Mesh:
    """Jittered structured triangulation of the unit square.

    Vertex ``r * cols + c`` starts at ``(c / (cols - 1), r / (rows - 1))``;
    every cell is cut along its lower-left to upper-right diagonal. Interior
    vertices, visited row-major, get an offset ``(2u - 1) * jitter * h`` per
    axis (dx then dy) where ``h`` is the cell size along that axis.
    """
    if rows < 2 or cols < 2:
        raise ValueError("rows and cols must be at least 2")
    if not 0.0 <= jitter < 0.5:
        raise ValueError("jitter must lie in [0, 0.5) so cells cannot invert")
    hx, hy = 1.0 / (cols - 1), 1.0 / (rows - 1)
    r, c = np.divmod(np.arange(rows * cols), cols)
    xy = np.column_stack([c * hx, r * hy])
    boundary = (r == 0) | (r == rows - 1) | (c == 0) | (c == cols - 1)
    if jitter > 0.0:
        rng = SplitMix64(seed)
        for v in np.flatnonzero(~boundary).tolist():
            xy[v, 0] += (2.0 * rng.uniform() - 1.0) * jitter * hx
            xy[v, 1] += (2.0 * rng.uniform() - 1.0) * jitter * hy

    rr, cc = np.meshgrid(np.arange(rows - 1), np.arange(cols - 1), indexing="ij")
    v00 = (rr * cols + cc).ravel()
    v01, v10, v11 = v00 + 1, v00 + cols, v00 + cols + 1
    tris = np.empty((2 * len(v00), 3), dtype=np.int64)
    tris[0::2] = np.column_stack([v00, v01, v11])
    tris[1::2] = np.column_stack([v00, v11, v10])
    return Mesh(xy, tris, boundary)
