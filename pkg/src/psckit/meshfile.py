"""OBJ and OFF readers/writers for simplicial complexes.

OBJ: ``v`` records are vertices (isolated ones are points), ``l`` records
are wire polylines mapped to edges, ``f`` records are faces (polygons are
fan-triangulated).  OFF: faces of arity 2 encode wire edges, arity 1
points; arity above 3 fan-triangulates.  Writers emit vertices in id
order; triangle vertex order is the sorted tuple, so windings are not
preserved.
"""

from __future__ import annotations

import os

from .complex import SimplicialComplex, build_complex


class MeshFileError(ValueError):
    pass


def _obj_index(token: str, n: int, lineno: int) -> int:
    token = token.split("/")[0]
    try:
        idx = int(token)
    except ValueError:
        raise MeshFileError(f"line {lineno}: bad vertex reference {token!r}") from None
    if idx < 0:
        idx = n + idx
    else:
        idx -= 1
    if not 0 <= idx < n:
        raise MeshFileError(f"line {lineno}: vertex reference {token} out of range")
    return idx


def loads_obj(text: str) -> SimplicialComplex:
    positions: list[tuple[float, float, float]] = []
    simplices: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) < 4:
                raise MeshFileError(f"line {lineno}: vertex needs 3 coordinates")
            try:
                positions.append((float(parts[1]), float(parts[2]), float(parts[3])))
            except ValueError:
                raise MeshFileError(f"line {lineno}: bad coordinate") from None
        elif tag == "f":
            idx = [_obj_index(p, len(positions), lineno) for p in parts[1:]]
            if len(idx) < 3:
                raise MeshFileError(f"line {lineno}: face needs at least 3 vertices")
            for k in range(1, len(idx) - 1):
                simplices.append((idx[0], idx[k], idx[k + 1]))
        elif tag == "l":
            idx = [_obj_index(p, len(positions), lineno) for p in parts[1:]]
            if len(idx) < 2:
                raise MeshFileError(f"line {lineno}: polyline needs at least 2 vertices")
            simplices.extend((idx[k], idx[k + 1]) for k in range(len(idx) - 1))
        elif tag == "p":
            for p in parts[1:]:
                simplices.append((_obj_index(p, len(positions), lineno),))
        # vt/vn/usemtl/... are ignored
    return build_complex(positions, simplices)


def dumps_obj(c: SimplicialComplex) -> str:
    ids = c.vertex_ids()
    remap = {v: i + 1 for i, v in enumerate(ids)}
    lines = []
    for v in ids:
        p = c.position(v)
        lines.append(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
    for eid in c.edge_ids():
        if c.edge_triangle_count(eid) == 0:
            a, b = c.edge(eid)
            lines.append(f"l {remap[a]} {remap[b]}")
    for tid in c.triangle_ids():
        a, b, cc = c.triangle(tid)
        lines.append(f"f {remap[a]} {remap[b]} {remap[cc]}")
    return "\n".join(lines) + "\n"


def loads_off(text: str) -> SimplicialComplex:
    rows = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    if not rows or rows[0] not in ("OFF", "COFF"):
        raise MeshFileError("missing OFF header")
    try:
        nv, nf, _ = (int(x) for x in rows[1].split()[:3])
    except (ValueError, IndexError):
        raise MeshFileError("bad OFF counts line") from None
    if len(rows) < 2 + nv + nf:
        raise MeshFileError("truncated OFF file")
    positions = []
    for i in range(nv):
        parts = rows[2 + i].split()
        try:
            positions.append((float(parts[0]), float(parts[1]), float(parts[2])))
        except (ValueError, IndexError):
            raise MeshFileError(f"bad OFF vertex on row {2 + i}") from None
    simplices: list[tuple[int, ...]] = []
    for i in range(nf):
        parts = rows[2 + nv + i].split()
        try:
            k = int(parts[0])
            idx = [int(p) for p in parts[1 : 1 + k]]
        except (ValueError, IndexError):
            raise MeshFileError(f"bad OFF face on row {2 + nv + i}") from None
        if len(idx) != k or any(not 0 <= v < nv for v in idx):
            raise MeshFileError(f"bad OFF face on row {2 + nv + i}")
        if k == 1:
            simplices.append((idx[0],))
        elif k == 2:
            simplices.append((idx[0], idx[1]))
        else:
            for j in range(1, k - 1):
                simplices.append((idx[0], idx[j], idx[j + 1]))
    return build_complex(positions, simplices)


def dumps_off(c: SimplicialComplex) -> str:
    ids = c.vertex_ids()
    remap = {v: i for i, v in enumerate(ids)}
    wires = [c.edge(eid) for eid in c.edge_ids() if c.edge_triangle_count(eid) == 0]
    tris = [c.triangle(tid) for tid in c.triangle_ids()]
    lines = ["OFF", f"{len(ids)} {len(tris) + len(wires)} 0"]
    for v in ids:
        p = c.position(v)
        lines.append(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}")
    for a, b, cc in tris:
        lines.append(f"3 {remap[a]} {remap[b]} {remap[cc]}")
    for a, b in wires:
        lines.append(f"2 {remap[a]} {remap[b]}")
    return "\n".join(lines) + "\n"


def read_mesh(path: str) -> SimplicialComplex:
    ext = os.path.splitext(path)[1].lower()
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if ext == ".obj":
        return loads_obj(text)
    if ext == ".off":
        return loads_off(text)
    raise MeshFileError(f"unsupported mesh extension {ext!r} (use .obj or .off)")


def write_mesh(path: str, c: SimplicialComplex) -> None:
    ext = os.path.splitext(path)[1].lower()
    if ext == ".obj":
        text = dumps_obj(c)
    elif ext == ".off":
        text = dumps_off(c)
    else:
        raise MeshFileError(f"unsupported mesh extension {ext!r} (use .obj or .off)")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
