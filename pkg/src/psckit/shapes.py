"""Procedural complexes for demos and tests: closed surfaces, open
patches, non-manifold fans, wires, point clouds and mixed-dimension
assemblies.  Everything is deterministic given its parameters.
"""

from __future__ import annotations

import numpy as np

from .complex import SimplicialComplex, build_complex


def icosphere(subdivisions: int = 2, radius: float = 1.0) -> SimplicialComplex:
    """Subdivided icosahedron projected onto a sphere (642 vertices at
    three subdivisions)."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    pts = [np.asarray(v, dtype=np.float64) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in cache:
                cache[key] = len(pts)
                pts.append(0.5 * (pts[a] + pts[b]))
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    arr = np.asarray(pts)
    arr = radius * arr / np.linalg.norm(arr, axis=1, keepdims=True)
    return build_complex(arr, faces)


def torus(
    n_major: int = 24, n_minor: int = 16, major_radius: float = 1.0, minor_radius: float = 0.35
) -> SimplicialComplex:
    pos = []
    for i in range(n_major):
        u = 2.0 * np.pi * i / n_major
        for j in range(n_minor):
            v = 2.0 * np.pi * j / n_minor
            r = major_radius + minor_radius * np.cos(v)
            pos.append((r * np.cos(u), r * np.sin(u), minor_radius * np.sin(v)))
    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            faces += [(a, b, c), (a, c, d)]
    return build_complex(pos, faces)


def annulus(
    n_angular: int = 48, n_radial: int = 5, inner_radius: float = 0.5, outer_radius: float = 1.0
) -> SimplicialComplex:
    """Flat ring in the z=0 plane; its two circles are boundary loops."""
    pos = []
    for k in range(n_radial):
        r = inner_radius + (outer_radius - inner_radius) * k / (n_radial - 1)
        for i in range(n_angular):
            a = 2.0 * np.pi * i / n_angular
            pos.append((r * np.cos(a), r * np.sin(a), 0.0))
    faces = []
    for k in range(n_radial - 1):
        for i in range(n_angular):
            a = k * n_angular + i
            b = k * n_angular + (i + 1) % n_angular
            c = (k + 1) * n_angular + (i + 1) % n_angular
            d = (k + 1) * n_angular + i
            faces += [(a, b, c), (a, c, d)]
    return build_complex(pos, faces)


def grid_patch(nx: int = 8, ny: int = 8, spacing: float = 0.125) -> SimplicialComplex:
    """Open triangulated rectangle in the z=0 plane (dyadic spacing)."""
    pos = [(i * spacing, j * spacing, 0.0) for j in range(ny) for i in range(nx)]
    faces = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a = j * nx + i
            b = j * nx + i + 1
            c = (j + 1) * nx + i + 1
            d = (j + 1) * nx + i
            faces += [(a, b, c), (a, c, d)]
    return build_complex(pos, faces)


def heightfield(nx: int = 24, ny: int = 18, spacing: float = 0.0625, seed: int = 5) -> SimplicialComplex:
    """Terrain-like open patch with seeded random heights."""
    rng = np.random.default_rng(seed)
    z = rng.normal(scale=0.08, size=(ny, nx))
    # a couple of smoothing passes so it looks like terrain, not noise
    for _ in range(2):
        z = 0.5 * z + 0.125 * (
            np.roll(z, 1, 0) + np.roll(z, -1, 0) + np.roll(z, 1, 1) + np.roll(z, -1, 1)
        )
    pos = [(i * spacing, j * spacing, float(z[j, i])) for j in range(ny) for i in range(nx)]
    faces = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a = j * nx + i
            b = j * nx + i + 1
            c = (j + 1) * nx + i + 1
            d = (j + 1) * nx + i
            faces += [(a, b, c), (a, c, d)]
    return build_complex(pos, faces)


def non_manifold_fan(n_wings: int = 3, length: float = 1.0) -> SimplicialComplex:
    """``n_wings`` triangles sharing one spine edge; non-manifold for
    three or more wings."""
    pos = [(0.0, 0.0, 0.0), (0.0, 0.0, length)]
    faces = []
    for k in range(n_wings):
        a = 2.0 * np.pi * k / n_wings
        pos.append((np.cos(a), np.sin(a), 0.5 * length))
        faces.append((0, 1, 2 + k))
    return build_complex(pos, faces)


def wire_polyline(n: int = 12, seed: int = 7) -> SimplicialComplex:
    rng = np.random.default_rng(seed)
    steps = rng.normal(scale=0.2, size=(n - 1, 3))
    pos = np.vstack([np.zeros(3), np.cumsum(steps, axis=0)])
    edges = [(i, i + 1) for i in range(n - 1)]
    return build_complex(pos, edges)


def point_cloud(n: int = 20, seed: int = 11) -> SimplicialComplex:
    rng = np.random.default_rng(seed)
    return build_complex(rng.uniform(-1.0, 1.0, size=(n, 3)), [])


def mixed_complex(seed: int = 3) -> SimplicialComplex:
    """Triangulated patch plus a wire tail and stray points, all in one
    complex (the kind of input a triangles-only simplifier rejects)."""
    rng = np.random.default_rng(seed)
    patch = grid_patch(5, 4, spacing=0.25)
    pos = [patch.position(v) for v in patch.vertex_ids()]
    simplices: list[tuple[int, ...]] = list(patch.edge_tuples()) + list(patch.triangle_tuples())
    base = len(pos)
    tail = np.cumsum(rng.normal(scale=0.15, size=(6, 3)), axis=0) + np.array([1.5, 0.0, 0.2])
    pos.extend(tail)
    simplices.extend((base + i, base + i + 1) for i in range(5))
    scatter = rng.uniform(-0.5, 0.5, size=(4, 3)) + np.array([0.0, 1.5, 0.0])
    pos.extend(scatter)
    return build_complex(pos, simplices)


def tetrahedron(scale: float = 1.0) -> SimplicialComplex:
    pos = np.array([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], dtype=np.float64) * scale
    faces = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return build_complex(pos, faces)


def noisy_figurine(seed: int = 13) -> SimplicialComplex:
    """Displaced sphere body with non-manifold fins, a wire tail and a
    few loose points: a stand-in for a messy scanned asset."""
    rng = np.random.default_rng(seed)
    body = icosphere(2)
    pos = [body.position(v) for v in body.vertex_ids()]
    for i, p in enumerate(pos):
        pos[i] = p * (1.0 + 0.15 * float(rng.normal()))
    simplices: list[tuple[int, ...]] = list(body.edge_tuples()) + list(body.triangle_tuples())
    # fins: extra triangles glued onto existing surface edges
    edges = sorted(body.edge_tuples())
    for k in range(8):
        a, b = edges[int(rng.integers(len(edges)))]
        apex = len(pos)
        pos.append(0.5 * (pos[a] + pos[b]) * 1.4)
        simplices.append((a, b, apex))
    base = len(pos)
    tail = np.cumsum(rng.normal(scale=0.1, size=(5, 3)), axis=0) + np.array([1.3, 0, 0])
    pos.extend(tail)
    simplices.extend((base + i, base + i + 1) for i in range(4))
    pos.extend(rng.uniform(1.2, 1.6, size=(3, 3)))
    return build_complex(pos, simplices)


def bumpy_disc(n_rings: int = 10, n_angular: int = 20, seed: int = 17) -> SimplicialComplex:
    """Open disc with radial bumps; one boundary loop."""
    rng = np.random.default_rng(seed)
    pos = [(0.0, 0.0, 0.0)]
    for k in range(1, n_rings + 1):
        r = k / n_rings
        for i in range(n_angular):
            a = 2.0 * np.pi * i / n_angular
            pos.append((r * np.cos(a), r * np.sin(a), 0.1 * float(rng.normal()) * r))
    faces = []
    for i in range(n_angular):
        faces.append((0, 1 + i, 1 + (i + 1) % n_angular))
    for k in range(n_rings - 1):
        for i in range(n_angular):
            a = 1 + k * n_angular + i
            b = 1 + k * n_angular + (i + 1) % n_angular
            c = 1 + (k + 1) * n_angular + (i + 1) % n_angular
            d = 1 + (k + 1) * n_angular + i
            faces += [(a, b, c), (a, c, d)]
    return build_complex(pos, faces)
