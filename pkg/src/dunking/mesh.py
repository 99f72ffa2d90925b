"""Triangular meshes for the canonical 2D dunking domains.

Provides the four canonical shapes (disk, square, equilateral triangle,
plus-shaped cross), uniform red refinement with curved-boundary projection,
geometry statistics, and a small text format for mesh exchange.

All canonical shapes are centered at their centroid.  Successive resolutions
are nested: ``generate_canonical(shape, r)`` equals the base mesh refined
``r - 1`` times.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np
from scipy.spatial import ConvexHull

CANONICAL_SHAPES = ("disk", "square", "equilateral_triangle", "cross")


@dataclasses.dataclass
class Mesh2D:
    """Conforming triangle mesh.

    vertices       : (nv, 2) float array
    triangles      : (nt, 3) int array, CCW orientation (positive area)
    tri_regions    : (nt,) int region tag per triangle (default 0)
    boundary_edges : (nb, 2) int array; exactly the edges incident to one triangle
    edge_tags      : (nb,) int boundary tag per edge (default 0)
    boundary_projector : optional callable mapping (m, 2) points onto the exact
        curved boundary; applied to new boundary vertices during refinement.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    tri_regions: np.ndarray
    boundary_edges: np.ndarray
    edge_tags: np.ndarray
    boundary_projector: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def num_boundary_edges(self) -> int:
        return self.boundary_edges.shape[0]

    def triangle_areas(self) -> np.ndarray:
        p = self.vertices
        t = self.triangles
        d1 = p[t[:, 1]] - p[t[:, 0]]
        d2 = p[t[:, 2]] - p[t[:, 0]]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edge_lengths(self) -> np.ndarray:
        p = self.vertices
        e = self.boundary_edges
        return np.linalg.norm(p[e[:, 1]] - p[e[:, 0]], axis=1)

    def boundary_vertex_indices(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    def validate(self) -> None:
        """Check mesh consistency; raises ValueError on any defect."""
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise ValueError("vertices must be an (nv, 2) array")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise ValueError("triangles must be an (nt, 3) array")
        if self.triangles.min(initial=0) < 0 or self.triangles.max(initial=-1) >= self.num_vertices:
            raise ValueError("triangle vertex index out of range")
        areas = self.triangle_areas()
        if np.any(areas <= 0.0):
            bad = int(np.argmin(areas))
            raise ValueError(
                f"triangle {bad} is degenerate or negatively oriented (area {areas[bad]:g})"
            )
        # boundary_edges must be exactly the edges incident to a single triangle
        expected = _extract_boundary_edges(self.triangles)
        got = {tuple(sorted(e)) for e in self.boundary_edges.tolist()}
        want = {tuple(sorted(e)) for e in expected.tolist()}
        if got != want:
            raise ValueError("boundary_edges do not match the edges incident to one triangle")
        if self.tri_regions.shape != (self.num_triangles,):
            raise ValueError("tri_regions must have one tag per triangle")
        if self.edge_tags.shape != (self.num_boundary_edges,):
            raise ValueError("edge_tags must have one tag per boundary edge")
        _check_connected(self.triangles, self.num_vertices)

    def copy(self) -> "Mesh2D":
        return Mesh2D(
            self.vertices.copy(),
            self.triangles.copy(),
            self.tri_regions.copy(),
            self.boundary_edges.copy(),
            self.edge_tags.copy(),
            self.boundary_projector,
        )


@dataclasses.dataclass(frozen=True)
class GeometryStats:
    area: float
    perimeter: float
    gamma: float       # perimeter / area
    diameter: float    # max pairwise vertex distance
    centroid: tuple


def _extract_boundary_edges(triangles: np.ndarray) -> np.ndarray:
    edges = np.concatenate(
        [triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]], axis=0
    )
    key = np.sort(edges, axis=1)
    _, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    # keep original orientation of the single-owner edges
    return edges[counts[inv] == 1]


def _check_connected(triangles: np.ndarray, nv: int) -> None:
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    i = triangles[:, [0, 1, 2]].ravel()
    j = triangles[:, [1, 2, 0]].ravel()
    adj = coo_matrix((np.ones_like(i), (i, j)), shape=(nv, nv))
    ncomp, _ = connected_components(adj, directed=False)
    if ncomp != 1:
        raise ValueError(f"mesh is not connected ({ncomp} components)")


def _finalize(vertices, triangles, regions, projector=None, edge_tags_from=None) -> Mesh2D:
    vertices = np.asarray(vertices, dtype=float)
    triangles = np.asarray(triangles, dtype=np.int64)
    # enforce CCW orientation
    d1 = vertices[triangles[:, 1]] - vertices[triangles[:, 0]]
    d2 = vertices[triangles[:, 2]] - vertices[triangles[:, 0]]
    areas = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    flip = areas < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    bedges = _extract_boundary_edges(triangles)
    tags = np.zeros(bedges.shape[0], dtype=np.int64)
    mesh = Mesh2D(
        vertices,
        triangles,
        np.asarray(regions, dtype=np.int64),
        bedges,
        tags,
        projector,
    )
    mesh.validate()
    return mesh


# ---------------------------------------------------------------- canonical shapes

def _disk_projector(points: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(points, axis=1, keepdims=True)
    return points / np.where(r == 0.0, 1.0, r)


def _base_disk() -> Mesh2D:
    # octagon fan around the center; vertices at angles k*pi/4 include (+-1, 0),
    # which pins the step-variation jump locations onto the mesh at every level
    ang = np.arange(8) * (np.pi / 4.0)
    verts = np.vstack([[0.0, 0.0], np.column_stack([np.cos(ang), np.sin(ang)])])
    tris = [[0, 1 + k, 1 + (k + 1) % 8] for k in range(8)]
    return _finalize(verts, tris, np.zeros(len(tris)), projector=_disk_projector)


def _cell_grid_mesh(cells, origin, h) -> Mesh2D:
    """Union of square cells (i, j), each split into two triangles with
    alternating diagonals (preserves both axis reflections)."""
    vid = {}
    verts = []

    def node(i, j):
        if (i, j) not in vid:
            vid[(i, j)] = len(verts)
            verts.append((origin[0] + i * h, origin[1] + j * h))
        return vid[(i, j)]

    tris = []
    for (i, j) in cells:
        a, b = node(i, j), node(i + 1, j)
        c, d = node(i + 1, j + 1), node(i, j + 1)
        if (i + j) % 2 == 0:
            tris += [[a, b, c], [a, c, d]]
        else:
            tris += [[a, b, d], [b, c, d]]
    return _finalize(np.array(verts), tris, np.zeros(len(tris)))


def _base_square() -> Mesh2D:
    cells = [(i, j) for i in range(2) for j in range(2)]
    return _cell_grid_mesh(cells, origin=(-0.5, -0.5), h=0.5)


def _base_cross() -> Mesh2D:
    # five unit squares (plus sign) built from 0.5-cells; mesh lines at x=0 / y=0
    cells = []
    for i in range(6):
        for j in range(6):
            cx = -1.5 + (i + 0.5) * 0.5
            cy = -1.5 + (j + 0.5) * 0.5
            if abs(cx) < 0.5 or abs(cy) < 0.5:
                cells.append((i, j))
    return _cell_grid_mesh(cells, origin=(-1.5, -1.5), h=0.5)


def _base_triangle() -> Mesh2D:
    # unit equilateral triangle centered at the centroid.  The two points where
    # the slanted edges cross y=0 are *not* dyadic, so they are base vertices
    # (keeps the step-variation jump on the mesh under refinement).
    s3 = np.sqrt(3.0)
    a = (-0.5, -s3 / 6.0)
    b = (0.5, -s3 / 6.0)
    c = (0.0, s3 / 3.0)
    pr = (1.0 / 3.0, 0.0)   # on edge b-c
    pl = (-1.0 / 3.0, 0.0)  # on edge c-a
    o = (0.0, 0.0)
    verts = [o, a, b, pr, c, pl]
    tris = [[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1]]
    return _finalize(verts, tris, np.zeros(len(tris)))


_BASE_BUILDERS = {
    "disk": _base_disk,
    "square": _base_square,
    "equilateral_triangle": _base_triangle,
    "cross": _base_cross,
}


def generate_canonical(shape: str, resolution: int = 1) -> Mesh2D:
    """Build a canonical mesh; resolution r >= 1 is the base refined r-1 times."""
    if shape not in CANONICAL_SHAPES:
        raise ValueError(f"unknown shape {shape!r}; choose from {CANONICAL_SHAPES}")
    if not isinstance(resolution, (int, np.integer)) or resolution < 1:
        raise ValueError("resolution must be an integer >= 1")
    mesh = _BASE_BUILDERS[shape]()
    for _ in range(resolution - 1):
        mesh = refine(mesh)
    return mesh


def refine(mesh: Mesh2D, times: int = 1) -> Mesh2D:
    """Uniform red refinement (each triangle into four similar ones).

    Region and boundary tags are inherited; midpoints of boundary edges are
    projected onto the exact boundary when the mesh carries a projector.
    """
    if times < 0:
        raise ValueError("times must be >= 0")
    out = mesh
    for _ in range(times):
        out = _refine_once(out)
    return out


def _refine_once(mesh: Mesh2D) -> Mesh2D:
    p, t = mesh.vertices, mesh.triangles
    nv = p.shape[0]
    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]], axis=0)
    key = np.sort(edges, axis=1)
    uniq, inv = np.unique(key, axis=0, return_inverse=True)
    mid_ids = nv + np.arange(uniq.shape[0])
    midpoints = 0.5 * (p[uniq[:, 0]] + p[uniq[:, 1]])

    # project midpoints of *boundary* edges onto the curved boundary
    bnd_set = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
    is_bnd = np.array([tuple(e) in bnd_set for e in uniq.tolist()])
    if mesh.boundary_projector is not None and np.any(is_bnd):
        midpoints[is_bnd] = mesh.boundary_projector(midpoints[is_bnd])

    newverts = np.vstack([p, midpoints])
    nt = t.shape[0]
    m01 = mid_ids[inv[0 * nt:1 * nt]]
    m12 = mid_ids[inv[1 * nt:2 * nt]]
    m20 = mid_ids[inv[2 * nt:3 * nt]]
    newtris = np.concatenate(
        [
            np.column_stack([t[:, 0], m01, m20]),
            np.column_stack([t[:, 1], m12, m01]),
            np.column_stack([t[:, 2], m20, m12]),
            np.column_stack([m01, m12, m20]),
        ],
        axis=0,
    )
    newregions = np.tile(mesh.tri_regions, 4)

    refined = _finalize(newverts, newtris, newregions, projector=mesh.boundary_projector)
    # inherit boundary tags: each new boundary edge lies inside a unique old edge
    if np.any(mesh.edge_tags != 0):
        refined.edge_tags = _inherit_edge_tags(mesh, refined)
    return refined


def _inherit_edge_tags(old: Mesh2D, new: Mesh2D) -> np.ndarray:
    # map each new boundary-edge midpoint to the closest old boundary edge
    tags = np.zeros(new.num_boundary_edges, dtype=np.int64)
    mids = 0.5 * (new.vertices[new.boundary_edges[:, 0]] + new.vertices[new.boundary_edges[:, 1]])
    a = old.vertices[old.boundary_edges[:, 0]]
    b = old.vertices[old.boundary_edges[:, 1]]
    for k, m in enumerate(mids):
        d = b - a
        tpar = np.clip(np.einsum("ij,ij->i", m - a, d) / np.einsum("ij,ij->i", d, d), 0.0, 1.0)
        proj = a + tpar[:, None] * d
        tags[k] = old.edge_tags[int(np.argmin(np.linalg.norm(proj - m, axis=1)))]
    return tags


def tag_halfplane_regions(mesh: Mesh2D, axis: int = 0) -> Mesh2D:
    """Split the mesh into two regions by the sign of a coordinate of the
    triangle centroid (region 0: negative side, region 1: nonnegative side)."""
    out = mesh.copy()
    cent = mesh.vertices[mesh.triangles].mean(axis=1)
    out.tri_regions = (cent[:, axis] >= 0.0).astype(np.int64)
    return out


def geometry_stats(mesh: Mesh2D) -> GeometryStats:
    areas = mesh.triangle_areas()
    if np.any(areas <= 0.0):
        raise ValueError("degenerate triangle in mesh")
    area = float(areas.sum())
    perimeter = float(mesh.edge_lengths().sum())
    cent = mesh.vertices[mesh.triangles].mean(axis=1)
    centroid = tuple((areas @ cent) / area)
    # diameter: max pairwise distance, attained on the convex hull vertices
    pts = mesh.vertices
    if pts.shape[0] > 16:
        pts = pts[ConvexHull(pts).vertices]
    diff = pts[:, None, :] - pts[None, :, :]
    diameter = float(np.sqrt((diff ** 2).sum(axis=2)).max())
    return GeometryStats(area, perimeter, perimeter / area, diameter, centroid)


# ---------------------------------------------------------------------- text I/O
#
# Format:  header "nv nt nb", then nv lines "x y", nt lines "i j k region",
# nb lines "i j tag"; 0-based indices, '#' starts a comment.

def write_mesh(mesh: Mesh2D, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{mesh.num_vertices} {mesh.num_triangles} {mesh.num_boundary_edges}\n")
        for x, y in mesh.vertices:
            fh.write(f"{x:.17g} {y:.17g}\n")
        for (i, j, k), reg in zip(mesh.triangles, mesh.tri_regions):
            fh.write(f"{i} {j} {k} {reg}\n")
        for (i, j), tag in zip(mesh.boundary_edges, mesh.edge_tags):
            fh.write(f"{i} {j} {tag}\n")


def read_mesh(path) -> Mesh2D:
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append(line.split())
    if not rows:
        raise ValueError(f"{path}: empty mesh file")
    try:
        nv, nt, nb = (int(v) for v in rows[0])
    except Exception as exc:
        raise ValueError(f"{path}: bad header line") from exc
    if len(rows) != 1 + nv + nt + nb:
        raise ValueError(f"{path}: expected {1 + nv + nt + nb} rows, found {len(rows)}")
    verts = np.array([[float(v) for v in r] for r in rows[1:1 + nv]])
    tri_rows = rows[1 + nv:1 + nv + nt]
    tris = np.array([[int(r[0]), int(r[1]), int(r[2])] for r in tri_rows], dtype=np.int64)
    regions = np.array([int(r[3]) if len(r) > 3 else 0 for r in tri_rows], dtype=np.int64)
    edge_rows = rows[1 + nv + nt:]
    bedges = np.array([[int(r[0]), int(r[1])] for r in edge_rows], dtype=np.int64).reshape(nb, 2)
    tags = np.array([int(r[2]) if len(r) > 2 else 0 for r in edge_rows], dtype=np.int64)
    mesh = Mesh2D(verts, tris, regions, bedges, tags, None)
    mesh.validate()
    return mesh
