"""P1 finite element core: coefficient fields, normalization, assembly of the
volume/boundary bilinear forms, and the mean-constrained direct solver.

Conventions for a mesh with nv vertices, nt triangles, nb boundary edges:

* kappa, sigma : piecewise constant per triangle, shape (nt,)
* eta          : piecewise linear per boundary edge, shape (nb, 2) holding the
  values at the edge's two endpoints.  Storing values *per edge* (rather than
  per vertex) lets a discontinuous eta carry doubled values at a jump vertex,
  each edge using its own side's value.

Assembled operators (all scipy CSR, size nv):

* A0 : volume stiffness   \\int_Omega kappa grad(w).grad(v)
* A1 : boundary mass      \\int_dOmega eta w v          (exact edgewise integral)
* M  : volume mass        \\int_Omega sigma w v          (exact)
* c  : constraint vector  M @ 1  (i.e. \\int_Omega sigma v)
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import Mesh2D, geometry_stats

ETA_VARIATIONS = ("constant", "linear", "sinusoidal", "step")


@dataclasses.dataclass
class FieldSet:
    kappa: np.ndarray  # (nt,)
    sigma: np.ndarray  # (nt,)
    eta: np.ndarray    # (nb, 2)

    @staticmethod
    def from_constants(mesh: Mesh2D, kappa: float = 1.0, sigma: float = 1.0,
                       eta: float = 1.0) -> "FieldSet":
        return FieldSet(
            np.full(mesh.num_triangles, float(kappa)),
            np.full(mesh.num_triangles, float(sigma)),
            np.full((mesh.num_boundary_edges, 2), float(eta)),
        )

    @staticmethod
    def from_region_values(mesh: Mesh2D, kappa_by_region=None, sigma_by_region=None,
                           eta_by_tag=None) -> "FieldSet":
        fs = FieldSet.from_constants(mesh)
        if kappa_by_region:
            fs.kappa = _per_tri(mesh, kappa_by_region, "kappa")
        if sigma_by_region:
            fs.sigma = _per_tri(mesh, sigma_by_region, "sigma")
        if eta_by_tag:
            vals = np.empty(mesh.num_boundary_edges)
            for k, tag in enumerate(mesh.edge_tags):
                if int(tag) not in eta_by_tag:
                    raise ValueError(f"no eta value for boundary tag {int(tag)}")
                vals[k] = eta_by_tag[int(tag)]
            fs.eta = np.repeat(vals[:, None], 2, axis=1)
        return fs

    def replace(self, **kw) -> "FieldSet":
        return dataclasses.replace(self, **kw)


def _per_tri(mesh, table, what):
    out = np.empty(mesh.num_triangles)
    for k, reg in enumerate(mesh.tri_regions):
        if int(reg) not in table:
            raise ValueError(f"no {what} value for region {int(reg)}")
        out[k] = table[int(reg)]
    return out


def eta_from_vertex_values(mesh: Mesh2D, values: np.ndarray) -> np.ndarray:
    """Per-edge eta array from a value per mesh vertex (continuous profile)."""
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.num_vertices,):
        raise ValueError("need one eta value per mesh vertex")
    return values[mesh.boundary_edges]


def eta_variation(mesh: Mesh2D, kind: str, normalize: bool = True) -> np.ndarray:
    """Reference boundary-conductance shapes on the canonical domains.

    Evaluated in centered coordinates scaled by the domain diameter,
    (xt, yt) = (x - centroid) / diameter:

      constant    1
      linear      1 + xt + yt
      sinusoidal  1 + sin(10 xt) sin(5 yt)
      step        0 for yt < 0, 2 for yt >= 0 (per-edge side values; the jump
                  vertices carry both one-sided values)

    With normalize=True the result has perimeter mean exactly 1.
    """
    if kind not in ETA_VARIATIONS:
        raise ValueError(f"unknown eta variation {kind!r}; choose from {ETA_VARIATIONS}")
    gs = geometry_stats(mesh)
    p = (mesh.vertices - np.asarray(gs.centroid)) / gs.diameter
    ev = p[mesh.boundary_edges]  # (nb, 2, 2) scaled endpoint coordinates
    if kind == "constant":
        eta = np.ones((mesh.num_boundary_edges, 2))
    elif kind == "linear":
        eta = 1.0 + ev[:, :, 0] + ev[:, :, 1]
    elif kind == "sinusoidal":
        eta = 1.0 + np.sin(10.0 * ev[:, :, 0]) * np.sin(5.0 * ev[:, :, 1])
    else:  # step: decide the side from the edge midpoint (exact when the jump
        # locations are mesh vertices, as on all canonical shapes)
        ymid = ev[:, :, 1].mean(axis=1)
        side = np.where(ymid >= 0.0, 2.0, 0.0)
        eta = np.repeat(side[:, None], 2, axis=1)
    if normalize:
        eta = eta / boundary_mean(mesh, eta)
    return eta


# ------------------------------------------------------------------ field stats

def boundary_mean(mesh: Mesh2D, eta: np.ndarray) -> float:
    """Perimeter-weighted mean of an edgewise-linear boundary field (exact)."""
    lens = mesh.edge_lengths()
    per = lens.sum()
    return float((lens * eta.mean(axis=1)).sum() / per)


def boundary_variance(mesh: Mesh2D, eta: np.ndarray) -> float:
    """Perimeter mean of (eta/mean - 1)^2, exact for edgewise-linear eta."""
    g = eta / boundary_mean(mesh, eta) - 1.0
    a, b = g[:, 0], g[:, 1]
    lens = mesh.edge_lengths()
    return float((lens * (a * a + a * b + b * b) / 3.0).sum() / lens.sum())


def volume_mean(mesh: Mesh2D, field: np.ndarray) -> float:
    areas = mesh.triangle_areas()
    return float((areas * field).sum() / areas.sum())


def volume_variance(mesh: Mesh2D, field: np.ndarray) -> float:
    areas = mesh.triangle_areas()
    g = field / volume_mean(mesh, field) - 1.0
    return float((areas * g * g).sum() / areas.sum())


@dataclasses.dataclass(frozen=True)
class FieldScales:
    kappa_scale: float
    sigma_scale: float
    eta_scale: float


def normalize_fields(mesh: Mesh2D, fields: FieldSet):
    """Rescale to the reference normalization: ess-inf kappa = 1, area mean of
    sigma = 1, perimeter mean of eta = 1.  Returns (normalized, FieldScales);
    the scales are the divisors applied (so B and time rescalings are the
    caller's responsibility)."""
    if np.any(fields.kappa <= 0.0):
        raise ValueError("kappa must be strictly positive")
    if np.any(fields.sigma <= 0.0):
        raise ValueError("sigma must be strictly positive")
    if np.any(fields.eta < 0.0):
        raise ValueError("eta must be nonnegative")
    ks = float(fields.kappa.min())
    ss = volume_mean(mesh, fields.sigma)
    es = boundary_mean(mesh, fields.eta)
    if es <= 0.0:
        raise ValueError("eta vanishes identically on the boundary")
    out = FieldSet(fields.kappa / ks, fields.sigma / ss, fields.eta / es)
    return out, FieldScales(ks, ss, es)


# ------------------------------------------------------------------- assembly

@dataclasses.dataclass
class Forms:
    A0: sp.csr_matrix
    A1: sp.csr_matrix
    M: sp.csr_matrix
    c: np.ndarray

    @property
    def n(self) -> int:
        return self.c.shape[0]


def assemble_forms(mesh: Mesh2D, fields: FieldSet) -> Forms:
    nv = mesh.num_vertices
    p, t = mesh.vertices, mesh.triangles
    areas = mesh.triangle_areas()

    # gradients of the barycentric basis
    x = p[t, 0]  # (nt, 3)
    y = p[t, 1]
    bx = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    by = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)

    ke = (bx[:, :, None] * bx[:, None, :] + by[:, :, None] * by[:, None, :])
    ke *= (fields.kappa / (4.0 * areas))[:, None, None]

    me_ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    me = me_ref[None, :, :] * (fields.sigma * areas)[:, None, None]

    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    A0 = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()
    M = sp.coo_matrix((me.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()

    A1 = boundary_mass(mesh, fields.eta)
    c = M @ np.ones(nv)
    return Forms(A0, A1, M, c)


def boundary_mass(mesh: Mesh2D, eta: np.ndarray) -> sp.csr_matrix:
    """Boundary mass matrix with edgewise-linear weight eta (exact integrals).

    On an edge of length L with endpoint weights (ea, eb):
        int eta phi_i phi_i = L (ea/4 + eb/12)
        int eta phi_i phi_j = L (ea + eb) / 12
        int eta phi_j phi_j = L (ea/12 + eb/4)
    """
    e = mesh.boundary_edges
    lens = mesh.edge_lengths()
    ea, eb = eta[:, 0], eta[:, 1]
    d_ii = lens * (ea / 4.0 + eb / 12.0)
    d_ij = lens * (ea + eb) / 12.0
    d_jj = lens * (ea / 12.0 + eb / 4.0)
    rows = np.concatenate([e[:, 0], e[:, 0], e[:, 1], e[:, 1]])
    cols = np.concatenate([e[:, 0], e[:, 1], e[:, 0], e[:, 1]])
    vals = np.concatenate([d_ii, d_ij, d_ij, d_jj])
    nv = mesh.num_vertices
    return sp.coo_matrix((vals, (rows, cols)), shape=(nv, nv)).tocsr()


# ------------------------------------------------------ mean-constrained solver

@dataclasses.dataclass
class ConstrainedSolution:
    u: np.ndarray
    multiplier: float
    residual: float


def solve_constrained(A: sp.spmatrix, c: np.ndarray, rhs: np.ndarray,
                      tol: float = 1e-10, compat_tol: float = 1e-8) -> ConstrainedSolution:
    """Solve A u + multiplier * c = rhs subject to c . u = 0.

    A is symmetric with the constant vector in (or near) its kernel; the
    bordered symmetric-indefinite system is factorized directly.  A right-hand
    side with a nonzero component along the constants is incompatible and
    rejected: |1 . rhs| must not exceed compat_tol * ||rhs||.
    """
    n = A.shape[0]
    rhs = np.asarray(rhs, dtype=float)
    nrm = np.linalg.norm(rhs)
    if nrm == 0.0:
        return ConstrainedSolution(np.zeros(n), 0.0, 0.0)
    ones_dot = float(np.abs(rhs.sum()))
    if ones_dot > compat_tol * nrm:
        raise ValueError(
            f"incompatible right-hand side: |1.rhs| = {ones_dot:.3e} exceeds "
            f"{compat_tol:g} * ||rhs|| = {compat_tol * nrm:.3e}"
        )
    K = sp.bmat([[A, c[:, None]], [c[None, :], None]], format="csc")
    sol = spla.splu(K).solve(np.concatenate([rhs, [0.0]]))
    u, mult = sol[:n], float(sol[n])
    res = np.linalg.norm(A @ u + mult * c - rhs) / nrm
    res = max(res, abs(float(c @ u)) / (np.linalg.norm(c) * max(np.linalg.norm(u), 1e-300)))
    if res > tol:
        raise RuntimeError(f"constrained solve residual {res:.3e} exceeds tol {tol:g}")
    return ConstrainedSolution(u, mult, res)


# ------------------------------------------------------------------- field I/O
#
# Text format, one directive per line ('#' comments):
#   region <tag> kappa <value> sigma <value>
#   boundary <tag> eta <value>
# or a nodal section for continuous boundary profiles:
#   eta_nodal
#   <vertex index> <value>

def write_fields(fields: FieldSet, mesh: Mesh2D, path) -> None:
    with open(path, "w") as fh:
        for reg in np.unique(mesh.tri_regions):
            mask = mesh.tri_regions == reg
            kap = fields.kappa[mask]
            sig = fields.sigma[mask]
            if np.ptp(kap) != 0.0 or np.ptp(sig) != 0.0:
                raise ValueError("write_fields requires region-constant kappa/sigma")
            fh.write(f"region {int(reg)} kappa {kap[0]!r} sigma {sig[0]!r}\n")
        per_edge = fields.eta
        if np.ptp(per_edge, axis=1).max(initial=0.0) == 0.0:
            tag_ok = True
            for tag in np.unique(mesh.edge_tags):
                vals = per_edge[mesh.edge_tags == tag, 0]
                if np.ptp(vals) != 0.0:
                    tag_ok = False
            if tag_ok:
                for tag in np.unique(mesh.edge_tags):
                    v = per_edge[mesh.edge_tags == tag, 0][0]
                    fh.write(f"boundary {int(tag)} eta {v!r}\n")
                return
        # fall back to nodal form (requires single-valued vertices)
        nodal = np.full(mesh.num_vertices, np.nan)
        for (i, j), (va, vb) in zip(mesh.boundary_edges, per_edge):
            for idx, v in ((i, va), (j, vb)):
                if not np.isnan(nodal[idx]) and nodal[idx] != v:
                    raise ValueError(
                        "eta carries doubled jump values; not representable nodally"
                    )
                nodal[idx] = v
        fh.write("eta_nodal\n")
        for idx in mesh.boundary_vertex_indices():
            fh.write(f"{int(idx)} {nodal[idx]!r}\n")


def read_fields(path, mesh: Mesh2D) -> FieldSet:
    kappa_by, sigma_by, eta_by = {}, {}, {}
    nodal = None
    mode = "directives"
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if mode == "nodal":
                idx, val = line.split()
                nodal[int(idx)] = float(val)
                continue
            parts = line.split()
            if parts[0] == "region":
                tag = int(parts[1])
                kv = dict(zip(parts[2::2], parts[3::2]))
                kappa_by[tag] = float(kv["kappa"])
                sigma_by[tag] = float(kv["sigma"])
            elif parts[0] == "boundary":
                if parts[2] != "eta":
                    raise ValueError(f"bad boundary line: {line!r}")
                eta_by[int(parts[1])] = float(parts[3])
            elif parts[0] == "eta_nodal":
                mode = "nodal"
                nodal = np.full(mesh.num_vertices, np.nan)
            else:
                raise ValueError(f"unrecognized field directive: {parts[0]!r}")
    fs = FieldSet.from_region_values(
        mesh,
        kappa_by_region=kappa_by or None,
        sigma_by_region=sigma_by or None,
        eta_by_tag=eta_by or None,
    )
    if nodal is not None:
        bidx = mesh.boundary_vertex_indices()
        missing = bidx[np.isnan(nodal[bidx])]
        if missing.size:
            raise ValueError(f"eta_nodal missing values for vertices {missing[:5].tolist()}")
        fs.eta = eta_from_vertex_values(mesh, np.nan_to_num(nodal))
    return fs
