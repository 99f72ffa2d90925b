"""Transient Robin heat equation: BDF2 time stepping and spectral form.

Integrates  sigma u_t - div(kappa grad u) = 0  with the Robin boundary
condition  kappa du/dn + B eta u = 0  and initial state u = 1, producing
the weighted average temperature

    u_avg(t) = (1/|Omega|) int_Omega sigma u(t)

as the quantity of interest.  The autonomous problem factors its system
matrices once; the time-dependent variant rebuilds the boundary term per
step (only rescaling it when the variation is declared separable).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import Mesh2D, geometry_stats
from .fem import FieldSet, Forms, assemble_forms, boundary_mass, boundary_mean
from .eigen import EigenPair


@dataclass
class RobinCoefficient:
    """Biot number with its boundary variation.

    Exactly one variation style applies:
      * eta: static edgewise field (perimeter mean 1), the autonomous case;
      * eta with time_scale g(t): separable variation g(t)*eta(x);
      * eta_table(t) -> edgewise field: fully tabulated per step.
    """
    B: float
    eta: np.ndarray | None = None
    time_scale: Callable[[float], float] | None = None
    eta_table: Callable[[float], np.ndarray] | None = None

    def __post_init__(self):
        if self.B < 0:
            raise ValueError("Biot number must be nonnegative")
        if self.eta is None and self.eta_table is None:
            raise ValueError("a boundary variation is required")
        if self.eta is not None and self.eta_table is not None:
            raise ValueError("give either a static field or a table, not both")

    @property
    def autonomous(self) -> bool:
        return self.eta is not None and self.time_scale is None


@dataclass
class TransientSolution:
    times: np.ndarray
    u_avg: np.ndarray
    snapshot_times: np.ndarray | None = None
    snapshots: np.ndarray | None = None  # (len(snapshot_times), n) nodal fields
    cv: np.ndarray | None = None         # per-snapshot coefficient of variation

    def write_series(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,u_avg\n")
            for t, u in zip(self.times, self.u_avg):
                fh.write(f"{t:.17g},{u:.17g}\n")

    def write_snapshots(self, path_pattern: str) -> None:
        """One nodal-value file per stored time; pattern receives the time."""
        if self.snapshots is None:
            raise ValueError("no snapshots stored")
        for t, snap in zip(self.snapshot_times, self.snapshots):
            np.savetxt(path_pattern.format(t), snap,
                       header="u", comments="", fmt="%.17g")


def _snapshot_slots(steps: int, max_snapshots: int) -> np.ndarray:
    if max_snapshots <= 0:
        return np.array([], dtype=int)
    every = max(1, int(np.ceil(steps / max(1, max_snapshots - 1))))
    slots = np.arange(0, steps + 1, every)
    if slots[-1] != steps:
        slots = np.append(slots, steps)
    return slots


def solve_rhea(mesh: Mesh2D, fields: FieldSet, robin: RobinCoefficient,
               t_f: float | None = None, steps: int = 2000,
               max_snapshots: int = 200) -> TransientSolution:
    """Autonomous solve; BDF2 after one backward-Euler startup step.

    t_f defaults to three lumped time constants 3/(B*gamma); both system
    matrices are factored once.  u_avg is recorded at every step and up to
    max_snapshots nodal fields are kept at (nearly) equispaced steps.
    """
    if not robin.autonomous:
        raise ValueError("solve_rhea requires a static boundary variation")
    if steps < 2:
        raise ValueError("need at least 2 time steps")
    eta = np.asarray(robin.eta, dtype=float)
    if np.any(eta < 0):
        raise ValueError("eta must be nonnegative")
    if abs(boundary_mean(mesh, eta) - 1.0) > 1e-8:
        raise ValueError("static eta must have perimeter mean 1")
    gs = geometry_stats(mesh)
    if t_f is None:
        if robin.B == 0:
            raise ValueError("t_f must be given when B = 0")
        t_f = 3.0 / (robin.B * gs.gamma)
    if t_f <= 0:
        raise ValueError("t_f must be positive")

    forms = assemble_forms(mesh, fields)
    K = (forms.A0 + robin.B * boundary_mass(mesh, eta)).tocsc()
    return _march(mesh, forms, lambda t: K, t_f, steps, max_snapshots,
                  refactor=False)


def solve_rhe_timedep(mesh: Mesh2D, fields: FieldSet, robin: RobinCoefficient,
                      t_f: float, steps: int = 2000,
                      max_snapshots: int = 200) -> TransientSolution:
    """Time-dependent variation; the implicit matrix is rebuilt per step."""
    if steps < 2:
        raise ValueError("need at least 2 time steps")
    if t_f is None or t_f <= 0:
        raise ValueError("t_f must be positive")
    forms = assemble_forms(mesh, fields)
    if robin.eta_table is not None:
        def K_of(t):
            eta_t = np.asarray(robin.eta_table(t), dtype=float)
            if np.any(eta_t < -1e-14):
                raise ValueError(f"eta(t={t}) has negative values")
            return (forms.A0 + robin.B * boundary_mass(mesh, eta_t)).tocsc()
    else:
        A1 = boundary_mass(mesh, np.asarray(robin.eta, dtype=float))
        g = robin.time_scale or (lambda t: 1.0)
        def K_of(t):
            gt = float(g(t))
            if gt < 0:
                raise ValueError(f"time scale negative at t={t}")
            return (forms.A0 + robin.B * gt * A1).tocsc()
    return _march(mesh, forms, K_of, t_f, steps, max_snapshots, refactor=True)


def _march(mesh, forms: Forms, K_of, t_f, steps, max_snapshots, refactor):
    n = mesh.num_vertices
    dt = t_f / steps
    M = forms.M.tocsc()
    c = forms.c
    area = c.sum()  # = int sigma = |Omega| for normalized fields

    times = np.linspace(0.0, t_f, steps + 1)
    u_avg = np.empty(steps + 1)
    slots = set(_snapshot_slots(steps, max_snapshots).tolist())
    snap_t, snaps = [], []

    u_prev = np.ones(n)
    u_avg[0] = 1.0  # exact: the initial field is identically one
    if 0 in slots:
        snap_t.append(0.0); snaps.append(u_prev.copy())

    # implicit matrices: backward Euler for the startup step, BDF2 after
    lu_be = spla.splu(M / dt + K_of(times[1]))
    u = lu_be.solve(M @ u_prev / dt)
    u_avg[1] = c @ u / area
    if 1 in slots:
        snap_t.append(times[1]); snaps.append(u.copy())

    lu = None
    for k in range(2, steps + 1):
        if lu is None or refactor:
            lu = spla.splu(1.5 * M / dt + K_of(times[k]))
        rhs = M @ (2.0 * u - 0.5 * u_prev) / dt
        u_prev, u = u, lu.solve(rhs)
        u_avg[k] = c @ u / area
        if k in slots:
            snap_t.append(times[k]); snaps.append(u.copy())

    return TransientSolution(times=times, u_avg=u_avg,
                             snapshot_times=np.asarray(snap_t),
                             snapshots=np.asarray(snaps))


# ------------------------------------------------------- spectral route

@dataclass
class SpectralReconstruction:
    u_avg: np.ndarray
    mass: float       # captured Parseval mass, = u_avg(0); 1 when complete


def spectral_reconstruction(eigenpairs: list[EigenPair], sigma_weights: np.ndarray,
                            t_grid) -> SpectralReconstruction:
    """u_avg(t) = sum_j m_j exp(-lambda_j t), truncated at the given pairs.

    m_j = (c . psi_j)^2/|Omega| with c the sigma-weighted volume form;
    |Omega| = sum(c).  The captured mass sum_j m_j equals 1 exactly when
    the pairs span everything the initial state excites (Parseval).
    """
    if not eigenpairs:
        raise ValueError("need at least one eigenpair")
    c = np.asarray(sigma_weights, dtype=float)
    area = c.sum()
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    lams = np.array([p.value for p in eigenpairs])
    masses = np.array([(c @ p.vector) ** 2 / area for p in eigenpairs])
    u = np.exp(-np.outer(t, lams)) @ masses
    return SpectralReconstruction(u_avg=u, mass=float(masses.sum()))


def coefficient_of_variation(solution: TransientSolution, mesh: Mesh2D) -> np.ndarray:
    """CV(t) = sqrt of the spatial variance over the spatial mean, per snapshot.

    Uses the plain (sigma-unweighted) spatial mean; entries where the mean
    is nonpositive are reported as NaN.
    """
    if solution.snapshots is None or len(solution.snapshots) == 0:
        raise ValueError("solution has no stored snapshots")
    plain = FieldSet.from_constants(mesh)
    M1 = assemble_forms(mesh, plain).M
    area = geometry_stats(mesh).area
    out = np.empty(len(solution.snapshots))
    for i, u in enumerate(solution.snapshots):
        mean = float((M1 @ np.ones(mesh.num_vertices)) @ u) / area
        if mean <= 0:
            out[i] = np.nan
            continue
        second = float(u @ (M1 @ u)) / area
        var = max(second - mean * mean, 0.0)
        out[i] = np.sqrt(var) / mean
    return out
