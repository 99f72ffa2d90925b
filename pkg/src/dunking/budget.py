"""Lumping-error coefficient phi, its computable upper bound, and the
a-priori error budget for replacing the Robin-boundary conduction problem
with the single-exponential lumped model.

The budget decomposes the total approximation error into three parts:

* a temporal-averaging term, sqrt((2B/|Omega|) * ||eta - eta_bar||_L1L1),
  present only when time-resolved boundary data is available;
* a lumping term phi*B/(gamma*e), first order in B, where phi is the
  kappa-weighted gradient energy of the first-eigenvalue sensitivity
  field; and
* a Biot-estimation term |B - B_est|/(B*e), first order in the relative
  error of the Biot estimate.

phi itself requires solving one linear mean-constrained Poisson-type
problem; when the detailed coefficient fields are unknown, the computable
bound (sqrt(phi(1,1,1)) + sqrt(delta_sigma) + sqrt(delta_eta))^2 needs
only the two field variances and the geometric stability eigenvalues.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh2D, geometry_stats
from .fem import (FieldSet, assemble_forms, boundary_mass, boundary_variance,
                  solve_constrained, volume_variance)
from .eigen import StabilityConstants, generalized_eigs


# ------------------------------------------------------------------- phi

@dataclass
class PhiResult:
    phi: float
    sensitivity_field: np.ndarray
    inputs_digest: str


def _digest(mesh: Mesh2D, fields: FieldSet) -> str:
    h = hashlib.sha256()
    for arr in (mesh.vertices, mesh.triangles, fields.kappa, fields.sigma,
                fields.eta):
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()[:16]


def solve_phi(mesh: Mesh2D, fields: FieldSet) -> PhiResult:
    """Sensitivity coefficient phi = a0(psi, psi; kappa).

    psi solves  a0(psi, v; kappa) = |Omega|^(-1/2) * L(v)  over the
    sigma-mean-zero space, with the linear form

        L(v) = gamma * int_Omega sigma v - int_bnd eta_bar v.

    Both terms of L are kept so that compatibility L(1) = gamma*|Omega| -
    |bnd| * mean(eta_bar) = 0 holds exactly for normalized fields; a
    compatibility failure therefore signals an unnormalized eta_bar.
    """
    forms = assemble_forms(mesh, fields)
    gs = geometry_stats(mesh)
    ones = np.ones(mesh.num_vertices)
    rhs = (gs.gamma * forms.c - boundary_mass(mesh, fields.eta) @ ones)
    rhs /= np.sqrt(gs.area)
    sol = solve_constrained(forms.A0, forms.c, rhs)
    psi = sol.u
    phi = float(psi @ (forms.A0 @ psi))
    return PhiResult(phi=phi, sensitivity_field=psi,
                     inputs_digest=_digest(mesh, fields))


# ----------------------------------------------------------- upper bound

@dataclass
class PhiUpperBound:
    phi111: float
    delta_sigma: float
    delta_eta: float
    var_sigma: float
    var_eta: float
    bound: float


def phi_upper_bound(mesh: Mesh2D, fields: FieldSet,
                    stability: StabilityConstants, phi111: float,
                    var_sigma: float | None = None,
                    var_eta: float | None = None) -> PhiUpperBound:
    """(sqrt(phi111) + sqrt(delta_sigma) + sqrt(delta_eta))^2.

    Variances are measured from the fields by area/perimeter-weighted
    quadrature unless supplied externally (e.g. from the composite-material
    formula or an assumed worst case).
    """
    if var_sigma is None:
        var_sigma = volume_variance(mesh, fields.sigma)
    if var_eta is None:
        var_eta = boundary_variance(mesh, fields.eta)
    if var_sigma < 0 or var_eta < 0:
        raise ValueError("variances must be nonnegative")
    ds = stability.gamma_sq_over_mu * var_sigma
    de = stability.gamma_over_lambda * var_eta
    bound = (np.sqrt(phi111) + np.sqrt(ds) + np.sqrt(de)) ** 2
    return PhiUpperBound(phi111=phi111, delta_sigma=ds, delta_eta=de,
                         var_sigma=var_sigma, var_eta=var_eta,
                         bound=float(bound))


def composite_sigma_variance(fractions, rho_c) -> float:
    """Variance of sigma for an n-phase composite of known volume fractions.

    sum_i v_i * ((rho c)_i / sum_j v_j (rho c)_j - 1)^2
    """
    v = np.asarray(fractions, dtype=float)
    rc = np.asarray(rho_c, dtype=float)
    if v.shape != rc.shape:
        raise ValueError("fractions and rho_c must have matching lengths")
    if np.any(v <= 0) or abs(v.sum() - 1.0) > 1e-12:
        raise ValueError("fractions must be positive and sum to 1")
    if np.any(rc <= 0):
        raise ValueError("volumetric heat capacities must be positive")
    avg = float(v @ rc)
    return float(v @ (rc / avg - 1.0) ** 2)


# ------------------------------------------------------------ the budget

@dataclass
class ErrorBudget:
    lumping: float
    biot: float
    temporal: float | None
    total: float
    b_used: float
    gamma: float
    phi_used: float
    phi_provenance: str      # "phi" | "phi_ub" | "supplied"
    temporal_present: bool
    asymptotic_regime: bool  # True when B/gamma > 0.1: O(B^2) remainders
    #                          of the first-order terms are not negligible


def assemble_budget(B: float, B_est: float, gamma: float, phi_used: float,
                    temporal_inputs: tuple[float, float] | None = None,
                    phi_provenance: str = "phi") -> ErrorBudget:
    """Combine the three first-order error terms.

    temporal_inputs, when given, is (|Omega|, ||eta - eta_bar||_{L1(L1)})
    and activates the temporal term sqrt((2B/|Omega|)*norm).
    """
    if B < 0 or B_est < 0:
        raise ValueError("Biot numbers must be nonnegative")
    if gamma <= 0 or phi_used <= 0:
        raise ValueError("gamma and phi must be positive")
    if B == B_est:
        biot = 0.0
    elif B_est == 0.0 or B == 0.0:
        raise ValueError("relative Biot error undefined for a zero value")
    else:
        biot = abs(B - B_est) / (B * np.e)
    lumping = phi_used * B / (gamma * np.e)
    temporal = None
    if temporal_inputs is not None:
        volume, norm = temporal_inputs
        if volume <= 0 or norm < 0:
            raise ValueError("bad temporal inputs")
        temporal = float(np.sqrt(2.0 * B / volume * norm))
    total = lumping + biot + (temporal or 0.0)
    return ErrorBudget(lumping=float(lumping), biot=float(biot),
                       temporal=temporal, total=float(total), b_used=B,
                       gamma=gamma, phi_used=phi_used,
                       phi_provenance=phi_provenance,
                       temporal_present=temporal is not None,
                       asymptotic_regime=bool(B / gamma > 0.1))


def budget_report_rows(budget: ErrorBudget) -> list[tuple[str, str]]:
    """Budget as (field, value) text rows for reports and CSV export."""
    rows = [("lumping", f"{budget.lumping:.12g}"),
            ("biot", f"{budget.biot:.12g}")]
    if budget.temporal_present:
        rows.append(("temporal", f"{budget.temporal:.12g}"))
    rows += [("total", f"{budget.total:.12g}"),
             ("B", f"{budget.b_used:.12g}"),
             ("gamma", f"{budget.gamma:.12g}"),
             ("phi_used", f"{budget.phi_used:.12g}"),
             ("phi_provenance", budget.phi_provenance),
             ("asymptotic_regime", str(budget.asymptotic_regime).lower())]
    return rows


# ---------------------------------------------------- consistency checks

def lambda1_expansion_check(mesh: Mesh2D, fields: FieldSet,
                            B_samples) -> tuple[float, float]:
    """Fit lambda_1(B) = a*B + b*B^2 and return (a, -b).

    The fitted linear coefficient should match gamma and the negated
    quadratic one should match phi; the fit has no intercept because
    lambda_1(0) = 0 exactly.
    """
    Bs = np.asarray(B_samples, dtype=float)
    if Bs.size < 3:
        raise ValueError("need at least 3 Biot samples")
    gamma = geometry_stats(mesh).gamma
    if Bs.max() > 0.1 * gamma:
        raise ValueError("samples must stay in the small-Biot regime")
    forms = assemble_forms(mesh, fields)
    lams = []
    for B in Bs:
        A = forms.A0 + B * forms.A1
        lams.append(generalized_eigs(A, forms.M, 1)[0].value)
    design = np.column_stack([Bs, Bs ** 2])
    coef, *_ = np.linalg.lstsq(design, np.asarray(lams), rcond=None)
    return float(coef[0]), float(-coef[1])


def exp_gap(z, eps):
    """|exp(-z*(1-eps)) - exp(-z)|."""
    z = np.asarray(z, dtype=float)
    return np.abs(np.exp(-z * (1.0 - eps)) - np.exp(-z))


def exp_gap_bound(eps) -> float:
    """Uniform-in-z bound eps/e + eps^2 for the exponential gap,
    valid for z >= 0 and 0 <= eps <= 1/2."""
    return eps / np.e + eps ** 2


# ------------------------------------------------------------ short time

def short_time_asymptotics(r1: float, r2: float, t) -> tuple[float, np.ndarray]:
    """Initial-contact behavior of the dunked body.

    At leading order the interface temperature is constant,
    u = 1/(1 + sqrt(r1*r2)), and the Nusselt number follows the
    one-dimensional similarity decay Nu = sqrt(r1/r2)/sqrt(pi*t).
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("r1 and r2 must be positive")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    u_interface = 1.0 / (1.0 + np.sqrt(r1 * r2))
    nu = np.sqrt(r1 / r2) / np.sqrt(np.pi * t)
    if nu.ndim == 0:
        nu = float(nu)
    return u_interface, nu
