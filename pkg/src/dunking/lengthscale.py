"""Learning length-scale ratios q from (geometry, Re, Nu) data.

Pipeline: invert a reference correlation pointwise for q at each (Re, Nu)
sample, average the pointwise values over Reynolds number in log space,
assemble a piecewise-bilinear surrogate q(s, theta) over the aspect-ratio /
angle-of-attack grid, and fit an equivalent spheroid to a surface point
cloud to query the surrogate for shapes outside the trained family.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.optimize import minimize

from .correlations import Correlation, transform_correlation

Q_SEARCH_RANGE = (1.0e-4, 1.0e4)
LOG_Q_TOL = 1.0e-10


class LearningError(RuntimeError):
    """Raised when the pointwise inversion cannot bracket a minimum."""


@dataclasses.dataclass
class NuSample:
    geometry_id: str
    Re: float
    Nu: float
    Pr: float

    def __post_init__(self):
        if self.Re <= 0 or self.Nu <= 0 or self.Pr <= 0:
            raise ValueError("Re, Nu, Pr must all be positive")


def _objective(log_q, corr, sample):
    q = math.exp(log_q)
    nu_hat, _ = transform_correlation(corr, q, sample.Re, sample.Pr)
    return (sample.Nu - nu_hat) ** 2


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(f, lo, hi, tol):
    """Plain golden-section minimization; interval shrinkage is immune to
    the sqrt(eps) function-value floor of parabolic-interpolation methods."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def solve_q_pointwise(corr: Correlation, sample: NuSample,
                      method: str = "auto") -> float:
    """Length-scale ratio minimizing [Nu - q^{-1} corr(q Re, Pr)]^2.

    Searched over q in [1e-4, 1e4] (golden-type bounded scalar search on
    log q, tolerance 1e-10).  For the Ranz-Marshall form the quadratic in
    sqrt(q),  Nu x^2 - 0.6 sqrt(Re) Pr^(1/3) x - 2 = 0,  gives the answer
    in closed form.
    """
    if method == "auto":
        method = "closed_form" if corr.name == "ranz_marshall" else "golden"
    if method == "closed_form":
        if corr.name != "ranz_marshall":
            raise ValueError("closed form only available for ranz_marshall")
        c = 0.6 * math.sqrt(sample.Re) * sample.Pr ** (1.0 / 3.0)
        x = (c + math.sqrt(c * c + 8.0 * sample.Nu)) / (2.0 * sample.Nu)
        return x * x
    if method != "golden":
        raise ValueError(f"unknown method {method!r}")

    lo, hi = math.log(Q_SEARCH_RANGE[0]), math.log(Q_SEARCH_RANGE[1])
    L = _golden_min(lambda x: _objective(x, corr, sample), lo, hi, LOG_Q_TOL)
    # three-point check: the minimum must be interior and genuinely bracketed
    h = 1e-6
    f0 = _objective(L, corr, sample)
    if (L - lo < 100 * LOG_Q_TOL or hi - L < 100 * LOG_Q_TOL
            or f0 > _objective(L - h, corr, sample) + 1e-30
            or f0 > _objective(L + h, corr, sample) + 1e-30):
        raise LearningError(
            f"no interior minimum for {corr.name} at Re={sample.Re:g}, "
            f"Nu={sample.Nu:g}, Pr={sample.Pr:g}: log q = {L:.6g} with "
            f"objective {f0:.3e} on [{lo:.3g}, {hi:.3g}]")
    return math.exp(L)


def average_q_log(samples) -> float:
    """Trapezoidal average of q over log Re (samples: iterable of (Re, q))."""
    pts = sorted((float(Re), float(q)) for Re, q in samples)
    if len(pts) < 2:
        raise ValueError("need at least 2 samples to average")
    Re = np.array([p[0] for p in pts])
    q = np.array([p[1] for p in pts])
    if np.any(Re <= 0):
        raise ValueError("Re values must be positive")
    if np.any(np.diff(Re) == 0):
        raise ValueError("duplicate Re values")
    x = np.log(Re)
    return float(np.trapezoid(q, x) / (x[-1] - x[0]))


# ---------------------------------------------------------- surrogate

@dataclasses.dataclass
class LengthScaleModel:
    """Bilinear q(log10 s, theta) interpolant on a rectangular grid."""
    log10_s: np.ndarray     # (ns,) strictly increasing
    theta_deg: np.ndarray   # (nt,) strictly increasing
    q: np.ndarray           # (ns, nt), all positive

    def __post_init__(self):
        self.log10_s = np.asarray(self.log10_s, dtype=float)
        self.theta_deg = np.asarray(self.theta_deg, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if np.any(np.diff(self.log10_s) <= 0) or np.any(np.diff(self.theta_deg) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        if self.q.shape != (len(self.log10_s), len(self.theta_deg)):
            raise ValueError("q grid shape does not match the axes")
        if np.any(self.q <= 0):
            raise ValueError("all q values must be positive")
        self._interp = RegularGridInterpolator(
            (self.log10_s, self.theta_deg), self.q,
            method="linear", bounds_error=True)

    def evaluate(self, s: float, theta_deg: float) -> float:
        if s <= 0:
            raise ValueError("aspect ratio must be positive")
        return float(self._interp([[math.log10(s), theta_deg]])[0])

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("s,theta_deg,q\n")
            for i, ls in enumerate(self.log10_s):
                for j, th in enumerate(self.theta_deg):
                    fh.write(f"{10.0**ls:.17g},{th:.17g},{self.q[i, j]:.17g}\n")

    @staticmethod
    def from_csv(path) -> "LengthScaleModel":
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return build_surrogate([(r[0], r[1], r[2]) for r in rows])


def build_surrogate(per_geometry) -> LengthScaleModel:
    """Assemble the bilinear surrogate from (s, theta_deg, q) triples.

    The points must fill a complete rectangular grid in (log10 s, theta);
    any missing combinations are reported.  Duplicated points must agree.
    """
    triples = [(float(s), float(t), float(q)) for s, t, q in per_geometry]
    if not triples:
        raise ValueError("no points supplied")
    s_vals = np.unique([round(math.log10(s), 12) for s, _, _ in triples])
    t_vals = np.unique([round(t, 12) for _, t, _ in triples])
    grid = np.full((len(s_vals), len(t_vals)), np.nan)
    for s, t, q in triples:
        i = int(np.searchsorted(s_vals, round(math.log10(s), 12)))
        j = int(np.searchsorted(t_vals, round(t, 12)))
        if not np.isnan(grid[i, j]) and abs(grid[i, j] - q) > 1e-12 * abs(q):
            raise ValueError(f"conflicting q at s={s:g}, theta={t:g}")
        grid[i, j] = q
    if np.isnan(grid).any():
        missing = [(f"{10.0**s_vals[i]:g}", f"{t_vals[j]:g}")
                   for i, j in zip(*np.nonzero(np.isnan(grid)))]
        raise ValueError(f"incomplete grid; missing (s, theta) points: {missing}")
    return LengthScaleModel(s_vals, t_vals, grid)


# ------------------------------------------------------- spheroid fit

@dataclasses.dataclass
class SpheroidFit:
    s: float                 # aspect ratio, >1 prolate, <1 oblate
    theta_deg: float         # angle of attack in [0, 90]
    semi_axis: float         # distinguished (symmetry) semi-axis a
    equatorial_axis: float   # repeated semi-axis b
    axis: np.ndarray         # unit symmetry-axis direction
    theta_meaningful: bool   # False for near-spherical fits


def _directional_width(X: np.ndarray, n: np.ndarray) -> float:
    n = n / np.linalg.norm(n)
    p = X @ n
    return float(p.max() - p.min())


def _min_width(X: np.ndarray):
    """Global minimum width of the cloud over all directions.

    Coarse hemisphere scan followed by a simplex polish; the width function
    is piecewise smooth in the direction, so this localizes the minimum
    sharply for convex clouds.
    """
    th = np.linspace(0.0, np.pi / 2, 46)
    ph = np.linspace(0.0, 2 * np.pi, 91)[:-1]
    T, P = np.meshgrid(th, ph, indexing="ij")
    dirs = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P),
                     np.cos(T)], axis=-1).reshape(-1, 3)
    proj = X @ dirs.T
    w = proj.max(axis=0) - proj.min(axis=0)
    n0 = dirs[int(np.argmin(w))]
    res = minimize(lambda v: _directional_width(X, v), n0,
                   method="Nelder-Mead",
                   options={"xatol": 1e-5, "fatol": 1e-12})
    n = res.x / np.linalg.norm(res.x)
    return float(res.fun), n


def fit_spheroid(points) -> SpheroidFit:
    """Fit an equivalent spheroid to a 3D surface point cloud.

    Principal directions come from the covariance eigendecomposition; the
    larger eigenvalue gap decides prolate vs oblate.  Axis scales are taken
    from extents: the symmetry semi-axis from the projection range, the
    equatorial semi-axis from the cloud's minimum directional width (these
    coincide with a and b exactly for densely sampled spheroids).  theta is
    the angle between the symmetry axis and the x (flow) axis projected
    into the x-y plane, folded into [0, 90] degrees.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ValueError("expected an (n, 3) point array")
    if len(X) < 10:
        raise ValueError("need at least 10 points")
    X = X - X.mean(axis=0)
    w, V = np.linalg.eigh(X.T @ X / len(X))
    if w[0] < 1e-10 * max(w[2], 1e-300):
        raise ValueError("degenerate covariance: points are (nearly) coplanar")

    prolate = (w[2] - w[1]) > (w[1] - w[0])
    mw, mdir = _min_width(X)
    if prolate:
        axis = V[:, 2]
        pa = X @ axis
        a = float(pa.max() - pa.min()) / 2.0
        b = mw / 2.0
    else:
        # oblate: the thinnest direction is the symmetry axis itself
        axis = mdir
        a = mw / 2.0
        e1 = np.cross(axis, [1.0, 0.0, 0.0])
        if np.linalg.norm(e1) < 1e-8:
            e1 = np.cross(axis, [0.0, 1.0, 0.0])
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(axis, e1)
        P = np.stack([X @ e1, X @ e2], axis=-1)
        phis = np.linspace(0.0, np.pi, 181)[:-1]
        pr = P @ np.stack([np.cos(phis), np.sin(phis)])
        b = float((pr.max(axis=0) - pr.min(axis=0)).mean()) / 2.0

    s = a / b
    planar = math.hypot(axis[0], axis[1])
    theta = math.degrees(math.atan2(abs(axis[1]), abs(axis[0]))) if planar > 1e-8 else 0.0
    meaningful = abs(s - 1.0) >= 0.05 and planar > 1e-8
    return SpheroidFit(s=s, theta_deg=theta, semi_axis=a, equatorial_axis=b,
                       axis=axis, theta_meaningful=meaningful)


# -------------------------------------------------- sampling fixtures

def sample_spheroid_surface(a: float, b: float, n: int = 500,
                            theta_deg: float = 0.0, seed=None) -> np.ndarray:
    """Uniform-area sample of the spheroid with semi-axes (a, b, b).

    Rejection sampling: map uniform sphere directions through diag(a, b, b)
    and accept with probability proportional to the local area stretch
    |cof(T) n| = b sqrt(b^2 n_x^2 + a^2 (1 - n_x^2)).  The cloud is rotated
    by theta_deg about the z axis (angle of attack).
    """
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    rng = np.random.default_rng(seed)
    wmax = b * max(a, b)
    pts = []
    have = 0
    while have < n:
        m = 4 * (n - have) + 64
        g = rng.standard_normal((m, 3))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        wgt = b * np.sqrt(b * b * g[:, 0] ** 2 + a * a * (1.0 - g[:, 0] ** 2))
        acc = g[rng.random(m) < wgt / wmax] * np.array([a, b, b])
        pts.append(acc)
        have += len(acc)
    cloud = np.vstack(pts)[:n]
    t = math.radians(theta_deg)
    R = np.array([[math.cos(t), -math.sin(t), 0.0],
                  [math.sin(t), math.cos(t), 0.0],
                  [0.0, 0.0, 1.0]])
    return cloud @ R.T


def sample_sphere_surface(n: int = 500, seed=None) -> np.ndarray:
    return sample_spheroid_surface(1.0, 1.0, n=n, seed=seed)


def sample_cuboid_surface(lx: float, ly: float, lz: float, n: int = 500,
                          seed=None) -> np.ndarray:
    """Uniform-area sample of the box surface, stratified by face."""
    if min(lx, ly, lz) <= 0:
        raise ValueError("edge lengths must be positive")
    rng = np.random.default_rng(seed)
    dims = np.array([lx, ly, lz])
    areas = np.array([ly * lz, ly * lz, lx * lz, lx * lz, lx * ly, lx * ly])
    quota = n * areas / areas.sum()
    counts = np.floor(quota).astype(int)
    for i in np.argsort(-(quota - counts)):
        if counts.sum() >= n:
            break
        counts[i] += 1
    pts = []
    for face, c in enumerate(counts):
        ax = face // 2
        sgn = 1.0 if face % 2 == 0 else -1.0
        p = np.zeros((c, 3))
        p[:, ax] = sgn * dims[ax] / 2.0
        o = [k for k in range(3) if k != ax]
        p[:, o[0]] = (rng.random(c) - 0.5) * dims[o[0]]
        p[:, o[1]] = (rng.random(c) - 0.5) * dims[o[1]]
        pts.append(p)
    return np.vstack(pts)
