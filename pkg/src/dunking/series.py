"""Nusselt time-series ingestion, steady-state detection, boundary profiles.

Takes spatially averaged Nusselt series (from external flow solves or
experiments), detects statistical steady state with a growing sliding
window keyed to the vortex-shedding period, and normalizes boundary
heat-transfer profiles into mean-1 variation functions with variances.
"""

from __future__ import annotations

import dataclasses
import math
import warnings

import numpy as np


# ------------------------------------------------------------- series

@dataclasses.dataclass
class NusseltSeries:
    times: np.ndarray
    nu_avg: np.ndarray
    Re: float | None = None
    Pr: float | None = None
    r1: float | None = None
    r2: float | None = None
    length_scale: str | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.nu_avg = np.asarray(self.nu_avg, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.nu_avg.shape:
            raise ValueError("times and nu_avg must be matching 1D arrays")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.all(np.isfinite(self.nu_avg)):
            raise ValueError("nu_avg contains non-finite values")


def read_series(path, **metadata) -> NusseltSeries:
    """Load a `t,nu` CSV.  Lines `# key = value` supply metadata defaults;
    keyword arguments override.  Duplicated time stamps keep the last value
    (with a warning)."""
    meta, rows = {}, []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if line.lower().startswith("t,"):
                continue
            t_s, nu_s = line.split(",")[:2]
            rows.append((float(t_s), float(nu_s)))
    dedup = {}
    for t, nu in rows:
        if t in dedup:
            warnings.warn(f"duplicate time stamp t={t:g}; keeping last value")
        dedup[t] = nu
    ts = np.array(sorted(dedup))
    nus = np.array([dedup[t] for t in ts])
    kwargs = {}
    for key in ("Re", "Pr", "r1", "r2"):
        if key in meta:
            kwargs[key] = float(meta[key])
    if "length_scale" in meta:
        kwargs["length_scale"] = meta["length_scale"]
    kwargs.update(metadata)
    return NusseltSeries(ts, nus, **kwargs)


def write_series(series: NusseltSeries, path) -> None:
    with open(path, "w") as fh:
        for key in ("Re", "Pr", "r1", "r2", "length_scale"):
            val = getattr(series, key)
            if val is not None:
                fh.write(f"# {key} = {val}\n")
        fh.write("t,nu\n")
        for t, nu in zip(series.times, series.nu_avg):
            fh.write(f"{t:.17g},{nu:.17g}\n")


def vortex_frequency(St: float, r1: float, r2: float, Re: float, Pr: float):
    """(f_vs, t_vs): shedding frequency in solid-diffusive time units.

    f_vs = St * (r2/r1) * Re * Pr, the Strouhal estimate carried into the
    nondimensionalization; t_vs = 1/f_vs is the oscillation period.
    """
    if min(St, r1, r2, Re, Pr) <= 0:
        raise ValueError("all inputs must be positive")
    f_vs = St * (r2 / r1) * Re * Pr
    return f_vs, 1.0 / f_vs


@dataclasses.dataclass
class SteadyStateReport:
    t_vs: float
    converged: bool
    t_f: float | None
    nu_stavg: float | None
    history: np.ndarray   # columns: step, window_end, width, avg, criterion
    # schedule actually used (exposed for inspection/configuration)
    initial_window: float
    step_size: float
    growth: float
    activation_time: float
    threshold: float


def _window_average(times, values, t0, t1):
    """Trapezoid of the piecewise-linear series over [t0, t1]."""
    lo = np.interp(t0, times, values)
    hi = np.interp(t1, times, values)
    inside = (times > t0) & (times < t1)
    ts = np.concatenate([[t0], times[inside], [t1]])
    vs = np.concatenate([[lo], values[inside], [hi]])
    return float(np.trapezoid(vs, ts) / (t1 - t0))


def steady_state_detect(series: NusseltSeries, St: float = 0.2,
                        initial_window: float = 5.0, step_size: float = 0.5,
                        growth: float = 0.05, activation: float = 7.5,
                        threshold: float = 1.0e-3) -> SteadyStateReport:
    """Sliding-window stationarity detection for a Nusselt series.

    Schedule (all lengths in units of the shedding period t_vs): the first
    window spans [0, initial_window]; each step advances the window end by
    step_size while the width grows by `growth`; the convergence test --
    mean of the four consecutive relative changes among the last five
    window averages below `threshold` -- is armed only once the window end
    passes `activation`.  A series too short to converge yields a
    not-converged report rather than an error.
    """
    if None in (series.Re, series.Pr, series.r1, series.r2):
        raise ValueError("series metadata (Re, Pr, r1, r2) is required")
    _, t_vs = vortex_frequency(St, series.r1, series.r2, series.Re, series.Pr)

    t = series.times
    nu = series.nu_avg
    t_end = t[-1]
    hist = []
    averages = []
    converged = False
    t_f = None
    nu_stavg = None
    k = 0
    while True:
        window_end = (initial_window + k * step_size) * t_vs
        width = (initial_window + k * growth) * t_vs
        if window_end > t_end + 1e-12 * max(t_end, 1.0):
            break
        avg = _window_average(t, nu, window_end - width, window_end)
        averages.append(avg)
        crit = math.nan
        if len(averages) >= 5 and window_end > activation * t_vs:
            a = averages[-5:]
            deltas = [abs(a[i + 1] - a[i]) / abs(a[i]) for i in range(4)]
            crit = sum(deltas) / 4.0
        hist.append((k, window_end, width, avg, crit))
        if not math.isnan(crit) and crit < threshold:
            converged = True
            t_f = window_end
            nu_stavg = avg
            break
        k += 1

    return SteadyStateReport(
        t_vs=t_vs, converged=converged, t_f=t_f, nu_stavg=nu_stavg,
        history=np.array(hist) if hist else np.empty((0, 5)),
        initial_window=initial_window * t_vs, step_size=step_size * t_vs,
        growth=growth * t_vs, activation_time=activation * t_vs,
        threshold=threshold)


def write_report(report: SteadyStateReport, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# t_vs = {report.t_vs:.17g}\n")
        fh.write(f"# converged = {report.converged}\n")
        if report.converged:
            fh.write(f"# t_f = {report.t_f:.17g}\n")
            fh.write(f"# nu_stavg = {report.nu_stavg:.17g}\n")
        fh.write("step,window_end,width,avg,criterion\n")
        for row in report.history:
            fh.write(f"{int(row[0])},{row[1]:.17g},{row[2]:.17g},"
                     f"{row[3]:.17g},{row[4]:.17g}\n")


# ------------------------------------------------------------ profiles

@dataclasses.dataclass
class EtaProfile:
    coords: np.ndarray     # arc-length (or angle) coordinates, ascending
    eta: np.ndarray        # normalized variation, perimeter mean 1
    variance: float        # mean of (eta - 1)^2 over the boundary
    periodic: bool
    period: float | None = None


def _segments(coords, values, periodic, period):
    """(lengths, left values, right values) of the linear segments,
    including the wrap-around segment for periodic profiles."""
    h = np.diff(coords)
    if np.any(h < 0):
        raise ValueError("coordinates must be nondecreasing")
    a = values[:-1]
    b = values[1:]
    if periodic:
        if period is None:
            pos = h[h > 0]
            if len(pos) == 0:
                raise ValueError("cannot infer the period from coincident points")
            period = float(coords[-1] - coords[0] + np.median(pos))
        wrap = period - (coords[-1] - coords[0])
        if wrap < -1e-12 * period:
            raise ValueError("period shorter than the coordinate span")
        h = np.append(h, max(wrap, 0.0))
        a = np.append(a, values[-1])
        b = np.append(b, values[0])
    return h, a, b, period


def eta_profile_stats(coords, values, periodic: bool = False,
                      period: float | None = None) -> EtaProfile:
    """Normalize a boundary heat-transfer profile to mean 1 and compute
    its variance, integrating the piecewise-linear interpolant exactly.

    Repeated coordinates represent genuine jumps (zero-length segments);
    for periodic profiles the closing segment runs from the last sample
    back to the first, its length inferred from the median spacing unless
    `period` is given.
    """
    coords = np.asarray(coords, dtype=float)
    values = np.asarray(values, dtype=float)
    if coords.ndim != 1 or coords.shape != values.shape or len(coords) < 2:
        raise ValueError("need matching 1D coords/values with >= 2 samples")
    if np.any(values < 0):
        raise ValueError("profile values must be nonnegative")
    h, a, b, period = _segments(coords, values, periodic, period)
    P = h.sum()
    if P <= 0:
        raise ValueError("profile has zero total length")
    mean = float((h * (a + b) / 2.0).sum() / P)
    if mean <= 0:
        raise ValueError("profile mean must be positive")
    ea = a / mean - 1.0
    eb = b / mean - 1.0
    # exact integral of the squared linear interpolant on each segment
    var = float((h * (ea * ea + ea * eb + eb * eb) / 3.0).sum() / P)
    return EtaProfile(coords=coords, eta=values / mean, variance=var,
                      periodic=periodic, period=period if periodic else None)


def read_profile(path) -> EtaProfile:
    periodic = False
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "periodic" in line:
                    periodic = line.split("=", 1)[1].strip().lower() == "true"
                continue
            if line.lower().startswith("coord"):
                continue
            c_s, e_s = line.split(",")[:2]
            rows.append((float(c_s), float(e_s)))
    coords = np.array([r[0] for r in rows])
    vals = np.array([r[1] for r in rows])
    return eta_profile_stats(coords, vals, periodic=periodic)


def write_profile(profile: EtaProfile, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# periodic={'true' if profile.periodic else 'false'}\n")
        fh.write("coord,eta\n")
        for c, e in zip(profile.coords, profile.eta):
            fh.write(f"{c:.17g},{e:.17g}\n")
