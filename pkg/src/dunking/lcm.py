"""Lumped capacitance model and time-scale diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LumpedModel:
    """Single-exponential cooling model u(t) = exp(-B*gamma*t).

    The optional dimensional inputs allow evaluating the dimensional
    temperature ratio (T(t) - T_inf)/(T_i - T_inf) = exp(-t/tau_dim) with
    tau_dim = (volume/surface_area) * rho_c_avg / h_avg.
    """
    B: float
    gamma: float
    volume: float | None = None
    surface_area: float | None = None
    rho_c_avg: float | None = None
    h_avg: float | None = None
    T_inf: float | None = None
    T_init: float | None = None

    def __post_init__(self):
        if self.B < 0:
            raise ValueError("Biot number must be nonnegative")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")

    @property
    def tau_eq(self) -> float:
        """Nondimensional equilibration time constant 1/(B*gamma)."""
        if self.B == 0.0:
            return np.inf
        return 1.0 / (self.B * self.gamma)

    @property
    def has_dimensional(self) -> bool:
        return None not in (self.volume, self.surface_area,
                            self.rho_c_avg, self.h_avg)

    @property
    def tau_eq_dimensional(self) -> float:
        if not self.has_dimensional:
            raise ValueError("dimensional inputs not supplied")
        return (self.volume / self.surface_area) * self.rho_c_avg / self.h_avg


def lcm_evaluate(model: LumpedModel, t):
    """exp(-B*gamma*t); with dimensional inputs, t is dimensional time and
    the dimensional temperature ratio exp(-t/tau_dim) is returned."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("negative time")
    if model.has_dimensional:
        out = np.exp(-t / model.tau_eq_dimensional)
    else:
        out = np.exp(-model.B * model.gamma * t)
    return float(out) if out.ndim == 0 else out


def lcm_temperature(model: LumpedModel, t):
    """Dimensional temperature T_inf + (T_init - T_inf)*ratio."""
    if model.T_inf is None or model.T_init is None:
        raise ValueError("temperature endpoints not supplied")
    return model.T_inf + (model.T_init - model.T_inf) * lcm_evaluate(model, t)


@dataclass
class TimeScaleReport:
    tau_conv: float      # fluid convective scale r1/(r2 Re Pr)
    tau_eq_L: float      # lumped equilibration scale 1/(B gamma)
    ratio: float         # tau_eq_L / tau_conv
    tau_diff: float = 1.0


def time_scales(r1: float, r2: float, Re: float, Pr: float,
                B: float, gamma: float) -> TimeScaleReport:
    """Separation between the solid equilibration and fluid convection scales.

    ratio = (r2/r1)*Re*Pr/(B*gamma); a large value indicates the fluid
    reaches its (quasi-)steady state long before the solid cools.
    """
    for name, v in (("r1", r1), ("r2", r2), ("Re", Re), ("Pr", Pr)):
        if v <= 0:
            raise ValueError(f"{name} must be positive")
    if B < 0:
        raise ValueError("B must be nonnegative")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    tau_conv = r1 / (r2 * Re * Pr)
    tau_eq = np.inf if B == 0.0 else 1.0 / (B * gamma)
    return TimeScaleReport(tau_conv=tau_conv, tau_eq_L=tau_eq,
                           ratio=tau_eq / tau_conv)
