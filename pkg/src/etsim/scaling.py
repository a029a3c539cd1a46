"""Nondimensionalization of the device parameters.

The solver works entirely in scaled variables: lengths on [0, 1], densities
relative to the maximum doping concentration, temperatures relative to the
device temperature T0, and the potential in units of the thermal voltage
k_B*T0/q.  This module converts the raw SI parameters into the dimensionless
numbers (lambda2, tau, kappa0) the discretization consumes.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class PhysicalParams:
    """Raw device constants in SI units.

    Defaults describe a 75 nm GaAs ballistic diode at room temperature.
    ``kappa0_scaled`` is the dimensionless heat-conductivity prefactor; it is
    carried through unchanged (see :func:`compute_scaled`).
    """

    k_B: float = 1.3807e-23       # J/K
    eps0: float = 8.8542e-12      # F/m
    eps_r: float = 11.7
    m0: float = 9.11e-31          # kg
    q: float = 1.602e-19          # C
    C_max: float = 1e24           # 1/m^3
    T0: float = 300.0             # K
    L: float = 75e-9              # m
    m_eff_ratio: float = 0.067    # m_n = m_eff_ratio * m0
    tau0: float = 0.9e-12         # s
    kappa0_scaled: float = 4.88e-2

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"PhysicalParams.{f.name} must be a positive finite number, got {value!r}")
        if self.eps_r < 1.0:
            raise ValueError(f"eps_r must be >= 1, got {self.eps_r}")
        if not 0.0 < self.m_eff_ratio <= 1.0:
            raise ValueError(f"m_eff_ratio must be in (0, 1], got {self.m_eff_ratio}")

    @property
    def m_n(self) -> float:
        """Effective electron mass in kg."""
        return self.m_eff_ratio * self.m0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PhysicalParams":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown physical parameter(s): {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path: str) -> "PhysicalParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class ScaledParams:
    """Dimensionless parameters consumed by the solver.

    lambda2    squared scaled Debye length
    tau        scaled energy relaxation time
    kappa0     heat-conductivity prefactor (multiplies the n*theta law)
    t_star     reference time in seconds
    u_thermal  thermal voltage k_B*T0/q in volts
    """

    lambda2: float
    tau: float
    kappa0: float
    t_star: float
    u_thermal: float

    def __post_init__(self) -> None:
        for name in ("lambda2", "tau", "kappa0", "t_star", "u_thermal"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"ScaledParams.{name} must be positive, got {value!r}")

    def to_dict(self) -> dict:
        return asdict(self)


def compute_scaled(p: PhysicalParams) -> ScaledParams:
    """Convert physical parameters into the solver's dimensionless numbers.

    t_star  = sqrt(m_n L^2 / (k_B T0))
    tau     = tau0 / t_star
    lambda2 = eps0 eps_r k_B T0 / (q^2 C_max L^2)

    Note the q^2: the Debye-length scaling of the potential normalized by the
    thermal voltage carries two factors of the elementary charge.  kappa0 is
    taken as the tabulated dimensionless value directly.
    """
    t_star = math.sqrt(p.m_n * p.L**2 / (p.k_B * p.T0))
    tau = p.tau0 / t_star
    lambda2 = p.eps0 * p.eps_r * p.k_B * p.T0 / (p.q**2 * p.C_max * p.L**2)
    u_thermal = p.k_B * p.T0 / p.q
    return ScaledParams(lambda2=lambda2, tau=tau, kappa0=p.kappa0_scaled,
                        t_star=t_star, u_thermal=u_thermal)


def scale_voltage(u_volts: float, s: ScaledParams) -> float:
    """Applied bias in volts -> dimensionless potential units."""
    return u_volts / s.u_thermal


def unscale_voltage(u_scaled: float, s: ScaledParams) -> float:
    """Dimensionless potential -> volts."""
    return u_scaled * s.u_thermal
