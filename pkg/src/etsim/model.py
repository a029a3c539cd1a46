"""Discrete problem definition: grid, device profiles, boundary data, monitors.

Everything here is immutable after construction and safe to share across
threads.  Positions live on the scaled interval [0, 1].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .scaling import PhysicalParams, ScaledParams, compute_scaled, scale_voltage
from .solver import NewtonOptions

SCHEME_CONSISTENT = "consistent-trapezoidal"
SCHEME_PAPER_LITERAL = "paper-literal"
SCHEME_IMPLICIT_EULER = "implicit-euler"  # first-order reference, verification only

_SCHEMES = (SCHEME_CONSISTENT, SCHEME_PAPER_LITERAL, SCHEME_IMPLICIT_EULER)


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [0, 1] with nodes x_i = i*dx, dx = 1/(N-1)."""

    N: int
    dt: float
    t_end: float = 1.0

    def __post_init__(self) -> None:
        if self.N < 3:
            raise ValueError(f"grid needs at least 3 nodes, got N={self.N}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")

    @property
    def dx(self) -> float:
        return 1.0 / (self.N - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.N)


def _check_domain(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise ValueError("position outside [0, 1]")
    return x


@dataclass(frozen=True)
class DopingProfile:
    """Doping concentration C(x), scaled by the maximum concentration.

    kinds: "ballistic-diode" (n+ / n / n+ tanh profile), "constant",
    "tabulated" (linear interpolation of (x, value) samples).
    """

    kind: str = "ballistic-diode"
    value: float = 1.0
    table_x: Optional[np.ndarray] = None
    table_v: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.kind not in ("ballistic-diode", "constant", "tabulated"):
            raise ValueError(f"unknown doping kind {self.kind!r}")
        if self.kind == "constant" and self.value <= 0:
            raise ValueError("constant doping must be strictly positive")
        if self.kind == "tabulated":
            if self.table_x is None or self.table_v is None:
                raise ValueError("tabulated doping needs sample arrays")
            if np.any(np.asarray(self.table_v) <= 0):
                raise ValueError("tabulated doping values must be strictly positive")

    def __call__(self, x) -> np.ndarray:
        return doping_at(self, x)

    @classmethod
    def from_csv(cls, path: str, kind: str = "tabulated") -> "DopingProfile":
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(kind="tabulated", table_x=data[:, 0], table_v=data[:, 1])


@dataclass(frozen=True)
class LatticeProfile:
    """Lattice temperature theta_L(x), strictly positive on [0, 1].

    kinds: "cooling" (1/2 (x-1/2)^2 + 1/2), "heating" (7/4 - 3 (x-1/2)^2),
    "constant", "tabulated".
    """

    kind: str = "constant"
    value: float = 1.0
    table_x: Optional[np.ndarray] = None
    table_v: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.kind not in ("cooling", "heating", "constant", "tabulated"):
            raise ValueError(f"unknown lattice kind {self.kind!r}")
        if self.kind == "constant" and self.value <= 0:
            raise ValueError("constant lattice temperature must be strictly positive")
        if self.kind == "tabulated":
            if self.table_x is None or self.table_v is None:
                raise ValueError("tabulated lattice profile needs sample arrays")
            if np.any(np.asarray(self.table_v) <= 0):
                raise ValueError("lattice temperature must be strictly positive")

    def __call__(self, x) -> np.ndarray:
        return lattice_at(self, x)

    @classmethod
    def from_csv(cls, path: str) -> "LatticeProfile":
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(kind="tabulated", table_x=data[:, 0], table_v=data[:, 1])


def doping_at(profile: DopingProfile, x) -> np.ndarray:
    """Evaluate the doping profile at positions x in [0, 1]."""
    x = _check_domain(x)
    if profile.kind == "ballistic-diode":
        return 1.0 + 0.25 * (np.tanh(100.0 * x - 60.0) - np.tanh(100.0 * x - 40.0))
    if profile.kind == "constant":
        return np.full_like(x, profile.value)
    return np.interp(x, profile.table_x, profile.table_v)


def lattice_at(profile: LatticeProfile, x) -> np.ndarray:
    """Evaluate the lattice temperature at positions x in [0, 1]."""
    x = _check_domain(x)
    if profile.kind == "cooling":
        return 0.5 * (x - 0.5) ** 2 + 0.5
    if profile.kind == "heating":
        return 1.75 - 3.0 * (x - 0.5) ** 2
    if profile.kind == "constant":
        return np.full_like(x, profile.value)
    return np.interp(x, profile.table_x, profile.table_v)


@dataclass
class State:
    """Nodal vectors (n, theta, V) at one time level.

    n >= 0 and theta > 0 are expected but monitored rather than clamped.
    """

    n: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self) -> None:
        self.n = np.asarray(self.n, dtype=np.float64)
        self.theta = np.asarray(self.theta, dtype=np.float64)
        self.v = np.asarray(self.v, dtype=np.float64)
        if not (self.n.shape == self.theta.shape == self.v.shape):
            raise ValueError("state vectors must share one length")

    @property
    def N(self) -> int:
        return self.n.size

    def pack(self) -> np.ndarray:
        """Interleave to the solver's unknown ordering (n_i, V_i, theta_i)."""
        u = np.empty(3 * self.N)
        u[0::3] = self.n
        u[1::3] = self.v
        u[2::3] = self.theta
        return u

    @classmethod
    def unpack(cls, u: np.ndarray, t: float) -> "State":
        return cls(n=u[0::3].copy(), v=u[1::3].copy(), theta=u[2::3].copy(), t=t)

    def copy(self) -> "State":
        return State(n=self.n.copy(), theta=self.theta.copy(), v=self.v.copy(), t=self.t)


@dataclass(frozen=True)
class DeviceConfig:
    """Full discrete problem: grid, profiles, bias, scaling, scheme options.

    Dirichlet data is derived: n = C at both contacts, theta = theta_L at both
    contacts, V(0) = 0 and V(1) = bias_scaled.  The initial electron density
    is the doping profile.
    """

    grid: Grid1D
    doping: DopingProfile = field(default_factory=DopingProfile)
    lattice: LatticeProfile = field(default_factory=LatticeProfile)
    scaled: ScaledParams = field(default_factory=lambda: compute_scaled(PhysicalParams()))
    bias_scaled: float = 0.0
    bias_volts: Optional[float] = None
    scheme: str = SCHEME_CONSISTENT
    newton: NewtonOptions = field(default_factory=NewtonOptions)

    def __post_init__(self) -> None:
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {_SCHEMES}")

    def doping_values(self) -> np.ndarray:
        return doping_at(self.doping, self.grid.x)

    def lattice_values(self) -> np.ndarray:
        return lattice_at(self.lattice, self.grid.x)

    def dirichlet(self) -> np.ndarray:
        """Boundary data (n_0, n_1, V_0, V_1, theta_0, theta_1)."""
        c = doping_at(self.doping, np.array([0.0, 1.0]))
        th = lattice_at(self.lattice, np.array([0.0, 1.0]))
        return np.array([c[0], c[1], 0.0, self.bias_scaled, th[0], th[1]])

    def initial_density(self) -> np.ndarray:
        return self.doping_values()

    def with_bias_volts(self, u_volts: float) -> "DeviceConfig":
        return replace(self, bias_volts=u_volts,
                       bias_scaled=scale_voltage(u_volts, self.scaled))

    # ---- JSON round trip ---------------------------------------------------

    def to_dict(self) -> dict:
        def profile_dict(p):
            d = {"kind": p.kind}
            if p.kind == "constant":
                d["value"] = p.value
            elif p.kind == "tabulated":
                d["x"] = np.asarray(p.table_x).tolist()
                d["values"] = np.asarray(p.table_v).tolist()
            return d

        return {
            "grid": {"N": self.grid.N, "dt": self.grid.dt, "t_end": self.grid.t_end},
            "doping": profile_dict(self.doping),
            "lattice": profile_dict(self.lattice),
            "scaled": self.scaled.to_dict(),
            "bias_scaled": self.bias_scaled,
            "bias_volts": self.bias_volts,
            "scheme": self.scheme,
            "newton": {
                "tol_residual": self.newton.tol_residual,
                "max_iter": self.newton.max_iter,
                "damping": self.newton.damping,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceConfig":
        grid = Grid1D(N=int(d["grid"]["N"]), dt=float(d["grid"]["dt"]),
                      t_end=float(d["grid"].get("t_end", 1.0)))
        doping = _profile_from_dict(DopingProfile, d.get("doping", {"kind": "ballistic-diode"}))
        lattice = _profile_from_dict(LatticeProfile, d.get("lattice", {"kind": "constant"}))

        if "scaled" in d:
            scaled = ScaledParams(**d["scaled"])
        else:
            phys = PhysicalParams.from_dict(d.get("physical", {}))
            scaled = compute_scaled(phys)

        bias_volts = d.get("bias_volts")
        if "bias_scaled" in d and d["bias_scaled"] is not None:
            bias_scaled = float(d["bias_scaled"])
        elif bias_volts is not None:
            bias_scaled = scale_voltage(float(bias_volts), scaled)
        else:
            bias_scaled = 0.0

        nw = d.get("newton", {})
        newton = NewtonOptions(tol_residual=float(nw.get("tol_residual", 1e-10)),
                               max_iter=int(nw.get("max_iter", 25)),
                               damping=nw.get("damping", "armijo"))
        return cls(grid=grid, doping=doping, lattice=lattice, scaled=scaled,
                   bias_scaled=bias_scaled, bias_volts=bias_volts,
                   scheme=d.get("scheme", SCHEME_CONSISTENT), newton=newton)

    @classmethod
    def from_json(cls, path: str) -> "DeviceConfig":
        with open(path) as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
        # Accept a run manifest as a config (its "config" key holds the document).
        if "config" in d and "grid" not in d:
            d = d["config"]
        return cls.from_dict(d)


def _profile_from_dict(cls, d: dict):
    kind = d.get("kind")
    if kind == "constant":
        return cls(kind="constant", value=float(d.get("value", d.get("c", 1.0))))
    if kind == "tabulated":
        if "path" in d:
            return cls.from_csv(d["path"])
        return cls(kind="tabulated",
                   table_x=np.asarray(d["x"], dtype=np.float64),
                   table_v=np.asarray(d["values"], dtype=np.float64))
    return cls(kind=kind)


@dataclass(frozen=True)
class MonitorBounds:
    """Solution envelopes used as runtime invariants.

    The temperature band [m, M] and nonnegativity of n are enforced hard; the
    density envelopes k0*exp(-alpha t) <= n <= K0*exp(beta t) are report-only
    (their constants depend on configurable thresholds with no tabulated
    values).
    """

    m: float
    M: float
    k0: float
    K0: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not 0 < self.m <= self.M:
            raise ValueError("need 0 < m <= M")
        if not 0 < self.k0 <= self.K0:
            raise ValueError("need 0 < k0 <= K0")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("rates alpha, beta must be >= 0")


def monitor_bounds(cfg: DeviceConfig, kappa1: float = 1.0,
                   n_star_lo: float = 1.0, n_star_hi: float = 1.0) -> MonitorBounds:
    """Evaluate the invariant envelope constants on the grid nodes.

    M  = max(sup theta_L, sup theta_D)         m  = min(inf theta_L, inf theta_D)
    K0 = max(n^*, sup n_I, sup n_D, sup C)     k0 = min(n_*, inf n_I, inf n_D)
    alpha = sup(theta_L)/tau + 1/lambda^2      beta = M / (tau kappa1)
    """
    if kappa1 <= 0:
        raise ValueError("kappa1 must be positive")
    th_l = cfg.lattice_values()
    c = cfg.doping_values()
    bc = cfg.dirichlet()
    n_d = bc[0:2]
    th_d = bc[4:6]
    n_i = cfg.initial_density()

    M = max(float(th_l.max()), float(th_d.max()))
    m = min(float(th_l.min()), float(th_d.min()))
    K0 = max(n_star_hi, float(n_i.max()), float(n_d.max()), float(c.max()))
    k0 = min(n_star_lo, float(n_i.min()), float(n_d.min()))
    alpha = float(th_l.max()) / cfg.scaled.tau + 1.0 / cfg.scaled.lambda2
    beta = M / (cfg.scaled.tau * kappa1)
    return MonitorBounds(m=m, M=M, k0=k0, K0=K0, alpha=alpha, beta=beta)
