"""Verification harness: manufactured solutions, convergence orders, monitors.

The manufactured solution

    n*(x,t)  = 1 + (a/2) sin(pi x) exp(-t)
    th*(x,t) = 1 + (a/4) cos(pi x) exp(-t)
    V*(x,t)  = a x (1 - x) exp(-t)

is substituted into the continuous equations (with the n*theta conductivity
law, constant unit doping and lattice temperature) to obtain closed-form
source terms.  The derivations below are straight product/chain rule; tests
cross-check them against a high-order numerical differentiation oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .assembly import MmsForcing
from .driver import Trajectory, run_transient
from .model import (SCHEME_CONSISTENT, DeviceConfig, DopingProfile, Grid1D,
                    LatticeProfile, MonitorBounds)
from .scaling import ScaledParams
from .solver import NewtonOptions

PI = math.pi


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form fields and induced forcings, amplitude a in (0, 1)."""

    a: float = 0.3
    lambda2: float = 0.05
    tau: float = 2.0
    kappa0: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.a < 1.0:
            raise ValueError("amplitude must lie in [0, 1) to keep n, theta positive")

    # ---- fields --------------------------------------------------------------

    def n(self, x, t):
        return 1.0 + 0.5 * self.a * np.sin(PI * x) * np.exp(-t)

    def theta(self, x, t):
        return 1.0 + 0.25 * self.a * np.cos(PI * x) * np.exp(-t)

    def v(self, x, t):
        return self.a * x * (1.0 - x) * np.exp(-t)

    # ---- forcings -------------------------------------------------------------

    def f_n(self, x, t):
        """f_n = dn/dt - d2(n th)/dx2 - d(n dV/dx)/dx."""
        a, e = self.a, np.exp(-t)
        s, c = np.sin(PI * x), np.cos(PI * x)
        n = 1.0 + 0.5 * a * s * e
        th = 1.0 + 0.25 * a * c * e
        n_t = -0.5 * a * s * e
        n_x = 0.5 * a * PI * c * e
        n_xx = -0.5 * a * PI**2 * s * e
        th_x = -0.25 * a * PI * s * e
        th_xx = -0.25 * a * PI**2 * c * e
        v_x = a * (1.0 - 2.0 * x) * e
        v_xx = -2.0 * a * e
        p_xx = n_xx * th + 2.0 * n_x * th_x + n * th_xx
        drift = n_x * v_x + n * v_xx
        return n_t - p_xx - drift

    def f_theta(self, x, t):
        """f_th = kap0 * d(n th dth/dx)/dx - (n/tau)(th - 1)."""
        a, e = self.a, np.exp(-t)
        s, c = np.sin(PI * x), np.cos(PI * x)
        n = 1.0 + 0.5 * a * s * e
        th = 1.0 + 0.25 * a * c * e
        n_x = 0.5 * a * PI * c * e
        th_x = -0.25 * a * PI * s * e
        th_xx = -0.25 * a * PI**2 * c * e
        p = n * th
        p_x = n_x * th + n * th_x
        return self.kappa0 * (p_x * th_x + p * th_xx) - (n / self.tau) * (th - 1.0)

    def f_v(self, x, t):
        """f_V = -lam2 * d2V/dx2 - (n - 1)."""
        a, e = self.a, np.exp(-t)
        return 2.0 * a * self.lambda2 * e - 0.5 * a * np.sin(PI * x) * e

    def forcing(self) -> MmsForcing:
        # n_b doubles as the initial-density field: the closed form is global.
        return MmsForcing(f_n=self.f_n, f_theta=self.f_theta, f_v=self.f_v,
                          n_b=self.n, theta_b=self.theta, v_b=self.v)

    def config(self, N: int, dt: float, t_end: float,
               scheme: str = SCHEME_CONSISTENT,
               tol_residual: Optional[float] = None) -> DeviceConfig:
        if tol_residual is None:
            # The residual carries 1/dx^2 row scaling, so its roundoff floor
            # grows with resolution; stay a safe factor above it.
            dx = 1.0 / (N - 1)
            tol_residual = max(1e-10, 1e-15 / (dx * dx))
        scaled = ScaledParams(lambda2=self.lambda2, tau=self.tau,
                              kappa0=self.kappa0, t_star=1.0, u_thermal=1.0)
        return DeviceConfig(
            grid=Grid1D(N=N, dt=dt, t_end=t_end),
            doping=DopingProfile(kind="constant", value=1.0),
            lattice=LatticeProfile(kind="constant", value=1.0),
            scaled=scaled, bias_scaled=0.0, scheme=scheme,
            newton=NewtonOptions(tol_residual=tol_residual, max_iter=50))


@dataclass
class ConvergenceReport:
    """Errors and observed orders of one refinement study."""

    mode: str                      # "spatial" or "temporal"
    scheme: str
    levels: List[dict] = field(default_factory=list)
    # each level: {"N":..., "dt":..., "err_l2": {...}, "err_max": {...}}

    def orders(self, norm: str = "l2") -> dict:
        """Observed order per variable and refinement pair (refinement factor 2)."""
        key = f"err_{norm}"
        out = {var: [] for var in ("n", "theta", "v")}
        for coarse, fine in zip(self.levels[:-1], self.levels[1:]):
            for var in out:
                e0, e1 = coarse[key][var], fine[key][var]
                out[var].append(math.log2(e0 / e1) if e1 > 0 and e0 > 0 else math.inf)
        return out

    def min_max_order(self, norm: str = "l2") -> tuple[float, float]:
        allords = [o for seq in self.orders(norm).values() for o in seq]
        return min(allords), max(allords)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "scheme": self.scheme, "levels": self.levels,
                "orders_l2": self.orders("l2"), "orders_max": self.orders("max")}


def _errors(final, mms: ManufacturedSolution, x, t, dx) -> tuple[dict, dict]:
    """Interior-node discrete L2 and max errors per variable."""
    exact = {"n": mms.n(x, t), "theta": mms.theta(x, t), "v": mms.v(x, t)}
    num = {"n": final.n, "theta": final.theta, "v": final.v}
    err_l2, err_max = {}, {}
    for var in exact:
        e = (num[var] - exact[var])[1:-1]  # Dirichlet nodes are exact by construction
        err_l2[var] = float(np.sqrt(np.sum(e * e) * dx))
        err_max[var] = float(np.max(np.abs(e)))
    return err_l2, err_max


def mms_spatial_order(base_N: int = 51, levels: int = 4,
                      scheme: str = SCHEME_CONSISTENT, a: float = 0.3,
                      t_end: float = 0.1, dt_factor: float = 1.0) -> ConvergenceReport:
    """Refine the grid with dt proportional to dx^2 so time error is subdominant."""
    if levels < 2:
        raise ValueError("need at least 2 refinement levels")
    mms = ManufacturedSolution(a=a)
    report = ConvergenceReport(mode="spatial", scheme=scheme)
    for j in range(levels):
        N = (base_N - 1) * 2**j + 1
        dx = 1.0 / (N - 1)
        dt_target = dt_factor * dx * dx
        nsteps = max(1, round(t_end / dt_target))
        dt = t_end / nsteps
        cfg = mms.config(N=N, dt=dt, t_end=t_end, scheme=scheme)
        traj = run_transient(cfg, forcing=mms.forcing())
        err_l2, err_max = _errors(traj.final_state, mms, cfg.grid.x, t_end, dx)
        report.levels.append({"N": N, "dt": dt, "err_l2": err_l2, "err_max": err_max})
    return report


def mms_temporal_order(base_dt: float = 4e-3, levels: int = 4, N: int = 801,
                       scheme: str = SCHEME_CONSISTENT, a: float = 0.3,
                       t_end: float = 0.1, ref_refine: int = 8) -> ConvergenceReport:
    """Halve dt on a fixed grid and measure the order of the time integrator.

    Errors are measured against a fine-dt reference solution on the same grid
    rather than the manufactured fields: on a fixed grid the spatial
    discretization error is a constant offset shared by every dt level, and at
    these step sizes it dominates the temporal error outright, so differencing
    against the reference is the only way to expose the integrator's order.
    """
    if levels < 2:
        raise ValueError("need at least 2 refinement levels")
    mms = ManufacturedSolution(a=a)

    def solve(dt_target: float):
        nsteps = max(1, round(t_end / dt_target))
        dt = t_end / nsteps
        cfg = mms.config(N=N, dt=dt, t_end=t_end, scheme=scheme)
        return run_transient(cfg, forcing=mms.forcing()).final_state, dt

    ref_state, _ = solve(base_dt / 2 ** (levels - 1) / ref_refine)
    dx = 1.0 / (N - 1)

    report = ConvergenceReport(mode="temporal", scheme=scheme)
    for j in range(levels):
        final, dt = solve(base_dt / 2**j)
        err_l2, err_max = {}, {}
        for var in ("n", "theta", "v"):
            e = (getattr(final, var) - getattr(ref_state, var))[1:-1]
            err_l2[var] = float(np.sqrt(np.sum(e * e) * dx))
            err_max[var] = float(np.max(np.abs(e)))
        report.levels.append({"N": N, "dt": dt, "err_l2": err_l2, "err_max": err_max})
    return report


@dataclass
class MonitorAuditReport:
    hard_pass: bool
    violations: List[dict] = field(default_factory=list)
    soft_pass: bool = True
    soft_violations: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"hard_pass": self.hard_pass, "violations": self.violations,
                "soft_pass": self.soft_pass, "soft_violations": self.soft_violations}


def audit_monitors(traj: Trajectory, bounds: MonitorBounds,
                   theta_slack: float = 1e-8, n_slack: float = 1e-12) -> MonitorAuditReport:
    """Check the envelope invariants over a recorded trajectory.

    theta in [m, M] and n >= 0 are hard verdicts; the exponential density
    envelopes are report-only (their constants involve thresholds the model
    does not pin down numerically).  Pure function: never raises.
    """
    report = MonitorAuditReport(hard_pass=True)
    for t, min_n, max_n, min_th, max_th in traj.monitor_log:
        if min_n < -n_slack:
            report.hard_pass = False
            report.violations.append({"field": "n", "t": t, "value": min_n, "bound": 0.0})
        if min_th < bounds.m - theta_slack:
            report.hard_pass = False
            report.violations.append({"field": "theta", "t": t, "value": min_th, "bound": bounds.m})
        if max_th > bounds.M + theta_slack:
            report.hard_pass = False
            report.violations.append({"field": "theta", "t": t, "value": max_th, "bound": bounds.M})
        lo = bounds.k0 * math.exp(-bounds.alpha * t)
        hi = bounds.K0 * math.exp(bounds.beta * t)
        if min_n < lo - 1e-8 or max_n > hi + 1e-8:
            report.soft_pass = False
            report.soft_violations.append({"t": t, "min_n": min_n, "max_n": max_n,
                                           "lo": lo, "hi": hi})
    return report
