"""Acceptance gate: one test per primary criterion, one printed verdict each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict lines.
The four reference device runs (cooling/heating lattice at 0.2 V and 1.0 V,
N = 201, dt = 1.25e-4) are shared across criteria through a cached fixture.
"""

import time

import numpy as np
import pytest

from etsim import (DeviceConfig, State, assemble_jacobian, assemble_residual,
                   audit_monitors, compute_scaled, current_density,
                   flux_uniformity, mms_spatial_order, mms_temporal_order,
                   monitor_bounds, run_transient)
from etsim.cli import bundled_config_path
from etsim.model import (SCHEME_CONSISTENT, SCHEME_PAPER_LITERAL,
                         DopingProfile, Grid1D, LatticeProfile)
from etsim.scaling import PhysicalParams, ScaledParams
from etsim.solver import NewtonOptions

RUN_NAMES = ("cooling_U02", "cooling_U10", "heating_U02", "heating_U10")

_cache = {}


def verdict(ok, label):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}")
    assert ok, label


@pytest.fixture(scope="module")
def device_runs():
    if not _cache:
        for name in RUN_NAMES:
            cfg = DeviceConfig.from_json(str(bundled_config_path(f"ballistic_{name}.json")))
            t0 = time.perf_counter()
            traj = run_transient(cfg, until_steady=True)
            wall = time.perf_counter() - t0
            _cache[name] = (cfg, traj, wall)
    return _cache


def test_criterion_01_scaling_reproduction():
    t0 = time.perf_counter()
    s = compute_scaled(PhysicalParams())
    wall = time.perf_counter() - t0
    ok_tau = abs(s.tau - 3.126) / 3.126 <= 5e-3
    ok_lam = abs(s.lambda2 - 3.0e-3) / 3.0e-3 <= 2e-2
    verdict(ok_tau and ok_lam and wall < 1.0,
            f"criterion 1: scaling tau={s.tau:.6g} (0.5% of 3.126), "
            f"lambda2={s.lambda2:.6g} (2% of 3.0e-3), {wall:.3f}s")


def test_criterion_02_temperature_max_principle(device_runs):
    ok = True
    details = []
    for name in RUN_NAMES:
        cfg, traj, wall = device_runs[name]
        b = monitor_bounds(cfg)
        arr = traj.monitor_array()
        run_ok = (arr[:, 3].min() >= b.m - 1e-8 and arr[:, 4].max() <= b.M + 1e-8
                  and wall < 60.0)
        run_ok = run_ok and audit_monitors(traj, b).hard_pass
        ok = ok and run_ok
        details.append(f"{name}: theta in [{arr[:, 3].min():.4g}, {arr[:, 4].max():.4g}]"
                       f" vs [{b.m:.4g}, {b.M:.4g}], {wall:.1f}s")
    verdict(ok, "criterion 2: temperature max principle on all runs; " + "; ".join(details))


def test_criterion_03_nonnegativity(device_runs):
    worst = min(device_runs[name][1].monitor_array()[:, 1].min() for name in RUN_NAMES)
    verdict(worst >= -1e-12, f"criterion 3: min n over all runs and steps = {worst:.6g} >= -1e-12")


def test_criterion_04_equilibrium_fixed_point():
    cfg = DeviceConfig(
        grid=Grid1D(N=101, dt=1e-3, t_end=0.1),
        doping=DopingProfile(kind="constant", value=1.0),
        lattice=LatticeProfile(kind="constant", value=1.0),
        scaled=ScaledParams(lambda2=3e-3, tau=3.126, kappa0=4.88e-2,
                            t_star=1.0, u_thermal=1.0),
        bias_scaled=0.0)
    traj = run_transient(cfg)   # 100 steps
    f = traj.final_state
    dev = max(float(np.max(np.abs(f.n - 1.0))),
              float(np.max(np.abs(f.theta - 1.0))),
              float(np.max(np.abs(f.v))))
    verdict(len(traj.monitor_log) == 100 and dev <= 1e-10,
            f"criterion 4: equilibrium preserved over 100 steps, max deviation {dev:.3g}")


def test_criterion_05_flux_conservation(device_runs):
    ok = True
    details = []
    for name in RUN_NAMES:
        cfg, traj, _ = device_runs[name]
        u = flux_uniformity(current_density(traj.final_state, cfg))
        ok = ok and u <= 1e-6
        details.append(f"{name}: {u:.3g}")
    verdict(ok, "criterion 5: steady-state flux uniformity <= 1e-6; " + "; ".join(details))


def test_criterion_06_jacobian_oracle():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for trial in range(50):
        N = int(rng.integers(5, 22))
        cfg = DeviceConfig(
            grid=Grid1D(N=N, dt=float(rng.uniform(1e-3, 1e-1))),
            doping=DopingProfile(kind="ballistic-diode"),
            lattice=LatticeProfile(kind="cooling" if trial % 2 else "heating"),
            scaled=ScaledParams(lambda2=float(rng.uniform(1e-3, 1.0)),
                                tau=float(rng.uniform(0.5, 5.0)),
                                kappa0=float(rng.uniform(1e-2, 1.0)),
                                t_star=1.0, u_thermal=1.0),
            bias_scaled=float(rng.normal(0.0, 5.0)),
            scheme=SCHEME_CONSISTENT if trial % 3 else SCHEME_PAPER_LITERAL)
        prev = State(n=rng.uniform(0.4, 1.6, N), theta=rng.uniform(0.5, 1.5, N),
                     v=rng.normal(0.0, 2.0, N), t=0.0)
        cur = State(n=rng.uniform(0.4, 1.6, N), theta=rng.uniform(0.5, 1.5, N),
                    v=rng.normal(0.0, 2.0, N), t=cfg.grid.dt)
        analytic = assemble_jacobian(cur, prev, cfg).to_dense()
        u = cur.pack()
        r0 = assemble_residual(cur, prev, cfg)
        numeric = np.empty_like(analytic)
        for j in range(u.size):
            up = u.copy()
            h = 1e-7 * max(1.0, abs(u[j]))
            up[j] += h
            numeric[:, j] = (assemble_residual(State.unpack(up, cur.t), prev, cfg) - r0) / h
        rel = np.max(np.abs(analytic - numeric)) / max(1.0, np.max(np.abs(analytic)))
        worst = max(worst, rel)
    verdict(worst <= 1e-6,
            f"criterion 6: analytic vs FD Jacobian, worst relative error {worst:.3g} over 50 states")


def test_criterion_07_mms_convergence():
    t0 = time.perf_counter()
    sp = mms_spatial_order(base_N=51, levels=4)
    sp_lo, sp_hi = sp.min_max_order("l2")
    tm = mms_temporal_order()
    tm_lo, tm_hi = tm.min_max_order("l2")
    # paper-literal variant: reported only, no threshold
    lit_sp = mms_spatial_order(base_N=51, levels=3, scheme=SCHEME_PAPER_LITERAL)
    lit_tm = mms_temporal_order(levels=3, scheme=SCHEME_PAPER_LITERAL)
    wall = time.perf_counter() - t0
    print(f"       paper-literal orders (informational): "
          f"spatial [{lit_sp.min_max_order('l2')[0]:.3f}, {lit_sp.min_max_order('l2')[1]:.3f}], "
          f"temporal [{lit_tm.min_max_order('l2')[0]:.3f}, {lit_tm.min_max_order('l2')[1]:.3f}]")
    ok = 1.9 <= sp_lo <= sp_hi <= 2.1 and 1.9 <= tm_lo <= tm_hi <= 2.1 and wall < 300.0
    verdict(ok, f"criterion 7: MMS orders spatial [{sp_lo:.3f}, {sp_hi:.3f}], "
                f"temporal [{tm_lo:.3f}, {tm_hi:.3f}] within [1.9, 2.1], {wall:.0f}s")


def test_criterion_08_depletion_near_left_contact(device_runs):
    def ratio(name):
        cfg, traj, _ = device_runs[name]
        sel = cfg.grid.x <= 0.2
        return float(np.min(traj.final_state.n[sel] / cfg.doping_values()[sel]))

    ratios = {name: ratio(name) for name in RUN_NAMES}
    # 1.0 V must deplete the left region below 0.9 for at least one lattice
    # ("either lattice"); 0.2 V must leave it intact for both
    ok = (min(ratios["cooling_U10"], ratios["heating_U10"]) < 0.9
          and ratios["cooling_U02"] > 0.95 and ratios["heating_U02"] > 0.95)
    details = "; ".join(f"{k}: min n/C on [0,0.2] = {v:.4f}" for k, v in ratios.items())
    verdict(ok, "criterion 8: depletion at 1.0 V (<0.9, either lattice), "
                "none at 0.2 V (>0.95); " + details)


def test_criterion_09_temperature_ordering_cooling(device_runs):
    cfg, traj, _ = device_runs["cooling_U02"]
    f = traj.final_state
    margin = float(np.min(f.theta[1:-1] - cfg.lattice_values()[1:-1]))
    verdict(margin >= -1e-8,
            f"criterion 9: cooling 0.2 V steady theta - theta_L >= {margin:.3g} at interior nodes")


def test_criterion_10_newton_robustness(device_runs):
    worst = max(max(r.iterations for r in device_runs[name][1].newton_reports)
                for name in RUN_NAMES)
    verdict(worst <= 10, f"criterion 10: max Newton iterations per step = {worst} <= 10")
