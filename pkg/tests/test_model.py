"""Tests for grids, device profiles, config serialization, and monitor bounds."""

import json

import numpy as np
import pytest

from etsim import (DeviceConfig, DopingProfile, Grid1D, LatticeProfile, State,
                   doping_at, lattice_at, monitor_bounds)
from etsim.model import SCHEME_CONSISTENT
from etsim.scaling import ScaledParams


def unit_scaled(lambda2=3e-3, tau=3.126):
    return ScaledParams(lambda2=lambda2, tau=tau, kappa0=4.88e-2, t_star=1.0, u_thermal=1.0)


# ---- grid -------------------------------------------------------------------

def test_grid_spacing_and_nodes():
    g = Grid1D(N=201, dt=1.25e-4)
    assert g.dx == pytest.approx(0.005)
    x = g.x
    assert x[0] == 0.0 and x[-1] == 1.0
    assert np.allclose(np.diff(x), g.dx)


def test_grid_rejects_degenerate_inputs():
    with pytest.raises(ValueError):
        Grid1D(N=2, dt=1e-3)
    with pytest.raises(ValueError):
        Grid1D(N=11, dt=0.0)
    with pytest.raises(ValueError):
        Grid1D(N=11, dt=1e-3, t_end=-1.0)


# ---- profiles ---------------------------------------------------------------

def test_ballistic_doping_values():
    prof = DopingProfile(kind="ballistic-diode")
    assert doping_at(prof, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert doping_at(prof, 1.0) == pytest.approx(1.0, abs=1e-12)
    # channel floor: 1 + 0.25 (tanh(-10) - tanh(10))
    assert doping_at(prof, 0.5) == pytest.approx(0.5, abs=1e-8)


def test_ballistic_doping_symmetry():
    x = np.linspace(0.0, 1.0, 101)
    c = doping_at(DopingProfile(kind="ballistic-diode"), x)
    assert np.allclose(c, c[::-1], atol=1e-12)
    assert np.all(c > 0.0) and np.all(c <= 1.0 + 1e-12)


def test_lattice_profiles():
    x = np.linspace(0.0, 1.0, 11)
    cool = lattice_at(LatticeProfile(kind="cooling"), x)
    heat = lattice_at(LatticeProfile(kind="heating"), x)
    assert cool[0] == pytest.approx(0.625) and cool[5] == pytest.approx(0.5)
    assert heat[0] == pytest.approx(1.0) and heat[5] == pytest.approx(1.75)
    assert np.allclose(cool, cool[::-1]) and np.allclose(heat, heat[::-1])


def test_tabulated_profile_interpolates():
    prof = LatticeProfile(kind="tabulated",
                          table_x=np.array([0.0, 1.0]),
                          table_v=np.array([1.0, 2.0]))
    assert lattice_at(prof, 0.25) == pytest.approx(1.25)


def test_profiles_reject_bad_input():
    with pytest.raises(ValueError):
        DopingProfile(kind="gaussian")
    with pytest.raises(ValueError):
        DopingProfile(kind="constant", value=0.0)
    with pytest.raises(ValueError):
        LatticeProfile(kind="tabulated", table_x=np.array([0.0, 1.0]),
                       table_v=np.array([1.0, -1.0]))
    with pytest.raises(ValueError, match="outside"):
        doping_at(DopingProfile(), np.array([-0.1, 0.5]))


def test_profile_from_csv(tmp_path):
    path = tmp_path / "doping.csv"
    path.write_text("0.0,1.0\n0.5,0.5\n1.0,1.0\n")
    prof = DopingProfile.from_csv(str(path))
    assert doping_at(prof, 0.25) == pytest.approx(0.75)


# ---- state ------------------------------------------------------------------

def test_state_pack_unpack_round_trip():
    rng = np.random.default_rng(7)
    n, th, v = rng.uniform(0.5, 1.5, (3, 9))
    s = State(n=n, theta=th, v=v, t=0.25)
    u = s.pack()
    assert np.array_equal(u[0::3], n)
    assert np.array_equal(u[1::3], v)
    assert np.array_equal(u[2::3], th)
    back = State.unpack(u, 0.25)
    assert np.array_equal(back.n, n) and np.array_equal(back.theta, th)
    assert np.array_equal(back.v, v) and back.t == 0.25


def test_state_shape_mismatch():
    with pytest.raises(ValueError):
        State(n=np.ones(5), theta=np.ones(4), v=np.ones(5))


# ---- config -----------------------------------------------------------------

def test_dirichlet_data():
    cfg = DeviceConfig(grid=Grid1D(N=11, dt=1e-3),
                       lattice=LatticeProfile(kind="cooling"),
                       scaled=unit_scaled(), bias_scaled=7.7351)
    bc = cfg.dirichlet()
    assert bc[0] == pytest.approx(1.0, abs=1e-12)   # n(0) = C(0)
    assert bc[1] == pytest.approx(1.0, abs=1e-12)
    assert bc[2] == 0.0 and bc[3] == 7.7351          # V(0), V(1)
    assert bc[4] == pytest.approx(0.625)             # theta = theta_L at contacts
    assert bc[5] == pytest.approx(0.625)


def test_initial_density_is_doping():
    cfg = DeviceConfig(grid=Grid1D(N=31, dt=1e-3), scaled=unit_scaled())
    assert np.array_equal(cfg.initial_density(), cfg.doping_values())


def test_with_bias_volts_uses_thermal_voltage():
    cfg = DeviceConfig(grid=Grid1D(N=11, dt=1e-3),
                       scaled=ScaledParams(lambda2=3e-3, tau=3.126, kappa0=4.88e-2,
                                           t_star=2.879e-13, u_thermal=0.025856))
    biased = cfg.with_bias_volts(0.2)
    assert biased.bias_volts == 0.2
    assert biased.bias_scaled == pytest.approx(0.2 / 0.025856)


def test_config_json_round_trip(tmp_path):
    cfg = DeviceConfig(grid=Grid1D(N=51, dt=2e-4, t_end=0.5),
                       lattice=LatticeProfile(kind="heating"),
                       scaled=unit_scaled(), bias_scaled=5.0,
                       scheme=SCHEME_CONSISTENT)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    back = DeviceConfig.from_json(str(path))
    assert back.grid == cfg.grid
    assert back.lattice.kind == "heating"
    assert back.bias_scaled == cfg.bias_scaled
    assert back.scaled == cfg.scaled
    assert back.newton == cfg.newton


def test_config_accepts_physical_block():
    cfg = DeviceConfig.from_dict({"grid": {"N": 11, "dt": 1e-3},
                                  "physical": {}, "bias_volts": 0.2})
    assert cfg.scaled.tau == pytest.approx(3.126, rel=5e-3)
    assert cfg.bias_scaled == pytest.approx(0.2 / cfg.scaled.u_thermal)


def test_config_rejects_unknown_scheme():
    with pytest.raises(ValueError):
        DeviceConfig(grid=Grid1D(N=11, dt=1e-3), scaled=unit_scaled(),
                     scheme="leapfrog")


# ---- monitor bounds ---------------------------------------------------------

def test_monitor_bounds_cooling():
    cfg = DeviceConfig(grid=Grid1D(N=201, dt=1.25e-4),
                       lattice=LatticeProfile(kind="cooling"),
                       scaled=unit_scaled())
    b = monitor_bounds(cfg)
    assert b.m == pytest.approx(0.5)
    assert b.M == pytest.approx(0.625)
    assert b.K0 == pytest.approx(1.0, abs=1e-8)
    assert b.k0 == pytest.approx(0.5, abs=1e-8)
    # alpha = sup(theta_L)/tau + 1/lambda2
    assert b.alpha == pytest.approx(0.625 / 3.126 + 1.0 / 3e-3, rel=1e-10)
    assert b.alpha == pytest.approx(333.53, rel=1e-3)
    assert b.beta == pytest.approx(0.625 / 3.126, rel=1e-10)


def test_monitor_bounds_heating():
    cfg = DeviceConfig(grid=Grid1D(N=201, dt=1.25e-4),
                       lattice=LatticeProfile(kind="heating"),
                       scaled=unit_scaled())
    b = monitor_bounds(cfg)
    assert b.m == pytest.approx(1.0)
    assert b.M == pytest.approx(1.75)


def test_monitor_bounds_rejects_bad_kappa1():
    cfg = DeviceConfig(grid=Grid1D(N=11, dt=1e-3), scaled=unit_scaled())
    with pytest.raises(ValueError):
        monitor_bounds(cfg, kappa1=0.0)
