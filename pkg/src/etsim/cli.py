"""Command-line entry point: simulate | sweep | mms | scale.

Exit codes: 0 success, 1 usage or solver error, 2 monitor violation.
All CSV output uses '.' decimals, 17 significant digits, LF line endings.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .driver import (MonitorViolationError, NoSteadyStateError,
                     StepFailureError, current_density, flux_uniformity,
                     iv_sweep, run_transient)
from .kernels import BACKEND
from .model import DeviceConfig, lattice_at, monitor_bounds
from .scaling import PhysicalParams, compute_scaled
from .verify import mms_spatial_order, mms_temporal_order

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MONITOR = 2


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _load_config(path: str, scheme: str | None = None) -> tuple[DeviceConfig, dict]:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if "config" in raw and "grid" not in raw:
        raw = raw["config"]
    cfg = DeviceConfig.from_dict(raw)
    if scheme:
        from dataclasses import replace
        cfg = replace(cfg, scheme=scheme)
    return cfg, raw


def bundled_config_path(name: str) -> Path:
    """Path of a config shipped with the package (e.g. 'ballistic_cooling_U02.json')."""
    return Path(str(resources.files("etsim") / "configs" / name))


def cmd_simulate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg, raw = _load_config(args.config, args.scheme)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    bounds = monitor_bounds(cfg)
    until_steady = bool(raw.get("until_steady", False)) or args.steady
    t0 = time.perf_counter()
    try:
        traj = run_transient(cfg, bounds=bounds, until_steady=until_steady,
                             max_steps=args.max_steps)
    except MonitorViolationError as exc:
        print(f"monitor violation: {exc}", file=sys.stderr)
        return EXIT_MONITOR
    except (StepFailureError, NoSteadyStateError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_ERROR
    elapsed = time.perf_counter() - t0

    x = cfg.grid.x
    for t, state in traj.snapshots:
        k = int(round(t / cfg.grid.dt))
        _write_csv(out / f"profiles_t{k}.csv", ["x", "n", "theta", "V"],
                   zip(x, state.n, state.theta, state.v))
    _write_csv(out / "monitors.csv", ["t", "min_n", "max_n", "min_theta", "max_theta"],
               traj.monitor_log)
    _write_csv(out / "lattice.csv", ["x", "theta_L"], zip(x, cfg.lattice_values()))

    final = traj.final_state
    j = current_density(final, cfg)
    manifest = {
        "config": cfg.to_dict() | {"until_steady": until_steady},
        "scheme": cfg.scheme,
        "version": __version__,
        "backend": BACKEND,
        "timings": {"wall_seconds": elapsed},
        "summary": {
            "steps": len(traj.monitor_log),
            "t_final": final.t,
            "mean_current": float(np.mean(j)),
            "flux_uniformity": flux_uniformity(j),
        },
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    if not args.quiet:
        steps = len(traj.monitor_log)
        print(f"simulate: {steps} steps to t={final.t:.6g} in {elapsed:.2f}s "
              f"({BACKEND} kernels); outputs in {out}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not args.biases:
        print("usage error: --biases must list at least one voltage (e.g. --biases 0.2,1.0)",
              file=sys.stderr)
        return EXIT_ERROR
    try:
        biases = [float(b) for b in args.biases.split(",") if b.strip() != ""]
    except ValueError as exc:
        print(f"usage error: bad bias list: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if not biases:
        print("usage error: empty bias list", file=sys.stderr)
        return EXIT_ERROR

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        cfg, _ = _load_config(args.config, args.scheme)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    points = iv_sweep(cfg, biases, max_steps=args.max_steps)
    _write_csv(out / "iv.csv",
               ["bias_volts", "bias_scaled", "current", "flux_uniformity",
                "newton_iters_total", "status"],
               [(p.bias_volts, p.bias_scaled, p.current, p.flux_uniformity,
                 p.newton_iters_total, p.status) for p in points])
    if not args.quiet:
        for p in points:
            print(f"U = {p.bias_volts:g} V -> I = {p.current:.6g} [{p.status}]")
    return EXIT_OK if all(p.status == "ok" for p in points) else EXIT_ERROR


def cmd_mms(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.mode == "spatial":
            report = mms_spatial_order(base_N=args.base_n, levels=args.levels,
                                       scheme=args.scheme, a=args.amplitude)
        else:
            report = mms_temporal_order(base_dt=args.base_dt, levels=args.levels,
                                        N=args.grid_n, scheme=args.scheme,
                                        a=args.amplitude)
    except (StepFailureError, NoSteadyStateError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_ERROR

    with open(out / "convergence.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    rows = []
    for lv in report.levels:
        rows.append((lv["N"], lv["dt"],
                     lv["err_l2"]["n"], lv["err_l2"]["theta"], lv["err_l2"]["v"],
                     lv["err_max"]["n"], lv["err_max"]["theta"], lv["err_max"]["v"]))
    _write_csv(out / "convergence.csv",
               ["N", "dt", "l2_n", "l2_theta", "l2_v", "max_n", "max_theta", "max_v"],
               rows)

    all_errs = [lv["err_l2"][var] for lv in report.levels for var in ("n", "theta", "v")]
    if max(all_errs) < 1e-12:  # zero-amplitude smoke run
        if not args.quiet:
            print("mms: errors at machine zero")
        return EXIT_OK
    lo, hi = report.min_max_order("l2")
    ok = args.order_min <= lo and hi <= args.order_max
    if not args.quiet:
        print(f"mms {args.mode} ({args.scheme}): observed L2 orders in [{lo:.3f}, {hi:.3f}]; "
              f"window [{args.order_min}, {args.order_max}] -> {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_ERROR


def cmd_scale(args) -> int:
    path = args.params or str(bundled_config_path("table1.json"))
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    required = [f.name for f in fields(PhysicalParams)]
    missing = [name for name in required if name not in raw]
    if missing:
        print(f"error: missing physical parameter(s): {', '.join(missing)}", file=sys.stderr)
        return EXIT_ERROR
    try:
        scaled = compute_scaled(PhysicalParams.from_dict(raw))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(json.dumps(scaled.to_dict(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="etsim",
                                     description="1D energy-transport diode simulator")
    parser.add_argument("--version", action="version", version=f"etsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="transient run, CSV profile/monitor output")
    p.add_argument("--config", required=True, help="device config JSON (or a run manifest)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scheme", choices=["consistent-trapezoidal", "paper-literal"])
    p.add_argument("--steady", action="store_true", help="march until steady state")
    p.add_argument("--max-steps", type=int, default=10**6)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="steady-state IV sweep over applied biases")
    p.add_argument("--config", required=True)
    p.add_argument("--biases", required=True, help="comma-separated list in volts")
    p.add_argument("--out", required=True)
    p.add_argument("--scheme", choices=["consistent-trapezoidal", "paper-literal"])
    p.add_argument("--max-steps", type=int, default=10**6)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mms", help="manufactured-solution convergence study")
    p.add_argument("--mode", choices=["spatial", "temporal"], required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scheme", default="consistent-trapezoidal",
                   choices=["consistent-trapezoidal", "paper-literal", "implicit-euler"])
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--base-n", type=int, default=51, help="coarsest grid (spatial mode)")
    p.add_argument("--base-dt", type=float, default=4e-3, help="coarsest step (temporal mode)")
    p.add_argument("--grid-n", type=int, default=801, help="fixed grid (temporal mode)")
    p.add_argument("--amplitude", type=float, default=0.3)
    p.add_argument("--order-min", type=float, default=1.9)
    p.add_argument("--order-max", type=float, default=2.1)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_mms)

    p = sub.add_parser("scale", help="print the scaled parameters for a parameter file")
    p.add_argument("--params", help="physical parameter JSON (default: bundled values)")
    p.set_defaults(func=cmd_scale)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
