"""Render density/temperature profile panels and IV curves from CSV files.

Only the simulator CLI's documented CSV schemas are consumed:

    profiles_t<k>.csv   x, n, theta, V
    lattice.csv         x, theta_L
    iv.csv              bias_volts, bias_scaled, current, flux_uniformity,
                        newton_iters_total, status

Images are deterministic for identical inputs: no embedded timestamps.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "etsim-plots"

import matplotlib.pyplot as plt
import numpy as np

PROFILE_COLUMNS = ["x", "n", "theta", "V"]
LATTICE_COLUMNS = ["x", "theta_L"]
IV_COLUMNS = ["bias_volts", "bias_scaled", "current", "flux_uniformity",
              "newton_iters_total", "status"]

FORMATS = ("png", "svg")


class SchemaError(ValueError):
    """A CSV file does not match the simulator's documented column schema."""


def _read_csv(path: str, expected: List[str], numeric: Optional[List[str]] = None) -> dict:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != expected:
            bad = next((h for h in header if h not in expected), None) or \
                next((h for h in expected if h not in header), "column order")
            raise SchemaError(f"{path}: header {header} does not match schema "
                              f"{expected} (offending column: {bad!r})")
        rows = [row for row in reader if row]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    columns = {name: [] for name in expected}
    numeric = expected if numeric is None else numeric
    for lineno, row in enumerate(rows, start=2):
        if len(row) != len(expected):
            raise SchemaError(f"{path}:{lineno}: expected {len(expected)} fields, got {len(row)}")
        for name, value in zip(expected, row):
            if name in numeric:
                try:
                    value = float(value)
                except ValueError:
                    raise SchemaError(f"{path}:{lineno}: column {name!r} is not "
                                      f"numeric: {value!r}") from None
            columns[name].append(value)
    return {k: (np.asarray(v) if k in numeric else v) for k, v in columns.items()}


def _snapshot_label(path: str) -> str:
    m = re.search(r"profiles_t(\d+)", Path(path).stem)
    return f"step {m.group(1)}" if m else Path(path).stem


def _check_output(out_path: str) -> str:
    fmt = Path(out_path).suffix.lstrip(".").lower()
    if fmt not in FORMATS:
        raise ValueError(f"unsupported image format {fmt!r}; use one of {FORMATS}")
    return fmt


def _save(fig, out_path: str, fmt: str) -> None:
    metadata = {"Date": None} if fmt == "svg" else {}
    fig.savefig(out_path, format=fmt, metadata=metadata)
    plt.close(fig)


@dataclass(frozen=True)
class PlotSpec:
    """Inputs for one profile figure.

    profile_csvs  snapshot files, plotted oldest to newest
    lattice_csv   optional theta_L overlay for the temperature panel
    out_path      output image; the suffix selects the format (png or svg)
    """

    profile_csvs: List[str] = field(default_factory=list)
    lattice_csv: Optional[str] = None
    out_path: str = "profiles.png"


def plot_profiles(spec: PlotSpec) -> str:
    """Two stacked panels, n(x) and theta(x), one curve per snapshot."""
    if not spec.profile_csvs:
        raise ValueError("PlotSpec.profile_csvs is empty: nothing to plot")
    fmt = _check_output(spec.out_path)
    snapshots = [(path, _read_csv(path, PROFILE_COLUMNS)) for path in spec.profile_csvs]
    lattice = _read_csv(spec.lattice_csv, LATTICE_COLUMNS) if spec.lattice_csv else None

    fig, (ax_n, ax_th) = plt.subplots(2, 1, sharex=True, figsize=(6.0, 7.0))
    for path, data in snapshots:
        label = _snapshot_label(path)
        ax_n.plot(data["x"], data["n"], label=label)
        ax_th.plot(data["x"], data["theta"], label=label)
    if lattice is not None:
        ax_th.plot(lattice["x"], lattice["theta_L"], "k--", label=r"$\theta_L$")
    ax_n.set_ylabel("electron density $n$")
    ax_th.set_ylabel(r"temperature $\theta$")
    ax_th.set_xlabel("position $x$")
    ax_n.legend(fontsize="small")
    ax_th.legend(fontsize="small")
    fig.tight_layout()
    _save(fig, spec.out_path, fmt)
    return spec.out_path


def plot_iv(iv_csv: str, out_path: str) -> str:
    """Current vs applied bias, line plus markers; failed points are flagged."""
    fmt = _check_output(out_path)
    data = _read_csv(iv_csv, IV_COLUMNS,
                     numeric=[c for c in IV_COLUMNS if c != "status"])
    order = np.argsort(data["bias_volts"])
    bias = data["bias_volts"][order]
    current = data["current"][order]
    status = [data["status"][i] for i in order]
    ok = np.array([s == "ok" for s in status])

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(bias[ok], current[ok], "o-")
    if not ok.all():
        ax.plot(bias[~ok], np.zeros(np.count_nonzero(~ok)), "rx", label="failed")
        ax.legend(fontsize="small")
    ax.set_xlabel("applied bias $U$ (V)")
    ax.set_ylabel("scaled current $J$")
    fig.tight_layout()
    _save(fig, out_path, fmt)
    return out_path
