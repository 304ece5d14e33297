"""Trajectory CSV, JSON run report, and sweep CSV writers/readers.

All outputs are byte-deterministic for a fixed config and code version:
floats are written with repr (shortest round-trip form) and no timestamps
are embedded.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, SweepConfig, parse_run_config
from .pipeline import RunResult

UNITS_NOTE = (
    "hbar = k = 1, omega_s = 1; time in 1/omega_s, energy in hbar*omega_s, "
    "temperature in hbar*omega_s/k, entropy in k"
)

TRAJECTORY_COLUMNS = (
    "time", "re_u", "im_u", "abs_u", "v", "energy", "entropy",
    "temperature", "temp_valid", "free_energy", "f_valid",
    "heat_cum", "work_cum", "omega_renorm", "gamma", "gamma_tilde",
)

SWEEP_COLUMNS = ("swept_key", "swept_value", "time", "energy", "temperature", "temp_valid")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "nan" if np.isnan(x) else repr(x)


def write_trajectory_csv(path, result: RunResult) -> None:
    u = result.traj.u.values
    th = result.thermo
    rows = zip(
        th.times, u.real, u.imag, np.abs(u), result.traj.v, th.energy, th.entropy,
        th.temperature, th.temp_valid, th.free_energy, th.f_valid,
        th.heat_cum, th.work_cum, result.omega_renorm, result.gamma, result.gamma_tilde,
    )
    with open(path, "w") as fh:
        fh.write("# quantherm trajectory v1\n")
        fh.write(f"# units: {UNITS_NOTE}\n")
        fh.write(f"# code_version: {__version__}\n")
        fh.write(",".join(TRAJECTORY_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_trajectory_csv(path) -> dict:
    """Columns of a trajectory CSV as float arrays keyed by name."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    names = lines[0].strip().split(",")
    data = np.array(
        [[float(tok) for tok in ln.strip().split(",")] for ln in lines[1:]]
    )
    return {name: data[:, i] for i, name in enumerate(names)}


def run_report(result: RunResult) -> dict:
    th = result.thermo
    last_valid = th.last_valid_temperature()
    terminal = {
        "time": float(th.times[-1]),
        "abs_u": float(abs(result.traj.u.values[-1])),
        "v": float(result.traj.v[-1]),
        "energy": float(th.energy[-1]),
        "entropy": float(th.entropy[-1]),
        "temperature": None if np.isnan(th.temperature[-1]) else float(th.temperature[-1]),
        "temperature_valid": bool(th.temp_valid[-1]),
        "last_valid_temperature": None if last_valid is None else last_valid[1],
        "heat_cum": float(th.heat_cum[-1]),
        "work_cum": float(th.work_cum[-1]),
    }
    return {
        "schema_version": 1,
        "code_version": __version__,
        "units": UNITS_NOTE,
        "config": result.config.to_dict(),
        "bound_state": result.bound_state,
        "convergence_estimate": result.convergence_estimate,
        "counts": result.counts,
        "singular_bands": [list(b) for b in th.bands()],
        "band_discontinuities": th.band_discontinuities,
        "terminal": terminal,
    }


def write_report_json(path, result: RunResult) -> None:
    with open(path, "w") as fh:
        json.dump(run_report(result), fh, indent=2)
        fh.write("\n")


def config_from_report(path) -> RunConfig:
    """Round-trip: rebuild the RunConfig from a report's config echo."""
    with open(path) as fh:
        echo = json.load(fh)["config"]
    lines = []
    for key, value in echo.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{key} = {value}")
    return parse_run_config("\n".join(lines))


def write_sweep_csv(path, sweep: SweepConfig, results: list[RunResult]) -> None:
    with open(path, "w") as fh:
        fh.write("# quantherm sweep v1\n")
        fh.write(f"# units: {UNITS_NOTE}\n")
        fh.write(f"# code_version: {__version__}\n")
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for value, result in zip(sweep.values, results):
            th = result.thermo
            for i, t in enumerate(th.times):
                row = (
                    sweep.sweep_key, _fmt(value), _fmt(t), _fmt(th.energy[i]),
                    _fmt(th.temperature[i]), _fmt(th.temp_valid[i]),
                )
                fh.write(",".join(row) + "\n")


def read_sweep_csv(path) -> dict:
    """Sweep CSV as {swept_value: {column: array}} plus the swept key."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    names = lines[0].strip().split(",")
    out: dict = {"swept_key": None, "rows": {}}
    for ln in lines[1:]:
        toks = ln.strip().split(",")
        rec = dict(zip(names, toks))
        out["swept_key"] = rec["swept_key"]
        val = float(rec["swept_value"])
        bucket = out["rows"].setdefault(val, {n: [] for n in names[2:]})
        for n in names[2:]:
            bucket[n].append(float(rec[n]))
    for val, bucket in out["rows"].items():
        for n in bucket:
            bucket[n] = np.asarray(bucket[n])
    return out
