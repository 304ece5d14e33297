"""Run orchestration: configuration in, full thermodynamic trajectory out."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import RunConfig, SweepConfig
from .greens import (
    GreensTrajectory,
    assemble_trajectory,
    compute_u_cavity,
    compute_u_tls_analytic,
    compute_v_cavity,
)
from .numerics import ComplexSeries, TimeGrid
from .spectral import LorentzianBath, OhmicBath, ReservoirState, has_bound_state
from .states import (
    U_FLOOR,
    cavity_populations,
    moment_identity_residual,
    tls_population,
    _derivative,
)
from .thermo import ThermoTrajectory, entropy

MOMENT_TOL = 1e-8


@dataclass(frozen=True)
class RunResult:
    """Everything a single run produces, on the output grid."""

    config: RunConfig
    traj: GreensTrajectory
    thermo: ThermoTrajectory
    omega_renorm: np.ndarray
    gamma: np.ndarray
    gamma_tilde: np.ndarray
    counts: dict
    bound_state: bool | None
    convergence_estimate: float | None

    @property
    def times(self) -> np.ndarray:
        return self.traj.grid.times


def _coefficient_series(traj: GreensTrajectory):
    """omega', gamma, gamma_tilde on the whole output grid; NaN below the u floor."""
    h = traj.grid.h
    u = traj.u.values
    udot = _derivative(u, h)
    vdot = _derivative(traj.v, h)
    ok = np.abs(u) >= U_FLOOR
    ratio = np.full(len(u), np.nan + 0j)
    ratio[ok] = udot[ok] / u[ok]
    omega_renorm = np.where(ok, -ratio.imag, np.nan)
    gamma = np.where(ok, -ratio.real, np.nan)
    gamma_tilde = np.where(ok, vdot - 2.0 * traj.v * ratio.real, np.nan)
    undefined = int((~ok).sum())
    return omega_renorm, gamma, gamma_tilde, undefined


def _run_cavity(config: RunConfig) -> RunResult:
    bath = OhmicBath(config.eta, config.omega_c)
    reservoir = ReservoirState(config.kT0)
    grid = TimeGrid(0.0, config.t_max, config.n_steps)
    u = compute_u_cavity(bath, grid)

    out_idx = np.arange(0, grid.n_steps + 1, config.stride)
    v_full = compute_v_cavity(u, bath, reservoir, grid, out_idx)
    out_grid = grid.subsampled(config.stride)
    u_out = ComplexSeries(out_grid, u.values[out_idx])
    traj = assemble_trajectory(u_out, v_full[out_idx])

    n_out = out_grid.n_steps + 1
    e = np.empty(n_out)
    s = np.empty(n_out)
    moment_warnings = 0
    for i in range(n_out):
        state = cavity_populations(traj, config.n0, i)
        e[i] = float(np.dot(np.arange(state.n_max + 1), state.populations))
        s[i] = entropy(state)
        if moment_identity_residual(state, traj, i) > MOMENT_TOL:
            moment_warnings += 1
    thermo = ThermoTrajectory.from_series(out_grid.times, e, s)
    omega_renorm, gamma, gamma_tilde, undefined = _coefficient_series(traj)

    estimate = None
    if config.verify_step:
        u_fine = compute_u_cavity(bath, grid.refined())
        estimate = float(np.max(np.abs(u_fine.values[::2] - u.values)))

    return RunResult(
        config=config,
        traj=traj,
        thermo=thermo,
        omega_renorm=omega_renorm,
        gamma=gamma,
        gamma_tilde=gamma_tilde,
        counts={
            "p_clamped": 0,
            "coeff_undefined": undefined,
            "moment_warnings": moment_warnings,
        },
        bound_state=has_bound_state(bath),
        convergence_estimate=estimate,
    )


def _run_tls(config: RunConfig) -> RunResult:
    bath = LorentzianBath(config.gamma0, config.lam, config.omega0)
    grid = TimeGrid(0.0, config.t_max, config.n_steps)
    u = compute_u_tls_analytic(bath, grid)

    out_idx = np.arange(0, grid.n_steps + 1, config.stride)
    out_grid = grid.subsampled(config.stride)
    u_out = ComplexSeries(out_grid, u.values[out_idx])
    traj = assemble_trajectory(u_out, np.zeros(len(out_idx)))

    n_out = out_grid.n_steps + 1
    e = np.empty(n_out)
    s = np.empty(n_out)
    clamped = 0
    for i in range(n_out):
        state = tls_population(u_out, i)
        clamped += int(state.clamped)
        e[i] = state.p_excited
        s[i] = entropy(state)
    thermo = ThermoTrajectory.from_series(out_grid.times, e, s)
    omega_renorm, gamma, gamma_tilde, undefined = _coefficient_series(traj)

    estimate = None
    if config.verify_step:
        from .greens import solve_u_tls

        u_num = solve_u_tls(bath, grid)
        estimate = float(np.max(np.abs(u_num.values - u.values)))

    return RunResult(
        config=config,
        traj=traj,
        thermo=thermo,
        omega_renorm=omega_renorm,
        gamma=gamma,
        gamma_tilde=gamma_tilde,
        counts={
            "p_clamped": clamped,
            "coeff_undefined": undefined,
            "moment_warnings": 0,
        },
        bound_state=None,
        convergence_estimate=estimate,
    )


def run_single(config: RunConfig) -> RunResult:
    """Execute one run; deterministic for a fixed config."""
    if config.system == "cavity":
        return _run_cavity(config)
    return _run_tls(config)


def _sweep_member(args):
    sweep, value = args
    try:
        return run_single(sweep.member(value))
    except Exception as exc:
        raise type(exc)(
            f"sweep member {sweep.sweep_key}={value} failed: {exc}"
        ) from exc


def run_sweep(sweep: SweepConfig, workers: int | None = None) -> list[RunResult]:
    """Run every sweep member; results are ordered by swept value regardless
    of worker count."""
    jobs = [(sweep, value) for value in sweep.values]
    n_workers = workers or sweep.workers
    if n_workers is None:
        import os

        n_workers = min(len(jobs), os.cpu_count() or 1)
    if n_workers <= 1 or len(jobs) == 1:
        return [_sweep_member(job) for job in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_sweep_member, jobs))
