"""Acceptance gate: nine end-to-end criteria, one summary line each.

Each test evaluates one criterion at its stated tolerance and records a
PASS/FAIL line that pytest prints in the terminal summary.  Three clauses are
marked xfail(strict=True): they demand terminal values that the stated
configurations cannot reach because the weak-coupling relaxation time exceeds
the requested horizon (see the companion long-horizon tests, which verify the
same physics on an adequate horizon).
"""
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from quantherm.config import SWEEP_PRESETS, RunConfig, parse_sweep_config
from quantherm.greens import compute_u_tls_analytic, solve_u_tls
from quantherm.numerics import TimeGrid, solve_volterra
from quantherm.pipeline import run_single, run_sweep
from quantherm.spectral import (
    LorentzianBath,
    OhmicBath,
    ReservoirState,
    thermal_kernel_gtilde,
)
from quantherm.states import cavity_populations, moment_identity_residual
from quantherm.thermo import gibbs_populations

from conftest import derivative_ratio_temperature, record_criterion

# Bose-Einstein occupation 1/(exp(1/15) - 1), frozen from the closed form.
NBAR_15 = 14.505555144076464
# Thermal-state entropy (nbar+1)ln(nbar+1) - nbar ln(nbar) at nbar = NBAR_15.
GIBBS_S_15 = 3.7082353657136906


def test_tls_propagator_matches_closed_form():
    """Criterion 1: Volterra solve against the analytic two-level propagator."""
    start = time.perf_counter()
    worst = 0.0
    for gamma0, lam in ((0.2, 1.0), (1.0, 0.2)):
        bath = LorentzianBath(gamma0, lam)
        n = round((10.0 / gamma0) / (0.002 / gamma0))
        grid = TimeGrid(0.0, 10.0 / gamma0, n)
        err = float(
            np.max(np.abs(solve_u_tls(bath, grid).values - compute_u_tls_analytic(bath, grid).values))
        )
        worst = max(worst, err)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-5 and elapsed < 5.0
    record_criterion(
        "1 (analytic propagator equivalence)", ok,
        f"max |u_num - u_exact| = {worst:.2e} (< 1e-5), {elapsed:.1f} s",
    )
    assert worst < 1e-5
    assert elapsed < 5.0


def _thermal_terminal_clauses(result, index):
    """The four weak-coupling thermalization clauses at one output index."""
    v = float(result.traj.v[index])
    s = float(result.thermo.entropy[index])
    t_dyn = float(derivative_ratio_temperature(result.thermo)[index])
    state = cavity_populations(result.traj, 5, len(result.thermo.times) - 1)
    gibbs = gibbs_populations(NBAR_15, state.n_max)
    w_dev = float(np.max(np.abs(state.populations - gibbs)))
    return {
        "v": (abs(v - 14.506) / 14.506, 0.01, v),
        "T": (abs(t_dyn - 15.0) / 15.0, 0.02, t_dyn),
        "S": (abs(s - 3.703) / 3.703, 0.01, s),
        "W_n": (w_dev, 1e-3, w_dev),
    }


@pytest.mark.xfail(
    strict=True,
    reason="the weak-coupling relaxation time 1/(2 pi J(omega_s)) ~ 97/omega_s "
    "leaves |u(100)| ~ 0.60; the state is still mid-transient at t = 100",
)
def test_weak_coupling_thermalization_at_short_horizon(weak_thermal_run_short):
    """Criterion 2 as stated (t_max = 100): terminal state vs the Gibbs oracle."""
    clauses = _thermal_terminal_clauses(weak_thermal_run_short, -1)
    ok = all(dev < tol for dev, tol, _ in clauses.values())
    detail = ", ".join(f"{k}={val:.4g} (dev {dev:.2e}, tol {tol:g})" for k, (dev, tol, val) in clauses.items())
    record_criterion("2 (thermalization, stated horizon t=100)", ok, detail)
    assert ok


def test_weak_coupling_thermalization_long_horizon(weak_thermal_run):
    """Criterion 2 physics on an adequate horizon: v, T, S checked at t = 450
    (~4.6 relaxation times), the population distribution at t = 1200."""
    i450 = int(round(450.0 / (weak_thermal_run.thermo.times[1] - weak_thermal_run.thermo.times[0])))
    clauses = _thermal_terminal_clauses(weak_thermal_run, i450)
    ok = all(dev < tol for dev, tol, _ in clauses.values())
    detail = ", ".join(f"{k}={val:.4g} (dev {dev:.2e}, tol {tol:g})" for k, (dev, tol, val) in clauses.items())
    record_criterion("2 (thermalization, long horizon)", ok, detail)
    for name, (dev, tol, _) in clauses.items():
        assert dev < tol, f"{name} deviation {dev:.3e} exceeds {tol}"


def _pairwise_terminal_distance(result, index):
    """Max pairwise per-component distance of terminal W_n across n0 = 1, 5, 10.

    u and v do not depend on n0, so the distributions come from one trajectory.
    """
    dists = [cavity_populations(result.traj, n0, index).populations for n0 in (1, 5, 10)]
    m = max(len(d) for d in dists)
    padded = [np.pad(d, (0, m - len(d))) for d in dists]
    return max(
        float(np.max(np.abs(a - b)))
        for i, a in enumerate(padded)
        for b in padded[i + 1:]
    )


@pytest.mark.xfail(
    strict=True,
    reason="|u(100)|^2 ~ 0.36 keeps a strong initial-state imprint at t = 100",
)
def test_initial_state_independence_at_short_horizon(weak_thermal_run_short):
    """Criterion 3 as stated: terminal W_n agree across n0 in {1, 5, 10} at t = 100."""
    dist = _pairwise_terminal_distance(weak_thermal_run_short, -1)
    ok = dist < 1e-3
    record_criterion(
        "3 (initial-state independence, stated horizon t=100)", ok,
        f"max pairwise terminal |dW_n| = {dist:.2e} (tol 1e-3)",
    )
    assert ok


def test_initial_state_independence_long_horizon(weak_thermal_run):
    """Criterion 3 physics on an adequate horizon (t = 1200)."""
    dist = _pairwise_terminal_distance(weak_thermal_run, -1)
    record_criterion(
        "3 (initial-state independence, long horizon)", dist < 1e-3,
        f"max pairwise terminal |dW_n| = {dist:.2e} (tol 1e-3)",
    )
    assert dist < 1e-3


def test_strong_coupling_breaks_thermalization(strong_run):
    """Criterion 4: bound-state plateau, energy backflow, non-Gibbs steady state."""
    u_abs = np.abs(strong_run.traj.u.values)
    t = strong_run.thermo.times
    plateau = float(u_abs[t >= 50.0].min())

    e = strong_run.thermo.energy
    maxima = np.flatnonzero((e[1:-1] > e[:-2]) & (e[1:-1] > e[2:])) + 1
    backflow = len(maxima) > 0

    state = cavity_populations(strong_run.traj, 5, len(t) - 1)
    w = state.populations
    significant = w > 1e-6
    nbar = float(np.dot(np.arange(len(w)), w))
    # best Gibbs fit: scan the mean occupation, minimize the worst relative
    # deviation over significant components
    best_fit_dev = min(
        float(np.max(np.abs(w[significant] - g[significant]) / g[significant]))
        for nb in np.linspace(0.8 * nbar, 1.3 * nbar, 201)
        for g in (gibbs_populations(nb, len(w) - 1),)
    )
    non_gibbs = best_fit_dev > 0.05

    ok = plateau > 0.05 and backflow and non_gibbs
    record_criterion(
        "4 (strong-coupling breakdown)", ok,
        f"|u| plateau min = {plateau:.3f} (> 0.05), E backflow maxima = {len(maxima)}, "
        f"best Gibbs fit leaves {best_fit_dev:.1%} deviation (> 5%)",
    )
    assert plateau > 0.05
    assert backflow
    assert non_gibbs


def test_intermediate_coupling_steady_temperature_exceeds_reservoir():
    """Criterion 5: eta/eta_c in {0.1, 0.3, 0.4} reach a steady dynamical
    temperature above T0 = 20 with steadiness by t ~ 25 within a factor 2."""
    details = []
    ok = True
    for fraction in (0.1, 0.3, 0.4):
        cfg = RunConfig(
            system="cavity", eta=fraction * 0.2, omega_c=5.0, n0=5, kT0=20.0,
            t_max=100.0, h=0.01, stride=10,
        )
        result = run_single(cfg)
        t = result.thermo.times
        ratio = derivative_ratio_temperature(result.thermo)
        steady = float(np.median(ratio[t >= 75.0]))
        i50 = int(round(50.0 / (t[1] - t[0])))
        settled = abs(float(ratio[i50]) - steady) <= 0.05 * abs(steady)
        ok = ok and steady > 20.0 and settled
        details.append(f"eta={fraction:g}eta_c: T_steady={steady:.1f}, settled by t=50: {settled}")
    record_criterion("5 (intermediate-coupling steady temperature)", ok, "; ".join(details))
    assert ok, details


def test_vacuum_entropy_extremum_and_third_law(vacuum_run):
    """Criterion 6, cavity clauses: one interior entropy maximum, negative
    temperature before it and positive after, terminal entropy below 1e-3."""
    s = vacuum_run.thermo.entropy
    t = vacuum_run.thermo.times
    interior = np.flatnonzero((s[1:-1] > s[:-2]) & (s[1:-1] > s[2:]) & (s[1:-1] > 1e-6)) + 1
    one_max = len(interior) == 1

    i_max = int(np.argmax(s))
    temp = vacuum_run.thermo.temperature
    valid = vacuum_run.thermo.temp_valid
    idx = np.arange(len(temp))
    before = temp[valid & (idx < i_max)]
    after = temp[valid & (idx > i_max)]
    signs_ok = bool((before < 0).all() and (after > 0).all() and len(before) and len(after))

    s_term = float(s[-1])
    ok = one_max and signs_ok and s_term < 1e-3
    record_criterion(
        "6 (vacuum reservoir: entropy extremum, sign flip, terminal S)", ok,
        f"interior maxima = {len(interior)} (at t={t[i_max]:.0f}), "
        f"T<0 before / T>0 after: {signs_ok}, terminal S = {s_term:.2e} (< 1e-3)",
    )
    assert one_max
    assert signs_ok
    assert s_term < 1e-3


@pytest.mark.xfail(
    strict=True,
    reason="for the vacuum reservoir the dynamical temperature decays only "
    "logarithmically, T ~ 1/(2 gamma t); |T| < 1e-3 needs t ~ 1e5/omega_s, "
    "beyond any feasible O(n^2) Volterra horizon",
)
def test_vacuum_terminal_temperature_scale(vacuum_run):
    """Criterion 6, remaining clause: terminal |T| below 1e-3."""
    last = vacuum_run.thermo.last_valid_temperature()
    t_term = abs(last[1]) if last is not None else float("inf")
    ok = t_term < 1e-3
    record_criterion(
        "6 (vacuum reservoir: terminal |T|)", ok,
        f"last valid |T| = {t_term:.3f} (tol 1e-3)",
    )
    assert ok


def test_tls_entropy_maximum_is_ln2(tls_run):
    """Criterion 6, two-level clause: the entropy maximum equals ln 2 at p = 1/2."""
    s = tls_run.thermo.entropy
    i_max = int(np.argmax(s))
    p_at_max = float(np.abs(tls_run.traj.u.values[i_max]) ** 2)
    dev = abs(float(s[i_max]) - np.log(2.0))
    ok = dev < 1e-3 and abs(p_at_max - 0.5) < 0.01
    record_criterion(
        "6 (two-level atom: entropy maximum)", ok,
        f"max S - ln 2 = {dev:.2e} (< 1e-3) at p = {p_at_max:.4f}",
    )
    assert dev < 1e-3
    assert abs(p_at_max - 0.5) < 0.01


def test_negative_temperature_phase_boundary():
    """Criterion 7: sustained negative-temperature epochs occur exactly for
    reservoir temperatures below the initial energy E0 = 5, to within one
    sweep step (0.5)."""
    start = time.perf_counter()
    sweep = parse_sweep_config(SWEEP_PRESETS["temperature-sweep"])
    results = run_sweep(sweep, workers=4)
    elapsed = time.perf_counter() - start

    def has_late_negative_epoch(result):
        # at least 3 consecutive valid negative samples after the initial
        # transient (t >= 10)
        th = result.thermo
        neg = th.temp_valid & (th.temperature < 0) & (th.times >= 10.0)
        run = best = 0
        for flag in neg:
            run = run + 1 if flag else 0
            best = max(best, run)
        return best >= 3

    epochs = [has_late_negative_epoch(r) for r in results]
    values = np.asarray(sweep.values)
    with_epoch = values[np.asarray(epochs)]
    boundary = float(with_epoch.max()) if len(with_epoch) else float("-inf")
    monotone = all(
        flag == (value <= boundary) for value, flag in zip(values, epochs)
    )
    ok = monotone and abs(boundary - 5.0) <= 0.5 and elapsed < 900.0
    record_criterion(
        "7 (negative-temperature phase boundary)", ok,
        f"epoch boundary kT0 = {boundary:g} (target 5 +- 0.5), monotone: {monotone}, "
        f"sweep wall time {elapsed:.0f} s (< 900)",
    )
    assert monotone
    assert abs(boundary - 5.0) <= 0.5
    assert elapsed < 900.0


def test_invariant_property_suite(weak_thermal_run_short, strong_run, vacuum_run):
    """Criterion 8: normalization, moment identity, first law, vacuum kernel,
    zero-kernel unitarity, and second-order convergence."""
    checks = []

    for result in (weak_thermal_run_short, strong_run, vacuum_run):
        n_out = len(result.thermo.times)
        for index in (0, n_out // 2, n_out - 1):
            state = cavity_populations(result.traj, result.config.n0, index)
            checks.append(("normalization", abs(float(state.populations.sum()) - 1.0), 1e-9))
            checks.append(
                ("moment identity", moment_identity_residual(state, result.traj, index), 1e-8)
            )
        assert result.counts["moment_warnings"] == 0

        th = result.thermo
        res = 0.0
        for i in range(1, n_out):
            if th.f_valid[i] and th.f_valid[i - 1]:
                dq = th.heat_cum[i] - th.heat_cum[i - 1]
                dw = th.work_cum[i] - th.work_cum[i - 1]
                de = th.energy[i] - th.energy[i - 1]
                res = max(res, abs(dq - (de + dw)))
        checks.append(("first law", res, 1e-10))

    bath = OhmicBath(0.002, 5.0)
    gt = thermal_kernel_gtilde(bath, ReservoirState(0.0), np.linspace(0.0, 10.0, 64))
    checks.append(("vacuum kernel", float(np.max(np.abs(gt))), 0.0 + 1e-300))

    grid = TimeGrid(0.0, 20.0, 2000)
    u_free = solve_volterra(lambda dt: np.zeros_like(dt), 1.0, grid)
    checks.append(("zero-kernel unitarity", float(np.max(np.abs(np.abs(u_free.values) - 1.0))), 1e-10))

    bath_tls = LorentzianBath(0.2, 1.0)
    errs = []
    for n in (1000, 2000):
        g = TimeGrid(0.0, 20.0, n)
        errs.append(
            float(np.max(np.abs(solve_u_tls(bath_tls, g).values - compute_u_tls_analytic(bath_tls, g).values)))
        )
    order = float(np.log2(errs[0] / errs[1]))
    checks.append(("convergence order (target 2)", abs(order - 2.0), 0.2))

    ok = all(value <= tol for _, value, tol in checks)
    worst = max(checks, key=lambda c: c[1] / c[2] if c[2] > 0 else 0.0)
    record_criterion(
        "8 (invariant property suite)", ok,
        f"{len(checks)} checks, tightest margin: {worst[0]} = {worst[1]:.2e} (tol {worst[2]:g})",
    )
    for name, value, tol in checks:
        assert value <= tol, f"{name}: {value:.3e} exceeds {tol}"


def test_populations_match_direct_master_equation_integration():
    """Criterion 9: closed-form W_n against brute-force integration of the
    birth-death master equation with the exact time-dependent coefficients."""
    worst = 0.0
    for n0 in (0, 1, 3):
        cfg = RunConfig(
            system="cavity", eta=0.002, omega_c=5.0, n0=n0, kT0=15.0,
            t_max=5.0, h=0.0025, stride=1,
        )
        result = run_single(cfg)
        t = result.thermo.times
        gamma = CubicSpline(t, result.gamma)
        gamma_tilde = CubicSpline(t, result.gamma_tilde)
        n_trunc = 80
        n = np.arange(n_trunc + 1)

        def rhs(tt, w):
            g = gamma(tt)
            gt = gamma_tilde(tt)
            up = np.zeros_like(w)
            up[:-1] = w[1:]
            down = np.zeros_like(w)
            down[1:] = w[:-1]
            return 2.0 * g * ((n + 1) * up - n * w) + gt * (
                n * down + (n + 1) * up - (2 * n + 1) * w
            )

        w0 = np.zeros(n_trunc + 1)
        w0[n0] = 1.0
        sol = solve_ivp(
            rhs, (0.0, 5.0), w0, method="DOP853", rtol=1e-10, atol=1e-12, t_eval=[5.0]
        )
        w_ode = sol.y[:, -1]
        state = cavity_populations(result.traj, n0, len(t) - 1)
        m = min(len(w_ode), len(state.populations))
        worst = max(worst, float(np.max(np.abs(w_ode[:m] - state.populations[:m]))))
    record_criterion(
        "9 (brute-force master-equation oracle)", worst < 1e-5,
        f"max |W_n(ODE) - W_n(closed form)| = {worst:.2e} (< 1e-5)",
    )
    assert worst < 1e-5
