"""Reduced states and master-equation coefficients from Green's-function data."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb, gammaln, logsumexp

from .greens import GreensTrajectory
from .numerics import ComplexSeries, NumericsError

log = logging.getLogger(__name__)

# below this |u| the logarithmic derivative u'/u is numerically meaningless
U_FLOOR = 1e-8
# treat v below this as vacuum when evaluating the population formula
V_VACUUM = 1e-12
TAIL_TOL = 1e-12
NORM_TOL = 1e-9
P_CLAMP_TOL = 1e-6


@dataclass(frozen=True)
class CavityState:
    """Diagonal Fock-ladder populations W_n at one instant."""

    time: float
    populations: np.ndarray
    n0: int

    def __post_init__(self):
        w = np.asarray(self.populations, dtype=float)
        total = w.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise NumericsError(
                f"populations at t={self.time:.6g} sum to {total!r}; "
                "truncation tail not converged"
            )
        w.setflags(write=False)
        object.__setattr__(self, "populations", w)

    @property
    def n_max(self) -> int:
        return len(self.populations) - 1


@dataclass(frozen=True)
class TlsState:
    """Two-level diagonal state {p, 1 - p}; coherences vanish for the
    initially-excited / vacuum-bath preparation."""

    time: float
    p_excited: float
    clamped: bool = False


@dataclass(frozen=True)
class MasterEqCoefficients:
    """Renormalized frequency and dissipation/fluctuation rates at one instant.

    `valid` is False where |u| has fallen below the floor and the logarithmic
    derivative is undefined; the numeric fields are NaN there.
    """

    time: float
    omega_renorm: float
    gamma: float
    gamma_tilde: float
    valid: bool = True


def _populations_thermal_mix(n0: int, a: float, v: float, n_max: int) -> np.ndarray:
    """Log-space evaluation of the closed-form W_n for v > 0."""
    n = np.arange(n_max + 1)
    k = np.arange(n0 + 1)
    log_v = np.log(v)
    log_1p_v = np.log1p(v)
    log_1m_a = np.log1p(-a)
    base = n * log_v - (n + 1) * log_1p_v + n0 * log_1m_a
    if a == 0.0:
        return np.exp(base)  # only the k = 0 term survives
    log_r = np.log(a) - log_v - log_1m_a
    # binomial(n0, k) * binomial(n, k) * r^k, summed over k <= min(n0, n)
    terms = (
        gammaln(n0 + 1) - gammaln(k + 1) - gammaln(n0 - k + 1)
        + gammaln(n[:, None] + 1) - gammaln(k[None, :] + 1)
        - gammaln(np.maximum(n[:, None] - k[None, :], 0) + 1)
        + k[None, :] * log_r
    )
    terms = np.where(k[None, :] > n[:, None], -np.inf, terms)
    return np.exp(base + logsumexp(terms, axis=1))


def cavity_populations(traj: GreensTrajectory, n0: int, time_index: int) -> CavityState:
    """Fock populations W_n^{n0} at the given grid index.

    Evaluated in log space (log-gamma binomials); the vacuum limit v -> 0
    reduces to the binomial distribution in A.  The truncation n_max grows
    until the geometric tail bound drops below 1e-12.
    """
    if n0 < 0:
        raise ValueError(f"n0 must be >= 0, got {n0}")
    t = traj.grid.times[time_index]
    v = float(traj.v[time_index])
    a = float(traj.a[time_index])

    if v < V_VACUUM:
        n = np.arange(n0 + 1)
        w = comb(n0, n) * a**n * (1.0 - a) ** (n0 - n)
        return CavityState(t, w, n0)

    if a >= 1.0 - 1e-12:
        raise NumericsError(
            f"A={a!r} with v={v!r} at t={t:.6g}: inconsistent trajectory"
        )

    n_max = n0 + int(np.ceil(25.0 * (v + 1.0)))
    while True:
        w = _populations_thermal_mix(n0, a, v, n_max)
        # tail of the v/(1+v) geometric envelope beyond n_max
        if w[-1] * v < TAIL_TOL:
            break
        n_max = int(1.5 * n_max) + 10
    return CavityState(t, w, n0)


def mean_photon_number(state: CavityState) -> float:
    """Sum of n * W_n."""
    return float(np.dot(np.arange(state.n_max + 1), state.populations))


def moment_identity_residual(state: CavityState, traj: GreensTrajectory, time_index: int) -> float:
    """|sum n W_n - (n0 |u|^2 + v)|, an independent consistency check."""
    expected = (
        state.n0 * abs(traj.u.values[time_index]) ** 2 + traj.v[time_index]
    )
    return abs(mean_photon_number(state) - expected)


def tls_population(u: ComplexSeries, time_index: int) -> TlsState:
    """Excited-state population p(t) = |u(t)|^2 (initially excited, vacuum bath)."""
    t = u.grid.times[time_index]
    p = abs(u.values[time_index]) ** 2
    if p > 1.0 + P_CLAMP_TOL:
        raise NumericsError(f"|u|^2 = {p!r} > 1 at t={t:.6g}: unphysical propagator")
    clamped = p > 1.0
    if clamped:
        log.debug("clamped p=%r to 1 at t=%.6g", p, t)
    return TlsState(t, min(p, 1.0), clamped)


def _derivative(series: np.ndarray, h: float) -> np.ndarray:
    """Centered differences, second-order one-sided stencils at the ends."""
    y = np.asarray(series)
    d = np.empty_like(y)
    d[1:-1] = (y[2:] - y[:-2]) / (2.0 * h)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * h)
    return d


def master_eq_coefficients(traj: GreensTrajectory, time_index: int) -> MasterEqCoefficients:
    """omega_s'(t), gamma(t), gamma_tilde(t) from finite differences of u and v.

    Flagged invalid (NaN fields) where |u| < U_FLOOR: u'/u has no meaning at
    the zeros that the strong-coupling propagator passes through.
    """
    t = traj.grid.times[time_index]
    u = traj.u.values[time_index]
    if abs(u) < U_FLOOR:
        return MasterEqCoefficients(t, np.nan, np.nan, np.nan, valid=False)
    h = traj.grid.h
    udot = _derivative(traj.u.values, h)[time_index]
    vdot = _derivative(traj.v, h)[time_index]
    ratio = udot / u
    omega_renorm = -ratio.imag
    gamma = -ratio.real
    gamma_tilde = float(vdot) - 2.0 * float(traj.v[time_index]) * ratio.real
    return MasterEqCoefficients(t, omega_renorm, gamma, gamma_tilde)
