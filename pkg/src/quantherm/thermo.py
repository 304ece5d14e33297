"""Nonequilibrium thermodynamic trajectory: E, S, temperature, F, heat and work.

The dynamical temperature is the ratio of the time derivatives of energy and
entropy along the trajectory.  It diverges and flips sign at entropy extrema;
indices where |dS/dt| falls below a relative floor are flagged as a singular
band rather than emitted as overflowing numbers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .states import CavityState, TlsState, _derivative

S_FLOOR = 1e-3  # relative |dS/dt| threshold defining the singular band
S_ZERO = 1e-12  # below this the state counts as pure and F := E


def energy(state) -> float:
    """Internal energy in units of hbar*omega_s."""
    if isinstance(state, CavityState):
        return float(np.dot(np.arange(state.n_max + 1), state.populations))
    if isinstance(state, TlsState):
        return state.p_excited
    raise TypeError(f"unsupported state type {type(state)!r}")


def entropy(state) -> float:
    """von Neumann entropy of the diagonal state, in units of k."""
    if isinstance(state, CavityState):
        w = state.populations
        w = w[w > 0.0]
        return float(-np.dot(w, np.log(w)))
    if isinstance(state, TlsState):
        p = state.p_excited
        s = 0.0
        if 0.0 < p < 1.0:
            s = -p * np.log(p) - (1.0 - p) * np.log(1.0 - p)
        return float(s)
    raise TypeError(f"unsupported state type {type(state)!r}")


def gibbs_entropy(nbar: float) -> float:
    """Closed-form entropy of the thermal cavity state with mean occupation nbar."""
    if nbar <= 0.0:
        return 0.0
    return float((nbar + 1.0) * np.log(nbar + 1.0) - nbar * np.log(nbar))


def gibbs_populations(nbar: float, n_max: int) -> np.ndarray:
    """Thermal distribution nbar^n / (1 + nbar)^(n+1) up to n_max."""
    n = np.arange(n_max + 1)
    if nbar <= 0.0:
        w = np.zeros(n_max + 1)
        w[0] = 1.0
        return w
    return np.exp(n * np.log(nbar) - (n + 1) * np.log1p(nbar))


def temperature_series(
    e: np.ndarray, s: np.ndarray, h: float, s_floor: float = S_FLOOR
):
    """Dynamical temperature dE/dS with a validity mask.

    Returns (T, valid): T[i] = E'(t_i)/S'(t_i) by centered differences; invalid
    wherever |S'| < s_floor * max|S'| (the singular band around entropy extrema).
    """
    s = np.asarray(s, float)
    de = _derivative(np.asarray(e, float), h)
    ds = _derivative(s, h)
    ds_max = np.max(np.abs(ds))
    # a constant entropy series leaves only stencil round-off in ds
    roundoff = 64.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(s)))) / h
    if ds_max <= roundoff:
        valid = np.zeros(len(ds), bool)
    else:
        valid = np.abs(ds) >= s_floor * ds_max
    # an entropy extremum between two samples still divides the branches:
    # mask the sample closer to the zero crossing of S'
    for i in np.flatnonzero(ds[:-1] * ds[1:] < 0):
        valid[i if abs(ds[i]) <= abs(ds[i + 1]) else i + 1] = False
    t = np.full(len(ds), np.nan)
    t[valid] = de[valid] / ds[valid]
    return t, valid


def free_energy_series(e: np.ndarray, s: np.ndarray, t: np.ndarray, t_valid: np.ndarray):
    """Helmholtz free energy F = E - T*S with a validity mask.

    At S = 0 the product vanishes identically, so F := E there regardless of
    the temperature flag.
    """
    e = np.asarray(e, float)
    s = np.asarray(s, float)
    pure = s < S_ZERO
    f_valid = t_valid | pure
    f = np.full(len(e), np.nan)
    f[t_valid] = e[t_valid] - t[t_valid] * s[t_valid]
    f[pure] = e[pure]
    return f, f_valid


def singular_bands(valid: np.ndarray):
    """Contiguous runs of invalid indices, as (start, end) inclusive pairs."""
    bands = []
    start = None
    for i, ok in enumerate(valid):
        if not ok and start is None:
            start = i
        elif ok and start is not None:
            bands.append((start, i - 1))
            start = None
    if start is not None:
        bands.append((start, len(valid) - 1))
    return bands


def heat_and_work(e: np.ndarray, f: np.ndarray, f_valid: np.ndarray):
    """Cumulative heat Q and work W, accumulated over valid consecutive pairs.

    W = -sum dF and Q = sum (dE - dF); accumulation is suspended across
    singular bands, and the free-energy jump across each band is reported
    separately as a band discontinuity (the inflationary jump lands there).
    The identity Q = sum(dE) + W holds exactly by construction wherever
    accumulated.
    """
    n = len(e)
    q = np.zeros(n)
    w = np.zeros(n)
    discontinuities = []
    last_valid = 0 if f_valid[0] else None
    for i in range(1, n):
        q[i] = q[i - 1]
        w[i] = w[i - 1]
        if not f_valid[i]:
            continue
        if last_valid == i - 1:
            df = f[i] - f[i - 1]
            w[i] -= df
            q[i] += (e[i] - e[i - 1]) - df
        elif last_valid is not None:
            discontinuities.append(
                {"from_index": last_valid, "to_index": i, "delta_f": float(f[i] - f[last_valid])}
            )
        last_valid = i
    return q, w, discontinuities


@dataclass(frozen=True)
class ThermoTrajectory:
    """Thermodynamic series on the output grid, with singularity bookkeeping."""

    times: np.ndarray
    energy: np.ndarray
    entropy: np.ndarray
    temperature: np.ndarray
    temp_valid: np.ndarray
    free_energy: np.ndarray
    f_valid: np.ndarray
    heat_cum: np.ndarray
    work_cum: np.ndarray
    singular_indices: list
    band_discontinuities: list

    @classmethod
    def from_series(cls, times: np.ndarray, e: np.ndarray, s: np.ndarray) -> "ThermoTrajectory":
        h = times[1] - times[0]
        t, t_valid = temperature_series(e, s, h)
        f, f_valid = free_energy_series(e, s, t, t_valid)
        q, w, disc = heat_and_work(e, f, f_valid)
        bands = singular_bands(t_valid)
        singular = [i for b in bands for i in range(b[0], b[1] + 1)]
        return cls(times, e, s, t, t_valid, f, f_valid, q, w, singular, disc)

    def bands(self):
        return singular_bands(self.temp_valid)

    def last_valid_temperature(self):
        """(index, T) of the latest output with a valid temperature, or None."""
        idx = np.flatnonzero(self.temp_valid)
        if len(idx) == 0:
            return None
        i = int(idx[-1])
        return i, float(self.temperature[i])
