"""Green's-function trajectories (u, v, A) for the cavity and the two-level atom."""
from __future__ import annotations

from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy.signal import fftconvolve

from .numerics import ComplexSeries, NumericsError, TimeGrid, solve_volterra
from .spectral import (
    OMEGA_S,
    LorentzianBath,
    OhmicBath,
    ReservoirState,
    lorentzian_kernel_f,
    ohmic_kernel_g,
    thermal_kernel_gtilde,
)

# relative tolerance on the imaginary residue of the (real by construction) v integral
IMAG_RESIDUE_TOL = 1e-8


@dataclass(frozen=True)
class GreensTrajectory:
    """u(t, t0), v(t, t) and A(t, t0) = |u|^2 / (1 + v) on a common grid."""

    grid: TimeGrid
    u: ComplexSeries
    v: np.ndarray
    a: np.ndarray

    def __post_init__(self):
        npts = self.grid.n_steps + 1
        if len(self.u) != npts or len(self.v) != npts or len(self.a) != npts:
            raise ValueError("u, v, a must all live on the trajectory grid")


def compute_u_cavity(bath: OhmicBath, grid: TimeGrid) -> ComplexSeries:
    """Propagator u(t, t0) for the cavity mode coupled to the Ohmic bath."""
    return solve_volterra(partial(ohmic_kernel_g, bath), OMEGA_S, grid)


def compute_u_tls_analytic(bath: LorentzianBath, grid: TimeGrid) -> ComplexSeries:
    """Closed-form propagator for the two-level system with a Lorentzian bath.

    u(t) = exp(-(i*omega_s + lam/2) t) [cosh(G t/2) + (lam/G) sinh(G t/2)]
    with G = sqrt(lam^2 - 2*gamma0*lam) taken in the complex plane; the
    removable G -> 0 singularity is evaluated through sinh(x)/x.
    """
    t = grid.times - grid.t0
    big_g = bath.decay_exponent
    x = 0.5 * big_g * t
    # sinh(x)/x, stable at x ~ 0
    small = np.abs(x) < 1e-6
    sinhc = np.empty_like(x)
    sinhc[small] = 1.0 + x[small] ** 2 / 6.0
    sinhc[~small] = np.sinh(x[~small]) / x[~small]
    envelope = np.cosh(x) + (0.5 * bath.lam * t) * sinhc
    u = np.exp(-(1j * OMEGA_S + 0.5 * bath.lam) * t) * envelope
    return ComplexSeries(grid, u)


def solve_u_tls(bath: LorentzianBath, grid: TimeGrid) -> ComplexSeries:
    """Volterra route to the two-level propagator; oracle partner of the closed form."""
    return solve_volterra(partial(lorentzian_kernel_f, bath), OMEGA_S, grid)


def compute_v_cavity(
    u: ComplexSeries,
    bath: OhmicBath,
    reservoir: ReservoirState,
    grid: TimeGrid,
    indices=None,
) -> np.ndarray:
    """Thermal fluctuation v(t, t) at the requested grid indices.

    v(t,t) = int int u(t,tau1) gtilde(tau1 - tau2) u*(t,tau2) dtau1 dtau2 over
    [t0, t]^2, using the stationarity identity u(t, tau) = u(t - tau, t0) that
    holds for convolution kernels.  Each requested time slice is a trapezoid
    double sum, evaluated as a Toeplitz (FFT) convolution in O(j log j).

    Returns the full-length series with zeros at unrequested indices when
    `indices` is given, else the value at every grid point.
    """
    n = grid.n_steps
    if len(u) != n + 1:
        raise ValueError("u must be computed on the same grid")
    if indices is None:
        indices = np.arange(n + 1)
    indices = np.asarray(indices, dtype=int)
    out = np.zeros(n + 1, dtype=float)
    if reservoir.is_vacuum:
        return out

    h = grid.h
    gt = np.asarray(
        thermal_kernel_gtilde(bath, reservoir, h * np.arange(n + 1)),
        dtype=np.complex128,
    )
    uv = u.values
    for j in indices:
        if j == 0:
            continue
        w = np.full(j + 1, h)
        w[0] = w[-1] = 0.5 * h
        a = w * uv[j::-1]  # a_m = w_m * u(t_j - t_m)
        gfull = np.concatenate((np.conj(gt[j:0:-1]), gt[: j + 1]))
        y = fftconvolve(gfull, np.conj(a))[j : 2 * j + 1]
        val = np.dot(a, y)
        scale = 1.0 + abs(val.real)
        if abs(val.imag) > IMAG_RESIDUE_TOL * scale:
            raise NumericsError(
                f"v imaginary residue {val.imag:.3e} exceeds tolerance at index {j}"
            )
        out[j] = val.real
    if out.min() < -1e-9:
        raise NumericsError(f"v went negative ({out.min():.3e}); quadrature inconsistent")
    np.clip(out, 0.0, None, out=out)
    return out


def assemble_trajectory(u: ComplexSeries, v: np.ndarray) -> GreensTrajectory:
    """Combine u and v into a trajectory, computing A = |u|^2 / (1 + v)."""
    v = np.asarray(v, dtype=float)
    if len(v) != len(u):
        raise ValueError("u and v must share a grid")
    if not np.isfinite(v).all():
        raise NumericsError("non-finite v entry")
    a = np.abs(u.values) ** 2 / (1.0 + v)
    if a.max() > 1.0 + 1e-9:
        raise NumericsError(
            f"A = |u|^2/(1+v) reached {a.max():.12g} > 1; u and v are inconsistent"
        )
    np.clip(a, 0.0, 1.0, out=a)
    a.setflags(write=False)
    v = v.copy()
    v.setflags(write=False)
    return GreensTrajectory(u.grid, u, v, a)
