"""Bath models: spectral densities, memory kernels, Bose occupation, bound-state test.

Units: hbar = k = 1, omega_s = 1. The Ohmic density is J(w) = eta * w * exp(-w/omega_c);
the Lorentzian density is J(w) = (1/2pi) * gamma0 * lambda^2 / ((omega0 - w)^2 + lambda^2),
with its frequency integral taken over the full real line so that the closed-form
propagator of the two-level system is exact.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

OMEGA_S = 1.0


@dataclass(frozen=True)
class OhmicBath:
    """Ohmic reservoir with dimensionless coupling eta and cutoff omega_c."""

    eta: float
    omega_c: float

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if self.omega_c <= 0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")

    @property
    def eta_c(self) -> float:
        """Critical coupling for the appearance of a localized bound state."""
        return OMEGA_S / self.omega_c

    def j(self, omega):
        return self.eta * omega * np.exp(-omega / self.omega_c)


@dataclass(frozen=True)
class LorentzianBath:
    """Lorentzian reservoir centered at omega0 with width lam and rate gamma0."""

    gamma0: float
    lam: float
    omega0: float = OMEGA_S

    def __post_init__(self):
        if self.gamma0 <= 0:
            raise ValueError(f"gamma0 must be > 0, got {self.gamma0}")
        if self.lam <= 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")

    @property
    def tau_b(self) -> float:
        """Reservoir correlation time."""
        return 1.0 / self.lam

    @property
    def tau_r(self) -> float:
        """System relaxation time."""
        return 1.0 / self.gamma0

    @property
    def decay_exponent(self) -> complex:
        """sqrt(lam^2 - 2*gamma0*lam), continued into the complex plane."""
        return np.sqrt(complex(self.lam**2 - 2.0 * self.gamma0 * self.lam))


@dataclass(frozen=True)
class ReservoirState:
    """Initial thermal state of the reservoir; kT0 = 0 denotes vacuum."""

    kT0: float

    def __post_init__(self):
        if self.kT0 < 0:
            raise ValueError(f"kT0 must be >= 0, got {self.kT0}")

    @property
    def is_vacuum(self) -> bool:
        return self.kT0 == 0.0


def bose_occupation(reservoir: ReservoirState, omega: float) -> float:
    """Bose-Einstein occupation of a mode at frequency omega > 0."""
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if reservoir.is_vacuum:
        return 0.0
    return 1.0 / np.expm1(omega / reservoir.kT0)


def has_bound_state(bath: OhmicBath) -> bool:
    """True iff the coupling strictly exceeds the critical value omega_s/omega_c.

    The boundary eta == eta_c is classified as "no bound state": the
    dissipationless mode requires a strict pole crossing.
    """
    return bath.eta > bath.eta_c


def ohmic_kernel_g(bath: OhmicBath, dt):
    """Memory kernel g(dt) = eta * omega_c^2 / (1 + i*omega_c*dt)^2.

    Closed form of int_0^inf J(w) exp(-i*w*dt) dw for the Ohmic density.
    """
    return bath.eta * bath.omega_c**2 / (1.0 + 1j * bath.omega_c * np.asarray(dt)) ** 2


def lorentzian_kernel_f(bath: LorentzianBath, dt):
    """Memory kernel (gamma0*lam/2) * exp(-(i*omega0 + lam)*dt).

    Full-line frequency integral of the Lorentzian density; this convention
    makes the analytic two-level propagator exact.
    """
    return (
        0.5 * bath.gamma0 * bath.lam
        * np.exp(-(1j * bath.omega0 + bath.lam) * np.asarray(dt))
    )


# Bernoulli numbers B_2..B_14 for the trigamma asymptotic tail.
_BERNOULLI = (
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,
)


def _trigamma(z):
    """Complex trigamma psi'(z), vectorized; requires Re(z) > 0.

    Recurrence pushes |z| above 16, then the Bernoulli asymptotic series applies.
    """
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128)).copy()
    acc = np.zeros_like(z)
    small = np.abs(z) < 16.0
    while small.any():
        acc[small] += 1.0 / z[small] ** 2
        z[small] += 1.0
        small = np.abs(z) < 16.0
    inv = 1.0 / z
    inv2 = inv * inv
    tail = np.zeros_like(z)
    power = inv  # z^{-(2k+1)} running power
    for b in _BERNOULLI:
        power = power * inv2
        tail += b * power
    return acc + inv + 0.5 * inv2 + tail


def thermal_kernel_gtilde(bath: OhmicBath, reservoir: ReservoirState, dt):
    """Thermal kernel gtilde(dt) = int_0^inf J(w) nbar(w, T0) exp(-i*w*dt) dw.

    For the Ohmic density the Matsubara sum closes to
    eta * T0^2 * psi'(1 + T0*(1/omega_c + i*dt)), evaluated with a complex
    trigamma.  Exactly zero for the vacuum; gtilde(-dt) = conj(gtilde(dt)).
    """
    dt = np.asarray(dt, dtype=float)
    if reservoir.is_vacuum:
        return np.zeros(dt.shape, dtype=np.complex128) if dt.shape else 0.0 + 0.0j
    t0 = reservoir.kT0
    z = 1.0 + t0 * (1.0 / bath.omega_c + 1j * dt)
    out = bath.eta * t0**2 * _trigamma(z)
    return out.reshape(dt.shape) if dt.shape else complex(out[0])


def thermal_kernel_gtilde_quad(
    bath: OhmicBath, reservoir: ReservoirState, dt: float
) -> complex:
    """Adaptive-quadrature evaluation of gtilde; independent cross-check route.

    The w -> 0 limit of the integrand is the finite value eta*kT0 (the linear
    Ohmic density cancels the occupation divergence), so integration starts at
    an epsilon above zero with the analytic endpoint value.
    """
    if reservoir.is_vacuum:
        return 0.0 + 0.0j
    t0 = reservoir.kT0

    def integrand(w):
        return bath.j(w) / np.expm1(w / t0)

    w_up = bath.omega_c * (30.0 + t0)

    def re_part(w):
        return integrand(w) * np.cos(w * dt)

    def im_part(w):
        return -integrand(w) * np.sin(w * dt)

    # split at the cutoff to help the adaptive subdivision
    pts = [bath.omega_c, 5.0 * bath.omega_c]
    re, _ = quad(re_part, 1e-12, w_up, points=pts, limit=400, epsabs=1e-13, epsrel=1e-11)
    im, _ = quad(im_part, 1e-12, w_up, points=pts, limit=400, epsabs=1e-13, epsrel=1e-11)
    return re + 1j * im
