"""Time grids, trapezoid quadrature, and the product-integration Volterra solver.

Units: hbar = k = 1 and omega_s = 1 throughout; times are in 1/omega_s.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class NumericsError(RuntimeError):
    """A solve produced a non-finite intermediate or an inconsistent result."""


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_j = t0 + j*h, j = 0..n_steps."""

    t0: float
    t_max: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 2:
            raise ValueError(f"n_steps must be >= 2, got {self.n_steps}")
        if not self.t_max > self.t0:
            raise ValueError(f"t_max ({self.t_max}) must exceed t0 ({self.t0})")

    @property
    def h(self) -> float:
        return (self.t_max - self.t0) / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.n_steps + 1)

    def refined(self) -> "TimeGrid":
        """Same span with half the step."""
        return TimeGrid(self.t0, self.t_max, 2 * self.n_steps)

    def subsampled(self, stride: int) -> "TimeGrid":
        if stride < 1 or self.n_steps % stride != 0:
            raise ValueError(f"stride {stride} must divide n_steps {self.n_steps}")
        return TimeGrid(self.t0, self.t_max, self.n_steps // stride)


@dataclass(frozen=True)
class ComplexSeries:
    """One complex value per grid point; immutable after construction."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.grid.n_steps + 1,):
            raise ValueError(
                f"series length {vals.shape} does not match grid "
                f"({self.grid.n_steps + 1} points)"
            )
        if not np.isfinite(vals).all():
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise NumericsError(f"non-finite series value at index {bad}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


def trapezoid_integrate(series: ComplexSeries, from_index: int, to_index: int) -> complex:
    """Trapezoid-rule integral of the series over [t_from, t_to].

    Exact for integrands that are linear in t on the grid.
    """
    n = series.grid.n_steps
    if not (0 <= from_index <= to_index <= n):
        raise IndexError(
            f"integration range [{from_index}, {to_index}] outside grid [0, {n}]"
        )
    if from_index == to_index:
        return 0.0 + 0.0j
    seg = series.values[from_index : to_index + 1]
    trapz = getattr(np, "trapezoid", np.trapz)
    return complex(trapz(seg, dx=series.grid.h))


def _kernel_on_offsets(kernel, offsets: np.ndarray) -> np.ndarray:
    try:
        g = np.asarray(kernel(offsets), dtype=np.complex128)
        if g.shape != offsets.shape:
            raise TypeError
    except TypeError:
        g = np.array([kernel(dt) for dt in offsets], dtype=np.complex128)
    if not np.isfinite(g).all():
        bad = offsets[~np.isfinite(g)][0]
        raise NumericsError(f"memory kernel returned a non-finite value at dt={bad!r}")
    return g


def solve_volterra(kernel, omega: float, grid: TimeGrid) -> ComplexSeries:
    """Solve du/dt = -i*omega*u(t) - int_{t0}^{t} g(t-tau) u(tau) dtau, u(t0) = 1.

    Second-order product integration.  The free rotation exp(-i*omega*t) is
    factored out exactly (integrating factor), leaving a pure memory equation
    dy/dt = -int ghat(t-tau) y(tau) dtau with ghat(s) = g(s) exp(i*omega*s);
    that equation is advanced with trapezoid weights and one predictor-
    corrector (Euler predict, trapezoid correct) pass per step.  The memory
    sum at step j reuses the full y history, so the total cost is O(n_steps^2).
    For a zero kernel the returned u is the free evolution to round-off.
    """
    h = grid.h
    n = grid.n_steps
    offsets = h * np.arange(n + 1)
    g = _kernel_on_offsets(kernel, offsets) * np.exp(1j * omega * offsets)
    g_rev = g[::-1].copy()  # contiguous reversed copy for fast history dot products

    y = np.empty(n + 1, dtype=np.complex128)
    y[0] = 1.0
    mem_prev = 0.0 + 0.0j  # trapezoid memory integral evaluated at t_{j-1}
    half_g0 = 0.5 * h * g[0]
    for j in range(1, n + 1):
        f_prev = -mem_prev
        pred = y[j - 1] + h * f_prev
        # sum over m = 0..j-1 of w_m ghat(t_j - t_m) y_m, with w_0 = h/2
        part = h * np.dot(g_rev[n - j : n], y[:j]) - 0.5 * h * g[j] * y[0]
        f_pred = -(part + half_g0 * pred)
        y[j] = y[j - 1] + 0.5 * h * (f_prev + f_pred)
        if not np.isfinite(y[j]):
            raise NumericsError(
                f"non-finite u at step {j} (t={grid.t0 + j * h:.6g}); aborting"
            )
        mem_prev = part + half_g0 * y[j]
    return ComplexSeries(grid, y * np.exp(-1j * omega * offsets))
