"""Plot-ready exports: per-quantity data files with gap encoding plus rendered figures."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

# quantity name -> (trajectory column, validity column or None)
QUANTITIES = {
    "energy": ("energy", None),
    "entropy": ("entropy", None),
    "temperature": ("temperature", "temp_valid"),
    "free_energy": ("free_energy", "f_valid"),
    "heat": ("heat_cum", None),
    "work": ("work_cum", None),
    "abs_u": ("abs_u", None),
    "re_u": ("re_u", None),
    "im_u": ("im_u", None),
    "v": ("v", None),
    "omega_renorm": ("omega_renorm", None),
    "gamma": ("gamma", None),
    "gamma_tilde": ("gamma_tilde", None),
}

_LABELS = {
    "energy": r"$E(t)$ [$\hbar\omega_s$]",
    "entropy": r"$S(t)$ [$k$]",
    "temperature": r"$\mathcal{T}(t)$ [$\hbar\omega_s/k$]",
    "free_energy": r"$F(t)$ [$\hbar\omega_s$]",
    "heat": r"$Q(t)$ [$\hbar\omega_s$]",
    "work": r"$W(t)$ [$\hbar\omega_s$]",
    "abs_u": r"$|u(t,t_0)|$",
    "re_u": r"$\mathrm{Re}\,u$",
    "im_u": r"$\mathrm{Im}\,u$",
    "v": r"$v(t,t)$",
    "omega_renorm": r"$\omega_s'(t)$ [$\omega_s$]",
    "gamma": r"$\gamma(t)$ [$\omega_s$]",
    "gamma_tilde": r"$\tilde\gamma(t)$ [$\omega_s$]",
}


def quantity_mask(columns: dict, name: str) -> np.ndarray:
    """True where the quantity has a plottable value (validity flag and finite)."""
    col, valid_col = QUANTITIES[name]
    values = columns[col]
    mask = np.isfinite(values)
    if valid_col is not None:
        mask &= columns[valid_col] > 0.5
    return mask


def write_plot_data(path, times: np.ndarray, values: np.ndarray, mask: np.ndarray) -> None:
    """Two-column text series; masked-out points become blank records so
    plotting tools break the line across singular bands."""
    with open(path, "w") as fh:
        for t, val, ok in zip(times, values, mask):
            fh.write(f"{t!r} {val!r}\n" if ok else "\n")


def render_quantity(path, times: np.ndarray, values: np.ndarray, mask: np.ndarray, name: str) -> None:
    """Line plot with gaps at masked points, written as an image file."""
    gapped = np.where(mask, values, np.nan)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(times, gapped, lw=1.2)
    ax.set_xlabel(r"$t$ [$1/\omega_s$]")
    ax.set_ylabel(_LABELS.get(name, name))
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={})
    plt.close(fig)


def emit_plot_data(columns: dict, out_dir, stem: str, names=None) -> list:
    """Write .dat and .png files for each requested quantity; returns the paths."""
    if not names:
        names = list(QUANTITIES)
    unknown = [n for n in names if n not in QUANTITIES]
    if unknown:
        raise KeyError(
            f"unknown quantity {unknown[0]!r}; valid names: {', '.join(QUANTITIES)}"
        )
    out_dir = Path(out_dir)
    times = columns["time"]
    paths = []
    for name in names:
        col, _ = QUANTITIES[name]
        mask = quantity_mask(columns, name)
        dat = out_dir / f"{stem}_{name}.dat"
        png = out_dir / f"{stem}_{name}.png"
        write_plot_data(dat, times, columns[col], mask)
        render_quantity(png, times, columns[col], mask, name)
        paths.extend([dat, png])
    return paths
