"""Exact nonequilibrium thermodynamics of single-mode open quantum systems.

A damped photonic cavity (Ohmic reservoir) and a two-level atom (Lorentzian
reservoir) are propagated through their exact non-Markovian Green's functions;
internal energy, von Neumann entropy, dynamical temperature, free energy, heat
and work are derived along the trajectory.

Unit convention everywhere: hbar = k = 1 and omega_s = 1.
"""

__version__ = "0.1.0"

from .config import ConfigError, RunConfig, SweepConfig, parse_run_config, parse_sweep_config
from .greens import (
    GreensTrajectory,
    assemble_trajectory,
    compute_u_cavity,
    compute_u_tls_analytic,
    compute_v_cavity,
    solve_u_tls,
)
from .numerics import ComplexSeries, NumericsError, TimeGrid, solve_volterra, trapezoid_integrate
from .pipeline import RunResult, run_single, run_sweep
from .spectral import (
    LorentzianBath,
    OhmicBath,
    ReservoirState,
    bose_occupation,
    has_bound_state,
    lorentzian_kernel_f,
    ohmic_kernel_g,
    thermal_kernel_gtilde,
    thermal_kernel_gtilde_quad,
)
from .states import (
    CavityState,
    MasterEqCoefficients,
    TlsState,
    cavity_populations,
    master_eq_coefficients,
    mean_photon_number,
    tls_population,
)
from .thermo import (
    ThermoTrajectory,
    energy,
    entropy,
    free_energy_series,
    gibbs_entropy,
    gibbs_populations,
    heat_and_work,
    temperature_series,
)
