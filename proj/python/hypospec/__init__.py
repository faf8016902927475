"""Spectra, bracket checks and Langevin simulations of hypoelliptic Fokker-Planck operators."""

from ._core import (
    BasisMismatch,
    DomainError,
    FitError,
    HypoError,
    SimulationError,
    SolverError,
    counter_normal,
    delta_nm,
    exact_eigenvalue,
    fit_constant,
    hormander_oscillator,
    oscillator_spectrum,
    simulate_oscillator,
)

__all__ = [
    "BasisMismatch",
    "DomainError",
    "FitError",
    "HypoError",
    "SimulationError",
    "SolverError",
    "counter_normal",
    "delta_nm",
    "exact_eigenvalue",
    "fit_constant",
    "hormander_oscillator",
    "oscillator_spectrum",
    "simulate_oscillator",
]
