"""Magneto-optical EIA/EIT resonances in the Hanle configuration."""

__version__ = "0.1.0"

from .angular import (AngularMomentum, Polarization, ZeemanBasis, clebsch_gordan,
                      coupling_operator, magnetic_projection, wigner_t)
from .doppler import DopplerParams, averaged_scan, doppler_average, resonance_width
from .gobe import (DensityMatrix, SteadyStateSolution, build_liouvillian,
                   collisional_depolarization, excited_population, spontaneous_transfer,
                   steady_state)
from .lineshape import (FitResult, LorentzianParams, eval_lorentzian, fit_lorentzian,
                        fit_resonance, lorentzian_from_coeffs, sign_reversal_gamma1)
from .params import SystemParams
from .reduced import (NormalizedParams, PolyCoeffs, analytic_coeffs, analytic_pi_e, pi_e0,
                      reduced_numeric, reduced_pi_e)
from .scan import ScanResult, omega_scan

__all__ = [
    "AngularMomentum", "Polarization", "ZeemanBasis", "clebsch_gordan", "coupling_operator",
    "magnetic_projection", "wigner_t", "DopplerParams", "averaged_scan", "doppler_average",
    "resonance_width", "DensityMatrix", "SteadyStateSolution", "build_liouvillian",
    "collisional_depolarization", "excited_population", "spontaneous_transfer", "steady_state",
    "FitResult", "LorentzianParams", "eval_lorentzian", "fit_lorentzian", "fit_resonance",
    "lorentzian_from_coeffs", "sign_reversal_gamma1", "SystemParams", "NormalizedParams",
    "PolyCoeffs", "analytic_coeffs", "analytic_pi_e", "pi_e0", "reduced_numeric",
    "reduced_pi_e", "ScanResult", "omega_scan",
]
