"""Photon-emission characteristics of a driven quantum-dot exciton.

Computes first-order field correlations, coherent/incoherent scattering
fractions, and Mollow-triplet spectra for a two-level exciton driven by a
laser and coupled to an acoustic-phonon bath, via a variational master
equation with a self-consistent per-mode displacement.
"""

__version__ = "0.1.0"

from .params import K_RATIO, PhysicalParams, inverse_temperature, spectral_density
from .quadrature import (FourierResult, FrequencyGrid, half_line_fourier,
                         integrate_frequency)
from .variational import (ConvergenceError, VariationalSolution, f_of_omega,
                          renormalized_rabi, resonant_nu, shifted_detuning,
                          solve_self_consistent)
from .dissipator import (BathCorrelations, DressedDecomposition, build_kph,
                         build_phonon_superoperator, correlation_functions,
                         dressed_decomposition, phonon_propagator, response_table)
from .dynamics import (CorrelationSeries, DegenerateSteadyStateError,
                       build_liouvillian, bare_liouvillian, g1_correlation,
                       propagate, steady_state)
from .oracles import (PolaronLimitError, PureDephasingRates,
                      UnsupportedRegimeError, bloch_generator, gamma_pd,
                      g1_coh_corrected, g1_coh_pd, g1_inc_pd, kappa,
                      polaron_propagator, polaron_rates,
                      pure_dephasing_liouvillian, sideband_width_detuned,
                      sideband_width_resonant)
from .spectrum import (FitError, LorentzianPeak, SpectrumSeries, TripletFit,
                       extract_observables, fit_triplet, incoherent_spectrum)
from .config import ExperimentConfig, ConfigError, parse_config
from .runner import run_experiment, solve_point

__all__ = [
    "K_RATIO", "PhysicalParams", "inverse_temperature", "spectral_density",
    "FourierResult", "FrequencyGrid", "half_line_fourier", "integrate_frequency",
    "ConvergenceError", "VariationalSolution", "f_of_omega", "renormalized_rabi",
    "resonant_nu", "shifted_detuning", "solve_self_consistent",
    "BathCorrelations", "DressedDecomposition", "build_kph",
    "build_phonon_superoperator", "correlation_functions",
    "dressed_decomposition", "phonon_propagator", "response_table",
    "CorrelationSeries", "DegenerateSteadyStateError", "build_liouvillian",
    "bare_liouvillian", "g1_correlation", "propagate", "steady_state",
    "PolaronLimitError", "PureDephasingRates", "UnsupportedRegimeError",
    "bloch_generator", "gamma_pd", "g1_coh_corrected", "g1_coh_pd", "g1_inc_pd",
    "kappa", "polaron_propagator", "polaron_rates", "pure_dephasing_liouvillian",
    "sideband_width_detuned", "sideband_width_resonant",
    "FitError", "LorentzianPeak", "SpectrumSeries", "TripletFit",
    "extract_observables", "fit_triplet", "incoherent_spectrum",
    "ExperimentConfig", "ConfigError", "parse_config",
    "run_experiment", "solve_point",
]
