"""Emission spectra of a cavity-coupled Vee-type three-level emitter."""

__version__ = "0.1.0"

from .core import SystemParams, derived_rates, load_params, parse_params_text, validate_params
from .regression import solve, steady_state_9
from .spectra import emission_spectrum, find_peaks, integrate_spectrum, mollow_ratios

__all__ = [
    "SystemParams",
    "derived_rates",
    "emission_spectrum",
    "find_peaks",
    "integrate_spectrum",
    "load_params",
    "mollow_ratios",
    "parse_params_text",
    "solve",
    "steady_state_9",
    "validate_params",
]
