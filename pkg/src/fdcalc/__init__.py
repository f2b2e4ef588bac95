"""Power budget calculator and waveform simulator for in-band full-duplex
direct-conversion transceivers."""

__version__ = "0.1.0"

from .budget import (
    OperatingPoint,
    PowerBudget,
    bits_lost,
    detector_budget,
    quantization_noise,
    rx_total_gain,
    sinr_adc,
    sinr_detector,
    sinr_loss,
)
from .cascade import (
    CascadeSummary,
    exact_distortion_oracle,
    friis_noise_factor,
    nth_order_distortion,
    rx_distortion_powers,
    sensitivity,
)
from .config import ComponentSpec, ConfigError, SystemParams, adc_target_power, builtin_params, load_params
from .solvers import (
    InfeasibleError,
    MaxTxResult,
    NoSolutionError,
    max_tx_general,
    max_tx_nonlinearity_limited,
    max_tx_quantization_limited,
    nl_cancellation_gain,
    required_digital_cancellation,
)
from .units import db_to_lin, lin_to_db

__all__ = [
    "CascadeSummary", "ComponentSpec", "ConfigError", "InfeasibleError", "MaxTxResult",
    "NoSolutionError", "OperatingPoint", "PowerBudget", "SystemParams", "adc_target_power",
    "bits_lost", "builtin_params", "db_to_lin", "detector_budget", "exact_distortion_oracle",
    "friis_noise_factor", "lin_to_db", "load_params", "max_tx_general", "max_tx_nonlinearity_limited",
    "max_tx_quantization_limited", "nl_cancellation_gain", "nth_order_distortion",
    "quantization_noise", "required_digital_cancellation", "rx_distortion_powers",
    "rx_total_gain", "sensitivity", "sinr_adc", "sinr_detector", "sinr_loss",
]
