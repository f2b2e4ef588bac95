"""Sample-level full-duplex waveform simulator."""

from .canceller import CalibrationError, digital_cancel_ls, measure_sinr
from .models import SiChannel, adc_quantize, pa_apply, rf_cancel, rx_impairments_apply
from .ofdm import OfdmLayout, generate_ofdm, ofdm_demodulate, papr_db
from .runner import SimConfig, SimResult, load_sim_config, run_simulation, run_trial

__all__ = [
    "CalibrationError", "OfdmLayout", "SiChannel", "SimConfig", "SimResult",
    "adc_quantize", "digital_cancel_ls", "generate_ofdm", "load_sim_config",
    "measure_sinr", "ofdm_demodulate", "pa_apply", "papr_db", "rf_cancel",
    "run_simulation", "run_trial", "rx_impairments_apply",
]
