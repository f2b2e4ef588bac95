"""Monte-Carlo full-duplex link simulation over a sweep of TX powers."""

from __future__ import annotations

import dataclasses
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence, Tuple, Union

import numpy as np

from ..budget import OperatingPoint
from ..cascade import rx_noise_figure
from ..config import ConfigError, SystemParams, adc_fullscale_power, adc_target_power, builtin_params, load_params
from ..units import db_to_lin
from .canceller import digital_cancel_ls, measure_sinr
from .models import SiChannel, add_thermal_noise, adc_quantize, pa_apply, rf_cancel, rx_impairments_apply
from .ofdm import OfdmLayout, generate_ofdm, ofdm_demodulate

SIM_COLUMNS = ("p_tx_dbm", "sinr_sim_db", "sinr_sim_std", "a_dig_achieved_db", "trials")


@dataclass(frozen=True)
class SimConfig:
    """Waveform simulator scenario: a 16-QAM OFDM link with 48 of 64
    subcarriers in use. ``adc_bits`` overrides ``params.adc_bits``."""

    params: SystemParams = field(default_factory=lambda: builtin_params("paramset1"))
    n_subcarriers: int = 64
    n_data_subcarriers: int = 48
    guard_samples: int = 16
    sample_period_s: float = 15.625e-9
    oversampling: int = 4
    adc_bits: int = 12
    n_trials: int = 10
    n_symbols_per_trial: int = 100
    calib_symbols: int = 200
    n_canc_taps: int = 11
    rng_seed: int = 0
    multipath_delays: Tuple[int, ...] = (1, 3, 8)
    multipath_rel_db: float = -45.0
    workers: int = 1
    # impairment switches
    self_interference: bool = True
    pa_nonlinear: bool = True
    rx_nonlinear: bool = True
    quantize: bool = True

    def __post_init__(self):
        object.__setattr__(self, "multipath_delays", tuple(int(d) for d in self.multipath_delays))
        for key in ("n_trials", "n_symbols_per_trial", "calib_symbols", "n_canc_taps", "adc_bits", "workers"):
            if int(getattr(self, key)) < 1:
                raise ConfigError(f"{key} must be >= 1")
        if any(d < 1 for d in self.multipath_delays):
            raise ConfigError("multipath delays must be positive sample counts")
        self.layout  # validates the OFDM shape

    @property
    def layout(self) -> OfdmLayout:
        return OfdmLayout(
            self.n_subcarriers, self.n_data_subcarriers, self.guard_samples, self.oversampling, self.sample_period_s
        )

    @property
    def analytic_params(self) -> SystemParams:
        return self.params.replace(adc_bits=self.adc_bits)

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class TrialRecord:
    sinr_db: float
    a_dig_db: float
    a_rf_db: float
    g_rx_db: float
    g_hd_db: float


@dataclass(frozen=True)
class SimResult:
    """Per-TX-power statistics; ``a_dig_db`` is ``(n_p_tx, n_trials)``."""

    p_tx: Tuple[float, ...]
    sinr_mean: np.ndarray
    sinr_std: np.ndarray
    a_dig_db: np.ndarray
    a_rf_db: np.ndarray
    bits_lost: np.ndarray
    g_rx_db: np.ndarray
    n_trials: int

    @property
    def a_dig_mean(self) -> np.ndarray:
        """Achieved cancellation from the trial-averaged residual power ratio."""
        return -10.0 * np.log10(np.mean(10.0 ** (-self.a_dig_db / 10.0), axis=1))

    def rows(self):
        for i, p in enumerate(self.p_tx):
            yield {
                "p_tx_dbm": p,
                "sinr_sim_db": float(self.sinr_mean[i]),
                "sinr_sim_std": float(self.sinr_std[i]),
                "a_dig_achieved_db": float(self.a_dig_mean[i]),
                "trials": self.n_trials,
            }


def run_trial(config: SimConfig, p_tx_dbm: float, trial: int) -> TrialRecord:
    """One independent realization at one TX power.

    The stream depends only on ``(rng_seed, trial)``, so every TX power of a
    trial shares data, noise and channel draws.
    """
    rng = np.random.default_rng([config.rng_seed, trial])
    p = config.params
    lay = config.layout
    n_sym = config.calib_symbols + config.n_symbols_per_trial
    calib = config.calib_symbols * lay.symbol_len

    tx, _ = generate_ofdm(lay, n_sym, rng)
    soi, soi_data = generate_ofdm(lay, n_sym, rng)
    channel = SiChannel.random(rng, p.a_ant_db, config.multipath_delays, config.multipath_rel_db)
    eps_phase = rng.uniform(0.0, 2.0 * np.pi)

    op = OperatingPoint(p_tx_dbm, p)
    rx_hd = np.sqrt(db_to_lin(op.p_soi_in)) * soi
    rx_hd = add_thermal_noise(rx_hd, rng, rx_noise_figure(p), lay.sample_rate_hz)
    phases = rng.uniform(0.0, 2.0 * np.pi, len(p.rx_chain))

    target = db_to_lin(adc_target_power(p))
    _, g_hd, _ = rx_impairments_apply(
        rx_hd, p.rx_chain, target, config.rx_nonlinear, distortion_phases=phases
    )

    a_rf = math.nan
    rx_in = rx_hd
    if config.self_interference:
        pa = p.pa
        g_pa = pa.gain_range_db[1]
        pa_in = np.sqrt(db_to_lin(p_tx_dbm - g_pa)) * tx
        pa_out = pa_apply(pa_in, g_pa, pa.iip3_dbm if config.pa_nonlinear else None)
        coupled = channel.apply(pa_out)
        ref = pa_out if p.rf_ref_case == "A" else np.sqrt(db_to_lin(g_pa)) * pa_in
        residual = rf_cancel(coupled, ref, channel.main_tap, p.a_rf_db, eps_phase)
        a_rf = 10.0 * np.log10(np.mean(np.abs(coupled) ** 2) / np.mean(np.abs(residual) ** 2))
        rx_in = rx_in + residual

    y, g_fd, _ = rx_impairments_apply(
        rx_in, p.rx_chain, target, config.rx_nonlinear, distortion_phases=phases
    )
    if config.quantize:
        y = adc_quantize(y, config.adc_bits, np.sqrt(db_to_lin(adc_fullscale_power(p))))

    a_dig = math.nan
    if config.self_interference:
        y, a_dig = digital_cancel_ls(y, tx, calib, config.n_canc_taps)

    received = ofdm_demodulate(y[calib:], lay)
    sinr = measure_sinr(received, soi_data[config.calib_symbols :])
    return TrialRecord(sinr, a_dig, a_rf, g_fd, g_hd)


def _run_task(args):
    config, p_tx, trial = args
    return run_trial(config, p_tx, trial)


def run_simulation(config: SimConfig, p_tx_values: Sequence[float]) -> SimResult:
    """Run ``config.n_trials`` trials at every TX power and aggregate them.

    Trials are independent and may run in ``config.workers`` processes; the
    result does not depend on the worker count.
    """
    p_tx_values = tuple(float(v) for v in p_tx_values)
    if not p_tx_values:
        raise ValueError("empty TX power sweep")
    tasks = [(config, p, t) for p in p_tx_values for t in range(config.n_trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * config.workers))))
    else:
        records = [_run_task(t) for t in tasks]

    shape = (len(p_tx_values), config.n_trials)

    def grid(attr):
        return np.array([getattr(r, attr) for r in records], dtype=float).reshape(shape)

    sinr = grid("sinr_db")
    g_fd = grid("g_rx_db")
    return SimResult(
        p_tx=p_tx_values,
        sinr_mean=sinr.mean(axis=1),
        sinr_std=sinr.std(axis=1),
        a_dig_db=grid("a_dig_db"),
        a_rf_db=grid("a_rf_db").mean(axis=1),
        bits_lost=((grid("g_hd_db") - g_fd) / 6.02).mean(axis=1),
        g_rx_db=g_fd.mean(axis=1),
        n_trials=config.n_trials,
    )


_SIM_FIELDS = {f.name for f in dataclasses.fields(SimConfig)} - {"params"}


def load_sim_config(document: Union[str, Mapping[str, Any]], source: str = "<document>") -> SimConfig:
    """Scenario document with an optional ``simulation`` sub-object holding
    :class:`SimConfig` fields."""
    doc = json.loads(document) if isinstance(document, str) else document
    params = load_params(doc, source)
    sim = doc.get("simulation", {}) or {}
    if not isinstance(sim, Mapping):
        raise ConfigError(f"{source}: simulation must be an object")
    unknown = set(sim) - _SIM_FIELDS
    if unknown:
        raise ConfigError(f"{source}: unknown simulation keys {sorted(unknown)}")
    return SimConfig(params=params, **sim)
