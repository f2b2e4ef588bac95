"""Power budget at the ADC and detector inputs for one transmit power.

Every signal component is tracked as a linear power in mW referred to the
ADC input (the VGA output). The RX gain is set by a static AGC that holds
the total ADC input power at the target level.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

from .cascade import distortion_coefficients, friis_noise_factor, rx_distortion_powers, sensitivity
from .config import SystemParams, adc_target_power
from .units import db_to_lin, lin_to_db, mw_to_dbm_or_floor, thermal_noise_dbm

# AGC gain rules:
#   "total":  the ADC input power, including amplified thermal noise and RX
#             distortion, is matched to the target exactly
#   "signal": only the SOI, SI and PA distortion at the RX input are counted
GAIN_MODES = ("total", "signal")

BUDGET_COLUMNS = (
    "p_tx_dbm", "g_rx_db", "p_soi", "p_n", "p_si", "p_quant", "p_2nd", "p_3rd",
    "p_3rd_pa", "sinr_adc_db", "sinr_det_db", "bits_lost", "gain_clamped",
)


class GainClampWarning(UserWarning):
    """The AGC asked for more or less gain than the RX chain provides."""


@dataclass(frozen=True)
class OperatingPoint:
    """A transmit power together with the scenario it is evaluated in.

    ``a_dig_db`` overrides the scenario's digital cancellation (``inf`` for
    perfect linear cancellation). ``pa_dig_cancel_db`` additionally removes
    PA distortion in the digital domain, which linear cancellation cannot do.
    """

    p_tx: float
    params: SystemParams
    a_dig_db: Optional[float] = None
    pa_dig_cancel_db: float = 0.0
    p_soi_in: float = field(init=False)
    p_n_in: float = field(init=False)

    def __post_init__(self):
        if self.a_dig_db is not None and not self.a_dig_db >= 0:
            raise ValueError("a_dig_db must be >= 0")
        if not self.pa_dig_cancel_db >= 0:
            raise ValueError("pa_dig_cancel_db must be >= 0")
        p = self.params
        object.__setattr__(self, "p_soi_in", sensitivity(p) + p.soi_above_sens_db)
        object.__setattr__(self, "p_n_in", thermal_noise_dbm(p.bandwidth_hz))

    @property
    def a_dig(self) -> float:
        return self.params.a_dig_db if self.a_dig_db is None else self.a_dig_db

    def with_tx(self, p_tx: float) -> "OperatingPoint":
        return OperatingPoint(p_tx, self.params, self.a_dig_db, self.pa_dig_cancel_db)


@dataclass(frozen=True)
class PowerBudget:
    """Component powers in dBm at the detector input (SI after digital
    cancellation) plus the derived SINRs and bit loss."""

    p_tx_dbm: float
    g_rx_db: float
    p_soi: float
    p_n: float
    p_si: float
    p_quant: float
    p_2nd: float
    p_3rd: float
    p_3rd_pa: float
    sinr_adc_db: float
    sinr_det_db: float
    bits_lost: float
    gain_clamped: bool = False
    tx_out_of_range: bool = False
    p_si_adc: float = -math.inf
    p_3rd_pa_adc: float = -math.inf
    p_target: float = 0.0
    snr_thermal_db: float = 0.0

    @property
    def sinr_loss_db(self) -> float:
        return self.snr_thermal_db - self.sinr_det_db

    def adc_total_power(self) -> float:
        """Total ADC input power in dBm, SI counted before digital cancellation."""
        terms = (self.p_soi, self.p_n, self.p_si_adc, self.p_3rd_pa_adc, self.p_2nd, self.p_3rd)
        return lin_to_db(sum(db_to_lin(t) for t in terms if t > -math.inf))

    def as_row(self) -> dict:
        return {k: getattr(self, k) for k in BUDGET_COLUMNS}


def pa_distortion_tx(params: SystemParams, p_tx: float) -> float:
    """PA in-band 3rd-order distortion at the TX output, in dBm."""
    pa = params.pa
    return 3.0 * p_tx - 2.0 * (pa.iip3_dbm + pa.gain_range_db[1])


def _a_nl_db(params: SystemParams) -> float:
    return params.a_rf_db if params.rf_ref_case == "A" else 0.0


def _rx_input_terms(op: OperatingPoint):
    """Linear powers (mW) at the RX input after RF cancellation."""
    p = op.params
    si = db_to_lin(op.p_tx - p.a_ant_db - p.a_rf_db)
    pa = db_to_lin(pa_distortion_tx(p, op.p_tx) - p.a_ant_db - _a_nl_db(p))
    return db_to_lin(op.p_soi_in), db_to_lin(op.p_n_in), si, pa


def snr_adc_db(params: SystemParams) -> float:
    return 6.02 * params.adc_bits + 4.76 - params.papr_db


def quantization_noise(params: SystemParams) -> float:
    """Quantization noise power in dBm; independent of the transmit power."""
    return adc_target_power(params) - snr_adc_db(params)


def _gain(op: OperatingPoint, gain_mode: str):
    """Return ``(g_lin, clamped)``."""
    if gain_mode not in GAIN_MODES:
        raise ValueError(f"gain_mode must be one of {GAIN_MODES}")
    p = op.params
    target = db_to_lin(adc_target_power(p))
    soi, n, si, pa = _rx_input_terms(op)
    if gain_mode == "signal":
        g = target / (si + pa + soi)
    else:
        # distortion terms are linear in g, so matching is closed form
        k2, k3 = distortion_coefficients(p.rx_chain)
        p_in = soi + n + si + pa
        f = friis_noise_factor(p.rx_chain)
        g = target / (soi + f * n + si + pa + k2 * p_in**2 + k3 * p_in**3)
    lo, hi = p.rx_gain_range_db
    g_db = lin_to_db(g)
    if g_db > hi + 1e-9 or g_db < lo - 1e-9:
        return db_to_lin(min(max(g_db, lo), hi)), True
    return g, False


def rx_total_gain(op: OperatingPoint, gain_mode: str = "total", warn: bool = False):
    """AGC gain of the RX chain as ``(g_rx_linear, clamped)``.

    The gain is clamped to the chain's range; ``clamped`` reports whether
    that happened and ``warn`` also emits a :class:`GainClampWarning`.
    """
    g, clamped = _gain(op, gain_mode)
    if clamped and warn:
        warnings.warn(f"RX gain clamped at p_tx={op.p_tx} dBm", GainClampWarning, stacklevel=2)
    return g, clamped


@dataclass(frozen=True)
class _Linear:
    g: float
    clamped: bool
    soi: float
    noise: float
    si_adc: float
    si_det: float
    pa_adc: float
    pa_det: float
    p2: float
    p3: float
    quant: float


def _linear_budget(op: OperatingPoint, gain_mode: str) -> _Linear:
    p = op.params
    g, clamped = _gain(op, gain_mode)
    soi, n, si, pa = _rx_input_terms(op)
    f = friis_noise_factor(p.rx_chain)
    p2, p3 = rx_distortion_powers(p.rx_chain_at(lin_to_db(g)), soi + n + si + pa)
    a_dig = op.a_dig
    si_det = 0.0 if math.isinf(a_dig) else g * si / db_to_lin(a_dig)
    return _Linear(
        g=g,
        clamped=clamped,
        soi=g * soi,
        noise=g * f * n,
        si_adc=g * si,
        si_det=si_det,
        pa_adc=g * pa,
        pa_det=g * pa / db_to_lin(op.pa_dig_cancel_db),
        p2=p2,
        p3=p3,
        quant=db_to_lin(quantization_noise(p)),
    )


def sinr_adc(op: OperatingPoint, gain_mode: str = "total") -> float:
    """SINR at the ADC input in dB."""
    lb = _linear_budget(op, gain_mode)
    return lin_to_db(lb.soi / (lb.noise + lb.si_adc + lb.pa_adc + lb.p2 + lb.p3))


def sinr_detector(op: OperatingPoint, gain_mode: str = "total") -> float:
    """SINR at the detector input in dB (after quantization and digital cancellation)."""
    lb = _linear_budget(op, gain_mode)
    return lin_to_db(lb.soi / (lb.noise + lb.si_det + lb.pa_det + lb.p2 + lb.p3 + lb.quant))


def thermal_snr(params: SystemParams) -> float:
    """Detector SNR in dB with thermal noise as the only impairment."""
    op = OperatingPoint(-math.inf, params)
    return op.p_soi_in - op.p_n_in - lin_to_db(friis_noise_factor(params.rx_chain))


def sinr_loss(op: OperatingPoint, gain_mode: str = "total") -> float:
    """Drop of detector SINR below the thermal-only SNR, in dB."""
    return thermal_snr(op.params) - sinr_detector(op, gain_mode)


def bits_lost(op: OperatingPoint) -> float:
    """ADC bits consumed by residual SI and PA distortion relative to
    half-duplex operation. Independent of the ADC resolution."""
    p = op.params
    pa = p.pa
    p_tx = db_to_lin(op.p_tx)
    a_ant, a_rf, a_nl = db_to_lin(p.a_ant_db), db_to_lin(p.a_rf_db), db_to_lin(_a_nl_db(p))
    iip3 = db_to_lin(pa.iip3_dbm)
    g_pa = db_to_lin(pa.gain_range_db[1])
    interference = p_tx / (a_ant * a_rf) + p_tx**3 / (a_ant * a_nl * iip3**2 * g_pa**2)
    ratio = interference / (db_to_lin(op.p_soi_in) + db_to_lin(op.p_n_in))
    return math.log(1.0 + ratio, 4)


def detector_budget(op: OperatingPoint, gain_mode: str = "total") -> PowerBudget:
    """Full power budget for one operating point."""
    p = op.params
    lb = _linear_budget(op, gain_mode)
    dbm = mw_to_dbm_or_floor
    sinr_a = lin_to_db(lb.soi / (lb.noise + lb.si_adc + lb.pa_adc + lb.p2 + lb.p3))
    sinr_d = lin_to_db(lb.soi / (lb.noise + lb.si_det + lb.pa_det + lb.p2 + lb.p3 + lb.quant))
    lo, hi = p.tx_power_range_dbm
    return PowerBudget(
        p_tx_dbm=op.p_tx,
        g_rx_db=lin_to_db(lb.g),
        p_soi=dbm(lb.soi),
        p_n=dbm(lb.noise),
        p_si=dbm(lb.si_det),
        p_quant=dbm(lb.quant),
        p_2nd=dbm(lb.p2),
        p_3rd=dbm(lb.p3),
        p_3rd_pa=dbm(lb.pa_det),
        sinr_adc_db=sinr_a,
        sinr_det_db=sinr_d,
        bits_lost=bits_lost(op),
        gain_clamped=lb.clamped,
        tx_out_of_range=not lo <= op.p_tx <= hi,
        p_si_adc=dbm(lb.si_adc),
        p_3rd_pa_adc=dbm(lb.pa_adc),
        p_target=adc_target_power(p),
        snr_thermal_db=thermal_snr(p),
    )
