"""Inverse analyses on the power budget.

Maximum transmit power is the largest TX power whose SINR loss stays within
the scenario's allowed margin. SINR loss grows monotonically with TX power
for every scenario handled here, so roots are found by bisection on the dB
axis after a sampled sign and monotonicity check.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from .budget import (
    OperatingPoint,
    _linear_budget,
    _rx_input_terms,
    sinr_loss,
    snr_adc_db,
    thermal_snr,
)
from .cascade import distortion_coefficients
from .config import SystemParams
from .units import db_to_lin, lin_to_db

DEFAULT_BRACKET = (-20.0, 45.0)
DEFAULT_TOL_DB = 1e-3


class SolverError(Exception):
    """Base class for solver failures."""


class InfeasibleError(SolverError):
    """The requirement cannot be met even with perfect linear cancellation."""


class NoSolutionError(SolverError):
    """The root is not bracketed (unbounded or violated everywhere)."""


class NumericalError(SolverError):
    """The objective misbehaved, e.g. was not monotone over the bracket."""


class LimitingFactor(str, Enum):
    QUANTIZATION = "Quantization"
    RX_NONLINEARITY = "RxNonlinearity"
    PA_NONLINEARITY = "PaNonlinearity"
    RESIDUAL_SI = "ResidualSI"
    MIXED = "Mixed"


@dataclass(frozen=True)
class MaxTxResult:
    p_tx_max: float
    limiting_factor: LimitingFactor
    iterations: int
    residual_db: float


def bisect_increasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = DEFAULT_TOL_DB,
    n_check: int = 27,
) -> Tuple[float, int]:
    """Root of an increasing function on ``[lo, hi]``.

    Returns ``(root, iterations)``. Raises :class:`NoSolutionError` when
    ``f`` has no sign change and :class:`NumericalError` when sampling finds
    ``f`` decreasing.
    """
    xs = np.linspace(lo, hi, n_check)
    ys = np.array([f(x) for x in xs])
    if not np.all(np.isfinite(ys)):
        raise NumericalError("objective is not finite over the bracket")
    if ys[0] > 0:
        raise NoSolutionError(f"requirement violated already at {lo} dBm")
    if ys[-1] < 0:
        raise NoSolutionError(f"requirement still met at {hi} dBm; no limit in bracket")
    if np.any(np.diff(ys) < -1e-9):
        raise NumericalError("objective is not monotone over the bracket")

    # narrow to the sampled cell holding the sign change
    k = int(np.argmax(ys >= 0))
    a, b = (xs[k - 1], xs[k]) if k > 0 else (xs[0], xs[0])
    it = 0
    while b - a > tol:
        m = 0.5 * (a + b)
        if f(m) < 0:
            a = m
        else:
            b = m
        it += 1
    return float(0.5 * (a + b)), it


def required_digital_cancellation(
    op: OperatingPoint, sinr_rq_db: Optional[float] = None, gain_mode: str = "total"
) -> float:
    """Digital SI attenuation (dB) needed to reach ``sinr_rq_db`` at the detector.

    ``sinr_rq_db`` defaults to the thermal-only SNR minus the allowed SINR
    loss. A negative result means the requirement is met with margin before
    any digital cancellation.

    Raises
    ------
    InfeasibleError
        If the requirement fails even with the linear SI removed entirely.
    """
    p = op.params
    if sinr_rq_db is None:
        sinr_rq_db = thermal_snr(p) - p.allowed_sinr_loss_db
    lb = _linear_budget(op, gain_mode)
    floor = lb.noise + lb.p2 + lb.p3 + lb.pa_det + lb.quant
    headroom = lb.soi / db_to_lin(sinr_rq_db) - floor
    if headroom <= 0:
        raise InfeasibleError(
            f"SINR {sinr_rq_db:.2f} dB unreachable at p_tx={op.p_tx} dBm even with perfect linear cancellation"
        )
    return lin_to_db(lb.si_adc / headroom)


def max_tx_quantization_limited(params: SystemParams, snr_d_db: Optional[float] = None) -> float:
    """Closed-form maximum TX power (dBm) when quantization noise dominates.

    ``snr_d_db`` is the thermal-only detector SNR at the operating SOI level
    and defaults to :func:`thermal_snr`.
    """
    if snr_d_db is None:
        snr_d_db = thermal_snr(params)
    op = OperatingPoint(0.0, params)
    return params.a_ant_db + params.a_rf_db + op.p_soi_in + snr_adc_db(params) - snr_d_db


def max_tx_nonlinearity_limited(
    params: SystemParams, bracket=DEFAULT_BRACKET, tol: float = DEFAULT_TOL_DB
) -> float:
    """Maximum TX power (dBm) with ideal ADC and perfect linear cancellation.

    Solves for the TX power at which RX distortion plus PA distortion,
    referred to the RX input, equals the thermal noise of the receiver.

    Raises
    ------
    NoSolutionError
        For a distortion-free transceiver, where the power is unbounded.
    """
    k2, k3 = distortion_coefficients(params.rx_chain)
    op0 = OperatingPoint(0.0, params)
    snr_d = db_to_lin(thermal_snr(params))

    def excess(p_tx):
        soi, n, si, pa = _rx_input_terms(op0.with_tx(p_tx))
        p_in = soi + n + si + pa
        dist = k2 * p_in**2 + k3 * p_in**3 + pa
        if dist <= 0:
            return -math.inf
        return lin_to_db(snr_d * dist / soi)

    if k2 == 0 and k3 == 0 and excess(bracket[1]) == -math.inf:
        raise NoSolutionError("transceiver is distortion free; TX power is unbounded")
    root, _ = bisect_increasing(lambda x: max(excess(x), -400.0), *bracket, tol=tol)
    return root


def _classify(op: OperatingPoint) -> LimitingFactor:
    lb = _linear_budget(op, "total")
    terms = {
        LimitingFactor.QUANTIZATION: lb.quant,
        LimitingFactor.RX_NONLINEARITY: lb.p2 + lb.p3,
        LimitingFactor.PA_NONLINEARITY: lb.pa_det,
        LimitingFactor.RESIDUAL_SI: lb.si_det,
    }
    total = sum(terms.values())
    for factor, value in terms.items():
        if value > total - value:
            return factor
    return LimitingFactor.MIXED


def max_tx_general(
    params: SystemParams,
    a_dig_db: float = math.inf,
    pa_dig_cancel_db: float = 0.0,
    gain_mode: str = "total",
    bracket=DEFAULT_BRACKET,
    tol: float = DEFAULT_TOL_DB,
) -> MaxTxResult:
    """Maximum TX power from the full budget.

    The default ``a_dig_db=inf`` models perfect linear digital cancellation;
    a finite value evaluates a fixed canceller instead.

    Raises
    ------
    NoSolutionError
        If the allowed SINR loss is exceeded over the whole bracket or never
        reached.
    """
    margin = params.allowed_sinr_loss_db
    op0 = OperatingPoint(0.0, params, a_dig_db=a_dig_db, pa_dig_cancel_db=pa_dig_cancel_db)

    def excess(p_tx):
        return sinr_loss(op0.with_tx(p_tx), gain_mode) - margin

    root, it = bisect_increasing(excess, *bracket, tol=tol)
    op = op0.with_tx(root)
    return MaxTxResult(
        p_tx_max=root,
        limiting_factor=_classify(op),
        iterations=it,
        residual_db=excess(root),
    )


def nl_cancellation_gain(
    params: SystemParams,
    total_a_dig_db: float,
    pa_iip3_dbm: Optional[float] = None,
    linear_a_dig_db: float = math.inf,
    gain_mode: str = "total",
) -> float:
    """Increase in maximum TX power (dB) when digital cancellation also
    removes ``total_a_dig_db`` of PA distortion, with the RF canceller
    referenced at the PA input.

    The linear SI is cancelled by ``linear_a_dig_db`` in both scenarios.
    """
    p = params.replace(rf_ref_case="B")
    if pa_iip3_dbm is not None:
        tx = list(p.tx_chain)
        tx[-1] = dataclasses.replace(tx[-1], iip3_dbm=pa_iip3_dbm)
        p = p.replace(tx_chain=tuple(tx))
    base = max_tx_general(p, a_dig_db=linear_a_dig_db, gain_mode=gain_mode)
    improved = max_tx_general(
        p, a_dig_db=linear_a_dig_db, pa_dig_cancel_db=total_a_dig_db, gain_mode=gain_mode
    )
    return improved.p_tx_max - base.p_tx_max
