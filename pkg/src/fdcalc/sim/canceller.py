"""Digital SI cancellation and SINR measurement."""

from __future__ import annotations

import math

import numpy as np

SINR_CAP_DB = 200.0


class CalibrationError(ValueError):
    """The calibration data cannot identify the canceller taps."""


def delay_matrix(x: np.ndarray, n_taps: int) -> np.ndarray:
    """Columns are ``x`` delayed by 0..n_taps-1 samples, zero-filled."""
    m = np.zeros((len(x), n_taps), dtype=complex)
    for k in range(n_taps):
        m[k:, k] = x[: len(x) - k]
    return m


def _linear_power(sig: np.ndarray, regressors: np.ndarray) -> float:
    """Power of the component of ``sig`` that is linear in ``regressors``,
    with the bias from fitting the unrelated part removed."""
    n, k = regressors.shape
    coef, *_ = np.linalg.lstsq(regressors, sig, rcond=None)
    fit = regressors @ coef
    p_fit = np.mean(np.abs(fit) ** 2)
    p_res = np.mean(np.abs(sig - fit) ** 2)
    return max(p_fit - k / (n - k) * p_res, 0.0)


def digital_cancel_ls(
    rx_digital: np.ndarray,
    tx_symbols: np.ndarray,
    calib_samples: int,
    n_canc_taps: int = 11,
):
    """Least-squares linear SI canceller.

    The coupling channel is estimated from the first ``calib_samples``
    samples and its reconstruction is subtracted from the whole sequence.
    Achieved cancellation is the power of the linear SI component before
    versus after subtraction, measured over the remaining samples.

    Returns ``(cleaned, achieved_a_dig_db)``.
    """
    n = len(rx_digital)
    if len(tx_symbols) != n:
        raise ValueError("rx and tx sequences must have equal length")
    if not n_canc_taps <= calib_samples < n:
        raise CalibrationError("calibration period too short or leaves no measurement period")
    regs = delay_matrix(tx_symbols, n_canc_taps)
    a = regs[:calib_samples]
    if np.linalg.matrix_rank(a) < n_canc_taps:
        raise CalibrationError("calibration regressors are rank deficient")
    h, *_ = np.linalg.lstsq(a, rx_digital[:calib_samples], rcond=None)
    cleaned = rx_digital - regs @ h

    meas = slice(calib_samples, n)
    before = _linear_power(rx_digital[meas], regs[meas])
    after = _linear_power(cleaned[meas], regs[meas])
    if before <= 0:
        return cleaned, 0.0
    after = max(after, before * 1e-20)
    return cleaned, 10.0 * math.log10(before / after)


def measure_sinr(received: np.ndarray, ideal_soi: np.ndarray) -> float:
    """SINR (dB) of ``received`` against a known ideal signal.

    The ideal is scaled onto the received samples by least squares; the
    remainder counts as noise plus interference. Capped at 200 dB.
    """
    received = np.ravel(received)
    ideal_soi = np.ravel(ideal_soi)
    p_ideal = np.vdot(ideal_soi, ideal_soi).real
    if p_ideal <= 0:
        raise ValueError("ideal signal has zero power")
    scale = np.vdot(ideal_soi, received) / p_ideal
    resid = received - scale * ideal_soi
    p_sig = abs(scale) ** 2 * p_ideal
    p_res = np.vdot(resid, resid).real
    if p_res <= p_sig * 10 ** (-SINR_CAP_DB / 10):
        return SINR_CAP_DB
    return float(10.0 * math.log10(p_sig / p_res))
