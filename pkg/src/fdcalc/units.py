"""Decibel and power-unit conversions.

Absolute powers are carried as dBm or milliwatts, ratios as dB or linear.
Variable names follow the suffix convention ``_dbm``, ``_mw``, ``_db`` and
``_lin`` instead of wrapper types.
"""

from __future__ import annotations

import math

import numpy as np

# Thermal noise density at 290 K.
NOISE_DENSITY_DBM_HZ = -174.0


def db_to_lin(x_db):
    """Convert a dB ratio to a linear power ratio."""
    if isinstance(x_db, np.ndarray):
        return 10.0 ** (x_db / 10.0)
    return 10.0 ** (float(x_db) / 10.0)


def lin_to_db(x):
    """Convert a linear power ratio to dB.

    Raises
    ------
    ValueError
        If any element of ``x`` is not strictly positive.
    """
    if isinstance(x, np.ndarray):
        if np.any(~(x > 0)):
            raise ValueError("linear power ratio must be > 0")
        return 10.0 * np.log10(x)
    if not x > 0:
        raise ValueError(f"linear power ratio must be > 0, got {x!r}")
    return 10.0 * math.log10(x)


def dbm_to_mw(p_dbm):
    return db_to_lin(p_dbm)


def mw_to_dbm(p_mw):
    return lin_to_db(p_mw)


def dbm_to_w(p_dbm):
    return db_to_lin(p_dbm) * 1e-3


def w_to_dbm(p_w):
    return lin_to_db(p_w * 1e3)


def mw_to_dbm_or_floor(p_mw: float) -> float:
    """Like :func:`mw_to_dbm` but maps exactly zero power to ``-inf``.

    Budgets use this for components that have been removed entirely, e.g.
    linear SI under perfect digital cancellation.
    """
    if p_mw == 0.0:
        return -math.inf
    return mw_to_dbm(p_mw)


def thermal_noise_dbm(bandwidth_hz: float) -> float:
    """Thermal noise power over ``bandwidth_hz`` at the standard density."""
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be > 0")
    return NOISE_DENSITY_DBM_HZ + 10.0 * math.log10(bandwidth_hz)


def vpp_to_fullscale_dbm(vpp: float, impedance_ohm: float = 50.0) -> float:
    """Power of a full-scale sinusoid spanning ``vpp`` volts peak-to-peak."""
    if not vpp > 0 or not impedance_ohm > 0:
        raise ValueError("voltage range and impedance must be > 0")
    v_rms = vpp / (2.0 * math.sqrt(2.0))
    return w_to_dbm(v_rms**2 / impedance_ohm)
