"""Sample-level hardware models.

Signals are complex envelopes in sqrt(mW): the average power of ``x`` in
mW is ``mean(|x|**2)``. Memoryless polynomial coefficients follow the
complex-baseband two-tone convention, so a stage with input intercept
``iipn`` (mW) reproduces ``P_out - (n-1)(IIPn - P_in)`` for the in-band
intermodulation tones of a two-tone test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..cascade import friis_noise_factor
from ..config import ComponentSpec
from ..units import NOISE_DENSITY_DBM_HZ, db_to_lin


def polynomial_coefficients(gain_db: float, iip2_dbm=None, iip3_dbm=None) -> Tuple[float, float, float]:
    """``(a1, a2, a3)`` of ``y = a1*x + a2*|x|**2 + a3*x*|x|**2``.

    ``a3`` is negative (compressive); an absent intercept gives a zero
    coefficient.
    """
    a1 = math.sqrt(db_to_lin(gain_db))
    a2 = a1 / math.sqrt(db_to_lin(iip2_dbm)) if iip2_dbm is not None else 0.0
    a3 = -a1 / db_to_lin(iip3_dbm) if iip3_dbm is not None else 0.0
    return a1, a2, a3


def apply_polynomial(x: np.ndarray, a1: float, a2: float = 0.0, a3: float = 0.0) -> np.ndarray:
    y = a1 * x
    if a2 or a3:
        p = np.abs(x) ** 2
        if a2:
            y = y + a2 * p
        if a3:
            y = y + a3 * x * p
    return y


def pa_apply(x: np.ndarray, gain_db: float, iip3_dbm: Optional[float]) -> np.ndarray:
    """Memoryless cubic PA."""
    a1, _, a3 = polynomial_coefficients(gain_db, None, iip3_dbm)
    return apply_polynomial(x, a1, 0.0, a3)


@dataclass(frozen=True)
class SiChannel:
    """Static TX-to-RX coupling: a main tap at delay 0 plus weaker taps."""

    delays: Tuple[int, ...]
    gains: Tuple[complex, ...]

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        a_ant_db: float,
        multipath_delays: Sequence[int] = (1, 3, 8),
        multipath_rel_db: float = -45.0,
    ) -> "SiChannel":
        """Main-tap power ``1/a_ant``; each multipath tap ``multipath_rel_db``
        below it. All phases are uniform."""
        main = math.sqrt(db_to_lin(-a_ant_db))
        mp = main * math.sqrt(db_to_lin(multipath_rel_db))
        phases = rng.uniform(0.0, 2.0 * np.pi, 1 + len(multipath_delays))
        gains = [main * np.exp(1j * phases[0])] + [mp * np.exp(1j * ph) for ph in phases[1:]]
        return cls((0, *multipath_delays), tuple(complex(g) for g in gains))

    @property
    def main_tap(self) -> complex:
        return self.gains[self.delays.index(0)]

    def taps(self) -> np.ndarray:
        h = np.zeros(max(self.delays) + 1, dtype=complex)
        for d, g in zip(self.delays, self.gains):
            h[d] += g
        return h

    def apply(self, x: np.ndarray) -> np.ndarray:
        return np.convolve(x, self.taps())[: len(x)]


def rf_cancel(
    rx: np.ndarray,
    ref: np.ndarray,
    main_tap: complex,
    target_a_rf_db: float,
    error_phase: float = 0.0,
) -> np.ndarray:
    """Single-tap RF canceller aligned to the main coupling tap.

    The canceller weight is ``main_tap * (1 - eps)`` with
    ``|eps|**2 = 10**(-target_a_rf_db/10)``, leaving ``main_tap * eps`` of the
    reference in the output. ``target_a_rf_db = inf`` cancels the main tap
    exactly.
    """
    eps = 0.0 if math.isinf(target_a_rf_db) else math.sqrt(db_to_lin(-target_a_rf_db)) * np.exp(1j * error_phase)
    return rx - main_tap * (1.0 - eps) * ref


def add_thermal_noise(
    x: np.ndarray, rng: np.random.Generator, nf_db: float, sample_rate_hz: float
) -> np.ndarray:
    """Add complex white noise at -174 dBm/Hz + NF over the full sample rate."""
    p = db_to_lin(NOISE_DENSITY_DBM_HZ + nf_db + 10.0 * math.log10(sample_rate_hz))
    n = rng.standard_normal((2, len(x)))
    return x + math.sqrt(p / 2.0) * (n[0] + 1j * n[1])


def rx_impairments_apply(
    x: np.ndarray,
    chain: Sequence[ComponentSpec],
    agc_target_mw: Optional[float] = None,
    nonlinear: bool = True,
    rng: Optional[np.random.Generator] = None,
    sample_rate_hz: Optional[float] = None,
    distortion_phases: Optional[Sequence[float]] = None,
):
    """Pass ``x`` through the RX stages in order.

    Thermal noise of the whole chain is added at its input when ``rng`` and
    ``sample_rate_hz`` are given. With ``agc_target_mw`` the variable-gain
    stage is set so the output power equals the target (clamped to its
    range); otherwise every stage must have a fixed gain.

    ``distortion_phases`` rotates each stage's distortion terms relative to
    its fundamental. By default all stages are compressive and their
    products add coherently; independent uniform phases make the expected
    distortion power add per stage, as the input-referred cascade assumes.

    Returns ``(y, total_gain_db, clamped)``.
    """
    if rng is not None:
        if sample_rate_hz is None:
            raise ValueError("sample_rate_hz is required to add thermal noise")
        x = add_thermal_noise(x, rng, 10.0 * math.log10(friis_noise_factor(chain)), sample_rate_hz)
    if distortion_phases is not None and len(distortion_phases) != len(chain):
        raise ValueError("need one distortion phase per stage")
    y = x
    total_db = 0.0
    clamped = False
    for i, stage in enumerate(chain):
        vga = stage.is_variable
        if vga and agc_target_mw is None:
            raise ValueError(f"stage {stage.name!r} has no fixed gain and no AGC target was given")
        a1, a2, a3 = polynomial_coefficients(0.0 if vga else stage.gain_db, stage.iip2_dbm, stage.iip3_dbm)
        if not nonlinear:
            a2 = a3 = 0.0
        elif distortion_phases is not None:
            rot = np.exp(1j * distortion_phases[i])
            a2, a3 = a2 * rot, a3 * rot
        y = apply_polynomial(y, a1, a2, a3)
        if vga:
            # every coefficient scales with a1, so the stage output scales exactly
            lo, hi = stage.gain_range_db
            g_db = 10.0 * math.log10(agc_target_mw / np.mean(np.abs(y) ** 2))
            clamped = not lo <= g_db <= hi
            g_db = min(max(g_db, lo), hi)
            y = y * math.sqrt(db_to_lin(g_db))
            total_db += g_db
        else:
            total_db += stage.gain_db
    return y, total_db, clamped


def adc_quantize(
    x: np.ndarray, bits: int, clip_level: float, agc_target_mw: Optional[float] = None
) -> np.ndarray:
    """Uniform mid-rise quantizer on I and Q, each spanning ``[-clip_level, clip_level]``.

    ``agc_target_mw`` first rescales ``x`` to that average power. Samples
    beyond the range clip to the outermost levels.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if agc_target_mw is not None:
        x = x * math.sqrt(agc_target_mw / np.mean(np.abs(x) ** 2))
    step = 2.0 * clip_level / 2**bits
    top = clip_level - step / 2.0

    def q(v):
        return np.clip(step * (np.floor(v / step) + 0.5), -top, top)

    return q(x.real) + 1j * q(x.imag)
