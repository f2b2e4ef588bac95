"""OFDM waveform generation and demodulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

QAM16_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])


@dataclass(frozen=True)
class OfdmLayout:
    """Sample-level layout of an oversampled OFDM symbol.

    Data occupies the ``n_data`` bins closest to DC on both sides, leaving
    DC itself empty.
    """

    n_subcarriers: int = 64
    n_data: int = 48
    guard_samples: int = 16
    oversampling: int = 4
    sample_period_s: float = 15.625e-9

    def __post_init__(self):
        if self.n_data % 2 or self.n_data >= self.n_subcarriers:
            raise ValueError("n_data must be even and smaller than n_subcarriers")
        if self.oversampling < 1 or self.guard_samples < 0:
            raise ValueError("invalid oversampling or guard length")

    @property
    def fft_size(self) -> int:
        return self.n_subcarriers * self.oversampling

    @property
    def cp_len(self) -> int:
        return self.guard_samples * self.oversampling

    @property
    def symbol_len(self) -> int:
        return self.fft_size + self.cp_len

    @property
    def sample_rate_hz(self) -> float:
        return 1.0 / self.sample_period_s

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.sample_rate_hz / self.fft_size

    @property
    def data_bins(self) -> np.ndarray:
        half = self.n_data // 2
        k = np.r_[-half:0, 1 : half + 1]
        return k % self.fft_size

    @property
    def occupied_bandwidth_hz(self) -> float:
        """Span from the lowest to the highest data subcarrier, edges included."""
        return (self.n_data + 1) * self.subcarrier_spacing_hz

    @property
    def data_bandwidth_hz(self) -> float:
        """Noise bandwidth of the data subcarriers."""
        return self.n_data * self.subcarrier_spacing_hz

    @property
    def _scale(self) -> float:
        # unit average time-domain power for unit-power data symbols
        return self.fft_size / np.sqrt(self.n_data)


def qam16(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit average power 16-QAM symbols."""
    i = rng.choice(QAM16_LEVELS, size=shape)
    q = rng.choice(QAM16_LEVELS, size=shape)
    return (i + 1j * q) / np.sqrt(10.0)


def generate_ofdm(layout: OfdmLayout, n_symbols: int, rng: np.random.Generator):
    """Return ``(samples, data)``: a unit-power baseband sequence of
    ``n_symbols`` symbols with cyclic prefixes, and the ``(n_symbols, n_data)``
    16-QAM symbols it carries."""
    data = qam16(rng, (n_symbols, layout.n_data))
    grid = np.zeros((n_symbols, layout.fft_size), dtype=complex)
    grid[:, layout.data_bins] = data
    body = np.fft.ifft(grid, axis=1) * layout._scale
    frames = np.concatenate([body[:, -layout.cp_len :], body], axis=1) if layout.cp_len else body
    return frames.ravel(), data


def ofdm_demodulate(x: np.ndarray, layout: OfdmLayout) -> np.ndarray:
    """Data-subcarrier values ``(n_symbols, n_data)`` of a symbol-aligned sequence."""
    n_sym = len(x) // layout.symbol_len
    frames = np.asarray(x[: n_sym * layout.symbol_len]).reshape(n_sym, layout.symbol_len)
    spec = np.fft.fft(frames[:, layout.cp_len :], axis=1) / layout._scale
    return spec[:, layout.data_bins]


def papr_db(x: np.ndarray, percentile: float = 99.9) -> float:
    """Peak-to-average power ratio using a high percentile as the peak."""
    p = np.abs(x) ** 2
    return float(10.0 * np.log10(np.percentile(p, percentile) / np.mean(p)))
