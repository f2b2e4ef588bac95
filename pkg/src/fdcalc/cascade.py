"""Cascade analysis of an RF chain.

Noise is cascaded with Friis' formula. Nonlinear distortion is referred to
the chain input: stage ``k`` with input intercept ``iipn_k`` and total
upstream gain ``G_k`` contributes ``G_k / iip2_k`` to ``1/iip2_in`` and
``(G_k / iip3_k)**2`` to ``1/iip3_in**2``. The distortion powers at the
chain output are then ``g * p_in**2 / iip2_in`` and ``g * p_in**3 / iip3_in**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .config import ComponentSpec, SystemParams
from .units import db_to_lin, lin_to_db, thermal_noise_dbm


def _fixed_gain_lin(stage: ComponentSpec) -> float:
    if stage.is_variable:
        raise ValueError(f"stage {stage.name!r} has a gain range; fix its gain first")
    return db_to_lin(stage.gain_db)


def _upstream_gains(chain: Sequence[ComponentSpec]):
    """Yield ``(stage, linear gain ahead of the stage)``; the last stage's own
    gain is never needed, so a trailing variable stage is allowed."""
    g = 1.0
    for i, stage in enumerate(chain):
        yield stage, g
        if i < len(chain) - 1:
            g *= _fixed_gain_lin(stage)


def total_gain_db(chain: Sequence[ComponentSpec]) -> float:
    return sum(lin_to_db(_fixed_gain_lin(c)) for c in chain)


def friis_noise_factor(chain: Sequence[ComponentSpec]) -> float:
    """Linear noise factor of the cascade."""
    if not chain:
        raise ValueError("chain must be non-empty")
    f_total = 0.0
    for i, (stage, g_before) in enumerate(_upstream_gains(chain)):
        f = db_to_lin(stage.nf_db)
        f_total += f if i == 0 else (f - 1.0) / g_before
    return f_total


def noise_figure_db(chain: Sequence[ComponentSpec]) -> float:
    return lin_to_db(friis_noise_factor(chain))


def rx_noise_figure(params: SystemParams) -> float:
    return noise_figure_db(params.rx_chain)


def sensitivity(params: SystemParams) -> float:
    """Reference sensitivity in dBm."""
    return thermal_noise_dbm(params.bandwidth_hz) + rx_noise_figure(params) + params.snr_req_db


def nth_order_distortion(p_in: float, p_out: float, iipn: float, n: int) -> float:
    """Output power (dBm) of the n-th order in-band distortion of one stage.

    ``p_in``/``p_out`` are the fundamental input/output powers and ``iipn``
    the stage's input-referred intercept, all in dBm.
    """
    if n not in (2, 3):
        raise ValueError(f"only 2nd and 3rd order are modelled, got n={n}")
    return p_out - (n - 1) * (iipn - p_in)


def distortion_coefficients(chain: Sequence[ComponentSpec]) -> Tuple[float, float]:
    """Return ``(1/iip2_in, 1/iip3_in**2)`` in 1/mW and 1/mW**2.

    Zero means the chain is perfectly linear for that order.
    """
    k2 = 0.0
    k3 = 0.0
    for stage, g_before in _upstream_gains(chain):
        if stage.iip2_dbm is not None:
            k2 += g_before / db_to_lin(stage.iip2_dbm)
        if stage.iip3_dbm is not None:
            k3 += (g_before / db_to_lin(stage.iip3_dbm)) ** 2
    return k2, k3


def input_referred_iip2(chain: Sequence[ComponentSpec]) -> float:
    """Cascaded input-referred IIP2 in dBm (``inf`` for a 2nd-order-linear chain)."""
    k2, _ = distortion_coefficients(chain)
    return math.inf if k2 == 0 else -lin_to_db(k2)


def input_referred_iip3(chain: Sequence[ComponentSpec]) -> float:
    """Cascaded input-referred IIP3 in dBm (``inf`` for a 3rd-order-linear chain)."""
    _, k3 = distortion_coefficients(chain)
    return math.inf if k3 == 0 else -0.5 * lin_to_db(k3)


def rx_distortion_powers(chain: Sequence[ComponentSpec], p_in: float) -> Tuple[float, float]:
    """2nd- and 3rd-order distortion powers (mW) at the chain output.

    ``p_in`` is the total linear power (mW) at the chain input. Each stage's
    input is approximated by the amplified chain input alone.
    """
    g = _fixed_gain_lin(chain[-1]) * math.prod(_fixed_gain_lin(c) for c in chain[:-1])
    k2, k3 = distortion_coefficients(chain)
    return g * k2 * p_in**2, g * k3 * p_in**3


def exact_distortion_oracle(chain: Sequence[ComponentSpec], p_in: float) -> Tuple[float, float]:
    """Stage-by-stage distortion powers (mW) at the chain output.

    Unlike :func:`rx_distortion_powers`, every stage sees the full power
    arriving at its input, including distortion produced upstream.
    """
    s, d2, d3 = float(p_in), 0.0, 0.0
    for stage in chain:
        g = _fixed_gain_lin(stage)
        p_stage = s + d2 + d3
        new2 = g * p_stage**2 / db_to_lin(stage.iip2_dbm) if stage.iip2_dbm is not None else 0.0
        new3 = g * p_stage**3 / db_to_lin(stage.iip3_dbm) ** 2 if stage.iip3_dbm is not None else 0.0
        s, d2, d3 = g * s, g * d2 + new2, g * d3 + new3
    return d2, d3


@dataclass(frozen=True)
class CascadeSummary:
    total_gain_db: float
    nf_db: float
    iip2_inref: float
    iip3_inref: float
    gain_range_db: Tuple[float, float]


def cascade_summary(params: SystemParams, rx_gain_db: Optional[float] = None) -> CascadeSummary:
    """Summarize the RX chain; ``rx_gain_db`` defaults to the maximum gain."""
    lo, hi = params.rx_gain_range_db
    chain = params.rx_chain_at(hi if rx_gain_db is None else rx_gain_db)
    return CascadeSummary(
        total_gain_db=total_gain_db(chain),
        nf_db=noise_figure_db(chain),
        iip2_inref=input_referred_iip2(chain),
        iip3_inref=input_referred_iip3(chain),
        gain_range_db=(lo, hi),
    )


def _fmt(value, width=9) -> str:
    if value is None:
        return "-".rjust(width)
    if isinstance(value, tuple):
        return f"{value[0]:g}-{value[1]:g}".rjust(width)
    return f"{value:.1f}".rjust(width)


def format_cascade_table(params: SystemParams) -> str:
    """Plain-text table of the RX stages with a cascade total row."""
    summ = cascade_summary(params)
    head = f"{'stage':<8}{'gain_dB':>9}{'IIP2':>9}{'IIP3':>9}{'NF_dB':>9}"
    lines = [head, "-" * len(head)]
    for c in params.rx_chain:
        lines.append(f"{c.name:<8}{_fmt(c.gain_db)}{_fmt(c.iip2_dbm)}{_fmt(c.iip3_dbm)}{_fmt(c.nf_db)}")
    lines.append("-" * len(head))
    lines.append(
        f"{'Total':<8}{_fmt(summ.gain_range_db)}{_fmt(summ.iip2_inref)}"
        f"{_fmt(summ.iip3_inref)}{_fmt(summ.nf_db)}"
    )
    return "\n".join(lines)

