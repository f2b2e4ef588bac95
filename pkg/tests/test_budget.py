import math
import warnings

import numpy as np
import pytest

from fdcalc.budget import (
    GainClampWarning,
    OperatingPoint,
    bits_lost,
    detector_budget,
    pa_distortion_tx,
    quantization_noise,
    rx_total_gain,
    sinr_adc,
    sinr_detector,
    sinr_loss,
    thermal_snr,
)
from fdcalc.config import ComponentSpec
from fdcalc.units import db_to_lin, lin_to_db


def _ldb(x):
    return 10 * math.log10(x)


def _lin(x):
    return 10 ** (x / 10)


def hand_budget_set1(p_tx):
    """Set 1, Case A, written out from scratch without the package."""
    f = _lin(4.1) + (_lin(4) - 1) / _lin(25) + (_lin(4) - 1) / _lin(31)
    p_n_in = -174 + _ldb(12.5e6)
    p_soi_in = p_n_in + _ldb(f) + 10 + 5
    p_target = _ldb((4.5 / (2 * math.sqrt(2))) ** 2 / 50 * 1e3) - 10
    p3pa_tx = 3 * p_tx - 2 * (20 + 27)
    soi, n = _lin(p_soi_in), _lin(p_n_in)
    si = _lin(p_tx - 80)
    pa = _lin(p3pa_tx - 80)
    p_in = soi + n + si + pa
    inv_iip2 = _lin(25) / _lin(42) + _lin(31) / _lin(43)
    inv_iip3_sq = (1 / _lin(-9)) ** 2 + (_lin(25) / _lin(15)) ** 2 + (_lin(31) / _lin(14)) ** 2
    g = _lin(p_target) / (soi + f * n + si + pa + inv_iip2 * p_in**2 + inv_iip3_sq * p_in**3)
    G = _ldb(g)
    p2 = g * inv_iip2 * p_in**2
    p3 = g * inv_iip3_sq * p_in**3
    quant = p_target - (6.02 * 8 + 4.76 - 10)
    det = {
        "g_rx_db": G,
        "p_soi": p_soi_in + G,
        "p_n": p_n_in + G + _ldb(f),
        "p_si": p_tx - 40 - 40 - 35 + G,
        "p_quant": quant,
        "p_2nd": _ldb(p2),
        "p_3rd": _ldb(p3),
        "p_3rd_pa": p3pa_tx + G - 40 - 40,
    }
    sig = g * soi
    adc_den = g * f * n + g * si + g * pa + p2 + p3
    det_den = g * f * n + g * si / _lin(35) + g * pa + p2 + p3 + _lin(quant)
    det["sinr_adc_db"] = _ldb(sig / adc_den)
    det["sinr_det_db"] = _ldb(sig / det_den)
    det["bits_lost"] = math.log((1 + (si + pa) / (soi + n)), 4)
    return det


@pytest.mark.parametrize("p_tx", [-5.0, 10.0, 20.0])
def test_budget_matches_hand_evaluation(set1, p_tx):
    got = detector_budget(OperatingPoint(p_tx, set1)).as_row()
    for key, value in hand_budget_set1(p_tx).items():
        assert got[key] == pytest.approx(value, abs=1e-6), key


def test_signal_gain_mode_is_plain_matching(set1):
    op = OperatingPoint(12.0, set1)
    g, _ = rx_total_gain(op, gain_mode="signal")
    soi = db_to_lin(op.p_soi_in)
    si = db_to_lin(12.0 - 80)
    pa = db_to_lin(pa_distortion_tx(set1, 12.0) - 80)
    assert g == pytest.approx(db_to_lin(7.0437) / (si + pa + soi), rel=1e-3)
    with pytest.raises(ValueError):
        rx_total_gain(op, gain_mode="bogus")


def test_gain_examples(set1):
    g15, clamped = rx_total_gain(OperatingPoint(15.0, set1))
    assert lin_to_db(g15) == pytest.approx(72.0, abs=0.2)
    assert not clamped
    g25, _ = rx_total_gain(OperatingPoint(25.0, set1))
    assert lin_to_db(g25) == pytest.approx(40 + 40 + 7.0437 - 25, abs=0.1)
    g_low, _ = rx_total_gain(OperatingPoint(-60.0, set1))
    op = OperatingPoint(-60.0, set1)
    assert lin_to_db(g_low) == pytest.approx(7.0437 - op.p_soi_in, abs=1.0)


def test_gain_clamp_flag_and_warning(set2):
    op = OperatingPoint(-40.0, set2)
    with pytest.warns(GainClampWarning):
        g, clamped = rx_total_gain(op, warn=True)
    assert clamped and lin_to_db(g) == pytest.approx(100.0)
    assert detector_budget(op).gain_clamped
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rx_total_gain(OperatingPoint(15.0, set2), warn=True)


def test_quantization_noise(set1):
    assert quantization_noise(set1) == pytest.approx(7.0437 - (6.02 * 8 - 5.24), abs=1e-3)
    assert quantization_noise(set1) - quantization_noise(set1.replace(adc_bits=9)) == pytest.approx(6.02)
    rows = [detector_budget(OperatingPoint(p, set1)).p_quant for p in (-5, 5, 15, 25)]
    assert max(rows) == min(rows)


def test_si_noise_gap_is_gain_independent(set1):
    # both terms scale with the same AGC gain, so the gap is pure arithmetic
    b = detector_budget(OperatingPoint(15.0, set1))
    expected = 15.0 - 40 - 40 - 35 - (-174 + 10 * math.log10(12.5e6) + 4.1097)
    assert b.p_si - b.p_n == pytest.approx(expected, abs=1e-3)
    assert abs(b.p_si - b.p_n) < 1.1
    assert b.sinr_loss_db == pytest.approx(3.0, abs=0.5)


def test_perfect_digital_cancellation_isolates_si(set1):
    base = detector_budget(OperatingPoint(15.0, set1)).as_row()
    ideal = detector_budget(OperatingPoint(15.0, set1, a_dig_db=math.inf)).as_row()
    assert ideal["p_si"] == -math.inf
    for k in ("g_rx_db", "p_soi", "p_n", "p_quant", "p_2nd", "p_3rd", "p_3rd_pa", "sinr_adc_db", "bits_lost"):
        assert ideal[k] == base[k]


def test_eq14_high_power_specialization(set1):
    b = detector_budget(OperatingPoint(25.0, set1))
    assert b.p_si == pytest.approx(b.p_target - set1.a_dig_db, abs=0.1)


def test_case_a_vs_b(set1):
    a = detector_budget(OperatingPoint(10.0, set1))
    b = detector_budget(OperatingPoint(10.0, set1.replace(rf_ref_case="B")))
    dg = b.g_rx_db - a.g_rx_db
    assert b.p_3rd_pa - a.p_3rd_pa - dg == pytest.approx(set1.a_rf_db, abs=1e-9)
    for k in ("p_soi", "p_n", "p_si"):
        assert getattr(b, k) - getattr(a, k) == pytest.approx(dg, abs=1e-9)
    assert b.p_quant == a.p_quant


def test_sinr_relations(set1):
    op = OperatingPoint(10.0, set1, a_dig_db=0.0)
    assert sinr_detector(op) < sinr_adc(op)
    hd = OperatingPoint(-80.0, set1.replace(adc_bits=24))
    assert sinr_detector(hd) == pytest.approx(set1.snr_req_db + set1.soi_above_sens_db, abs=0.01)
    assert thermal_snr(set1) == pytest.approx(15.0, abs=1e-9)


def test_sinr_loss_at_fixed_cancellation(set1):
    assert sinr_loss(OperatingPoint(15.0, set1)) == pytest.approx(3.0, abs=0.5)
    assert sinr_loss(OperatingPoint(-5.0, set1)) < 0.5


def test_bits_lost_examples(set1):
    assert bits_lost(OperatingPoint(15.0, set1)) == pytest.approx(3.0, abs=0.3)
    assert bits_lost(OperatingPoint(20.0, set1)) == pytest.approx(4.0, abs=0.3)


def _linear_pa(params, iip3=400.0):
    tx = list(params.tx_chain)
    tx[-1] = ComponentSpec("PA", tx[-1].gain_db, tx[-1].nf_db, None, iip3)
    return params.replace(tx_chain=tuple(tx))


def test_bits_lost_limits(set1):
    no_si = _linear_pa(set1).replace(a_rf_db=400.0)
    assert bits_lost(OperatingPoint(20.0, no_si)) == pytest.approx(0.0, abs=1e-12)
    lin = _linear_pa(set1)
    op = OperatingPoint(0.0, lin)
    floor = lin_to_db(db_to_lin(op.p_soi_in) + db_to_lin(op.p_n_in))
    p_tx = floor + set1.a_ant_db + set1.a_rf_db
    assert bits_lost(OperatingPoint(p_tx, lin)) == pytest.approx(0.5, abs=1e-9)


def test_bits_lost_properties(set1):
    for p in (0.0, 15.0, 25.0):
        ref = bits_lost(OperatingPoint(p, set1))
        for b in range(4, 17):
            assert bits_lost(OperatingPoint(p, set1.replace(adc_bits=b))) == ref
    ptx = np.arange(-10, 30, 0.5)
    losses = [bits_lost(OperatingPoint(p, set1)) for p in ptx]
    assert np.all(np.diff(losses) > 0)
    for key in ("a_ant_db", "a_rf_db"):
        vals = [bits_lost(OperatingPoint(15.0, set1.replace(**{key: a}))) for a in (20, 30, 40, 50)]
        assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("p_tx", [-20.0, -5.0, 5.0, 15.0, 25.0, 35.0])
def test_agc_contract(set1, set2, p_tx):
    for params in (set1, set2, set1.replace(rf_ref_case="B")):
        b = detector_budget(OperatingPoint(p_tx, params))
        if not b.gain_clamped:
            assert b.adc_total_power() == pytest.approx(b.p_target, abs=0.01)


def test_tx_range_flag(set1):
    assert not detector_budget(OperatingPoint(20.0, set1)).tx_out_of_range
    assert detector_budget(OperatingPoint(30.0, set1)).tx_out_of_range


def test_operating_point_validation(set1):
    op = OperatingPoint(10.0, set1)
    assert op.p_soi_in == pytest.approx(-83.9, abs=0.05)
    assert op.p_n_in == pytest.approx(-103.03, abs=0.01)
    with pytest.raises(ValueError):
        OperatingPoint(10.0, set1, a_dig_db=-1)
