import csv
import io
import json

import pytest

from fdcalc.cli import main
from fdcalc.config import params_to_dict


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def parse_kv(text):
    return dict(line.split(None, 1) for line in text.strip().splitlines())


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_budget_crossing(capsys):
    rc, out, _ = run(capsys, "budget", "--paramset", "1", "--ptx", "15", "--case", "A")
    assert rc == 0
    row = parse_kv(out)
    assert abs(float(row["p_si"]) - float(row["p_n"])) < 1.1
    assert float(row["g_rx_db"]) == pytest.approx(72.0, abs=0.2)


def test_budget_low_power(capsys):
    rc, out, _ = run(capsys, "budget", "--paramset", "1", "--ptx", "-5", "--case", "A")
    row = parse_kv(out)
    assert rc == 0
    assert float(row["p_si"]) < float(row["p_n"]) - 15
    assert float(row["sinr_loss_db"]) < 0.5


def test_budget_csv(capsys, tmp_path):
    out = tmp_path / "b.csv"
    rc, _, _ = run(capsys, "budget", "--ptx", "10", "--adig", "40", "--out", str(out))
    assert rc == 0
    rows = read_csv(out.read_text())
    assert len(rows) == 1 and rows[0]["gain_clamped"] == "false"


def test_usage_errors(capsys):
    rc, _, err = run(capsys, "budget", "--ptx", "15", "--case", "C")
    assert rc == 1 and "invalid choice" in err
    assert run(capsys, "budget")[0] == 1
    assert run(capsys, "nosuch")[0] == 1


def test_config_error_has_location(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "bandwidth_hz": 1e6,\n  oops\n}')
    rc, _, err = run(capsys, "budget", "--config", str(bad), "--ptx", "0")
    assert rc == 1
    assert f"{bad}:3:" in err
    assert run(capsys, "budget", "--config", str(tmp_path / "missing.json"), "--ptx", "0")[0] == 1


def test_config_file_roundtrip(capsys, tmp_path, set1):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(params_to_dict(set1)))
    a = run(capsys, "budget", "--config", str(path), "--ptx", "12")
    b = run(capsys, "budget", "--paramset", "1", "--ptx", "12")
    assert a[0] == 0 and a[1] == b[1]


def test_infeasible_and_numeric_exit_codes(capsys):
    rc, _, err = run(capsys, "digcanc", "--ptx", "24")
    assert rc == 2 and "infeasible" in err
    rc, _, _ = run(capsys, "maxtx", "--bits", "1")
    assert rc == 2
    rc, _, _ = run(capsys, "sweep", "--start", "5", "--stop", "1")
    assert rc == 3


def test_digcanc_and_bitloss(capsys):
    rc, out, _ = run(capsys, "digcanc", "--ptx", "10")
    assert rc == 0 and float(out) == pytest.approx(29.13, abs=0.01)
    rc, out, _ = run(capsys, "bitloss", "--ptx", "20")
    assert rc == 0 and float(out) == pytest.approx(4.0, abs=0.3)


def test_maxtx(capsys):
    rc, out, _ = run(capsys, "maxtx", "--paramset", "1")
    row = parse_kv(out)
    assert rc == 0
    assert float(row["p_tx_max_dbm"]) == pytest.approx(23.0, abs=1.0)
    assert row["limiting_factor"] == "Quantization"
    assert float(row["nl_limited_dbm"]) == pytest.approx(25.02, abs=0.1)
    rc, out, _ = run(capsys, "maxtx", "--adig", "35")
    assert float(parse_kv(out)["p_tx_max_dbm"]) == pytest.approx(15.0, abs=1.0)


def test_ptx_sweep_bits_lost(capsys, tmp_path):
    out = tmp_path / "ptx.csv"
    rc, _, _ = run(capsys, "sweep", "--var", "p_tx", "--start", "-5", "--stop", "25", "--out", str(out))
    assert rc == 0
    rows = {float(r["p_tx_dbm"]): r for r in read_csv(out.read_text())}
    assert len(rows) == 31
    assert float(rows[15.0]["bits_lost"]) == pytest.approx(3.0, abs=0.3)
    assert float(rows[20.0]["bits_lost"]) == pytest.approx(4.0, abs=0.3)
    # infeasible points are flagged, never aborted
    assert rows[25.0]["feasible"] == "false" and rows[25.0]["a_dig_required_db"] == ""
    assert rows[0.0]["feasible"] == "true"
    script = out.with_suffix(".plot.py")
    assert script.exists()
    compile(script.read_text(), str(script), "exec")


def test_bits_sweep_saturates(capsys):
    rc, out, _ = run(capsys, "sweep", "--var", "adc_bits", "--start", "2", "--stop", "16")
    assert rc == 0
    rows = {int(float(r["adc_bits"])): r for r in read_csv(out)}
    assert rows[2]["feasible"] == "false"
    p10 = float(rows[10]["p_tx_max_dbm"])
    assert p10 == pytest.approx(25.02, abs=0.2)
    for b in range(11, 17):
        assert float(rows[b]["p_tx_max_dbm"]) == pytest.approx(p10, abs=0.2)
    assert float(rows[8]["p_tx_max_dbm"]) < p10 - 1.0


def test_adig_sweep_family(capsys):
    rc, out, _ = run(capsys, "sweep", "--var", "a_dig_total", "--start", "0", "--stop", "50", "--step", "10")
    assert rc == 0
    rows = read_csv(out)
    by_iip3 = {}
    for r in rows:
        by_iip3.setdefault(float(r["pa_iip3_dbm"]), []).append(float(r["nl_gain_db"]))
    assert sorted(by_iip3) == [10.0, 15.0, 20.0]
    for gains in by_iip3.values():
        assert gains[0] == pytest.approx(0.0, abs=2e-3)
        assert all(b >= a for a, b in zip(gains, gains[1:]))
    at_30 = [by_iip3[k][3] for k in (10.0, 15.0, 20.0)]
    assert at_30[0] > at_30[1] > at_30[2]


def test_sweep_columns_and_determinism(capsys):
    args = ("sweep", "--start", "0", "--stop", "4", "--columns", "bits_lost", "sinr_det_db")
    rc, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert rc == 0 and a == b
    assert a.splitlines()[0] == "p_tx_dbm,sinr_det_db,bits_lost,feasible"
    assert run(capsys, "sweep", "--columns", "nope")[0] == 3


def test_simulate_and_compare(capsys, tmp_path):
    common = ("--start", "0", "--stop", "10", "--step", "2.5", "--trials", "2", "--symbols", "20", "--seed", "3")
    rc, a, _ = run(capsys, "simulate", *common)
    _, b, _ = run(capsys, "simulate", *common)
    assert rc == 0 and a == b
    rows = read_csv(a)
    assert list(rows[0]) == ["p_tx_dbm", "sinr_sim_db", "sinr_sim_std", "a_dig_achieved_db", "trials"]
    assert len(rows) == 5
    out = tmp_path / "cmp.csv"
    rc, _, err = run(capsys, "compare", *common, "--out", str(out))
    assert rc == 0 and "max_abs_gap_db" in err
    assert "sinr_analytic_db" in out.read_text().splitlines()[0]
    assert run(capsys, "simulate", "--trials", "0")[0] == 1


def test_paramset_commands(capsys):
    rc, out, _ = run(capsys, "paramset", "list")
    assert rc == 0 and out.split() == ["paramset1", "paramset2"]
    rc, out, _ = run(capsys, "paramset", "show", "1")
    assert rc == 0
    assert "Total" in out and "-17.1" in out and "sensitivity_dbm -88.92" in out
    assert run(capsys, "paramset", "show")[0] == 1
    assert run(capsys, "paramset", "show", "9")[0] == 1


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.strip() == "0.1.0"
