"""Sweeps, CSV export and analytic-versus-simulation comparison."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .budget import BUDGET_COLUMNS, OperatingPoint, bits_lost, detector_budget, sinr_detector
from .config import SystemParams
from .solvers import (
    SolverError,
    max_tx_general,
    max_tx_nonlinearity_limited,
    max_tx_quantization_limited,
    nl_cancellation_gain,
    required_digital_cancellation,
)

SWEEP_VARIABLES = ("p_tx", "adc_bits", "a_dig_total")

PTX_COLUMNS = BUDGET_COLUMNS + ("sinr_loss_db", "a_dig_required_db", "feasible")
BITS_COLUMNS = ("adc_bits", "p_tx_max_dbm", "limiting_factor", "p_tx_max_quant_dbm", "p_tx_max_nl_dbm", "feasible")
ADIG_COLUMNS = ("a_dig_total_db", "pa_iip3_dbm", "nl_gain_db", "feasible")
COMPARE_COLUMNS = (
    "p_tx_dbm", "sinr_sim_db", "sinr_sim_std", "a_dig_achieved_db", "a_dig_fit_db",
    "a_rf_achieved_db", "sinr_analytic_db", "gap_db", "bits_lost_sim", "bits_lost_analytic", "trials",
)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float
    outputs: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        if not self.step > 0:
            raise ValueError("sweep step must be > 0")
        if self.start > self.stop:
            raise ValueError("sweep start must not exceed stop")

    def values(self) -> List[float]:
        return frange(self.start, self.stop, self.step)


def frange(start: float, stop: float, step: float) -> List[float]:
    """Inclusive arithmetic range, robust to float accumulation."""
    n = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + i * step, 10) for i in range(n + 1)]


def sweep_ptx(params: SystemParams, values: Iterable[float], a_dig_db: Optional[float] = None) -> List[dict]:
    """Budget rows plus the digital cancellation needed for the allowed SINR loss."""
    rows = []
    for p in values:
        op = OperatingPoint(p, params, a_dig_db=a_dig_db)
        budget = detector_budget(op)
        row = budget.as_row()
        row["sinr_loss_db"] = budget.sinr_loss_db
        try:
            row["a_dig_required_db"] = required_digital_cancellation(op)
            row["feasible"] = True
        except SolverError:
            row["a_dig_required_db"] = None
            row["feasible"] = False
        rows.append(row)
    return rows


def sweep_bits(params: SystemParams, values: Iterable[float]) -> List[dict]:
    rows = []
    for b in values:
        p = params.replace(adc_bits=int(b))
        row = {"adc_bits": int(b), "p_tx_max_quant_dbm": max_tx_quantization_limited(p)}
        try:
            row["p_tx_max_nl_dbm"] = max_tx_nonlinearity_limited(p)
        except SolverError:
            row["p_tx_max_nl_dbm"] = None
        try:
            res = max_tx_general(p)
            row.update(p_tx_max_dbm=res.p_tx_max, limiting_factor=res.limiting_factor.value, feasible=True)
        except SolverError:
            row.update(p_tx_max_dbm=None, limiting_factor="", feasible=False)
        rows.append(row)
    return rows


def sweep_adig(params: SystemParams, values: Iterable[float], pa_iip3_values: Sequence[float] = (10.0, 15.0, 20.0)) -> List[dict]:
    rows = []
    for iip3 in pa_iip3_values:
        for a in values:
            row = {"a_dig_total_db": a, "pa_iip3_dbm": iip3}
            try:
                row.update(nl_gain_db=nl_cancellation_gain(params, a, iip3), feasible=True)
            except SolverError:
                row.update(nl_gain_db=None, feasible=False)
            rows.append(row)
    return rows


def run_sweep(params: SystemParams, spec: SweepSpec, **kwargs) -> Tuple[List[dict], Tuple[str, ...]]:
    """Evaluate a sweep; returns ``(rows, columns)`` with columns narrowed to
    ``spec.outputs`` (plus the sweep variable and ``feasible``) when given."""
    values = spec.values()
    if spec.variable == "p_tx":
        rows, cols = sweep_ptx(params, values, kwargs.get("a_dig_db")), PTX_COLUMNS
    elif spec.variable == "adc_bits":
        rows, cols = sweep_bits(params, values), BITS_COLUMNS
    else:
        rows, cols = sweep_adig(params, values, kwargs.get("pa_iip3_values", (10.0, 15.0, 20.0))), ADIG_COLUMNS
    if spec.outputs:
        unknown = set(spec.outputs) - set(cols)
        if unknown:
            raise ValueError(f"unknown output columns {sorted(unknown)}; available: {list(cols)}")
        keep = [cols[0]] + [c for c in cols[1:] if c in spec.outputs or c == "feasible"]
        if spec.variable == "a_dig_total":
            keep.insert(1, "pa_iip3_dbm")
        cols = tuple(dict.fromkeys(keep))
    return rows, cols


def format_value(v) -> str:
    """CSV cell text: fixed precision floats, ``true``/``false`` booleans and
    an empty cell for missing or non-finite values."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6f}" if math.isfinite(v) else ""
    return str(v)


def to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(r.get(c)) for c in columns])
    return buf.getvalue()


PLOT_TEMPLATE = '''"""Plot {csv_name}. Requires pandas and matplotlib."""
import sys

import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv({csv_name!r})
x = {x!r}
group = {group!r}
ys = {ys!r}
fig, ax = plt.subplots()
groups = df.groupby(group) if group else [(None, df)]
for key, part in groups:
    for y in ys:
        label = y if key is None else f"{{y}} ({{group}}={{key}})"
        ax.plot(part[x], part[y], marker=".", label=label)
ax.set_xlabel(x)
ax.grid(True)
ax.legend()
out = sys.argv[1] if len(sys.argv) > 1 else {png!r}
fig.savefig(out, dpi=150)
'''


def plot_script(csv_name: str, x: str, ys: Sequence[str], group: Optional[str] = None) -> str:
    """Stand-alone plotting script for a CSV written by this package."""
    png = csv_name.rsplit(".", 1)[0] + ".png"
    return PLOT_TEMPLATE.format(csv_name=csv_name, x=x, ys=list(ys), group=group, png=png)


def fit_cubic(x: Sequence[float], y: Sequence[float]) -> np.ndarray:
    """Least-squares 3rd-order polynomial coefficients (highest power first)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = np.isfinite(y)
    if ok.sum() < 4:
        raise ValueError("need at least 4 finite points for a cubic fit")
    return np.polyfit(x[ok], y[ok], 3)


def compare_analytic(config, result) -> Tuple[List[dict], Dict[str, float]]:
    """Pair simulated SINR with the analytic model fed by the simulation's
    achieved cancellation.

    The analytic model uses a cubic fit of the trial-averaged digital
    cancellation against TX power and the measured RF attenuation, which includes the
    multipath taps the single-tap RF canceller leaves untouched. ``gap_db``
    is analytic minus simulated SINR, so positive means optimistic.
    """
    params = config.analytic_params
    p_tx = np.asarray(result.p_tx)
    coef = fit_cubic(p_tx, result.a_dig_mean)
    rows = []
    for i, p in enumerate(p_tx):
        a_fit = float(np.polyval(coef, p))
        pp = params.replace(a_rf_db=float(result.a_rf_db[i])) if np.isfinite(result.a_rf_db[i]) else params
        op = OperatingPoint(float(p), pp, a_dig_db=max(a_fit, 0.0))
        an = sinr_detector(op)
        rows.append(
            {
                "p_tx_dbm": float(p),
                "sinr_sim_db": float(result.sinr_mean[i]),
                "sinr_sim_std": float(result.sinr_std[i]),
                "a_dig_achieved_db": float(result.a_dig_mean[i]),
                "a_dig_fit_db": a_fit,
                "a_rf_achieved_db": float(result.a_rf_db[i]),
                "sinr_analytic_db": an,
                "gap_db": an - float(result.sinr_mean[i]),
                "bits_lost_sim": float(result.bits_lost[i]),
                "bits_lost_analytic": bits_lost(OperatingPoint(float(p), params)),
                "trials": result.n_trials,
            }
        )
    gaps = np.array([r["gap_db"] for r in rows])
    stats = {
        "max_abs_gap_db": float(np.max(np.abs(gaps))),
        "max_optimism_db": float(np.max(gaps)),
        "mean_gap_db": float(np.mean(gaps)),
    }
    return rows, stats
