"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible query,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .budget import OperatingPoint, bits_lost, detector_budget
from .cascade import format_cascade_table, sensitivity
from .config import ConfigError, builtin_names, builtin_params, load_params_file, save_params
from .report import (
    COMPARE_COLUMNS,
    SweepSpec,
    compare_analytic,
    frange,
    plot_script,
    run_sweep,
    to_csv,
)
from .sim.runner import SIM_COLUMNS, SimConfig, load_sim_config, run_simulation
from .solvers import (
    InfeasibleError,
    NoSolutionError,
    NumericalError,
    max_tx_general,
    max_tx_nonlinearity_limited,
    max_tx_quantization_limited,
    required_digital_cancellation,
)

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _scenario_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--paramset", choices=["1", "2"], default="1", help="built-in parameter set")
    src.add_argument("--config", type=Path, help="scenario JSON file")
    p.add_argument("--case", choices=["A", "B"], help="RF canceller reference: A = PA output, B = PA input")
    p.add_argument("--bits", type=int, help="override ADC resolution")
    p.add_argument("--out", type=Path, help="write CSV here instead of stdout")


def _params(args):
    params = load_params_file(args.config) if args.config else builtin_params(args.paramset)
    changes = {}
    if args.case:
        changes["rf_ref_case"] = args.case
    if args.bits is not None:
        changes["adc_bits"] = args.bits
    return params.replace(**changes) if changes else params


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)
        print(f"wrote {out}", file=sys.stderr)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return f"{v:.3f}" if math.isfinite(v) else str(v)
    return str(v)


def cmd_budget(args) -> int:
    params = _params(args)
    b = detector_budget(OperatingPoint(args.ptx, params, a_dig_db=args.adig))
    row = b.as_row()
    row["sinr_loss_db"] = b.sinr_loss_db
    if args.out:
        _emit(to_csv([row], list(row)), args.out)
    else:
        width = max(len(k) for k in row)
        for k, v in row.items():
            print(f"{k:<{width}}  {_fmt(v)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    params = _params(args)
    spec = SweepSpec(args.var, args.start, args.stop, args.step, tuple(args.columns or ()))
    rows, cols = run_sweep(params, spec, a_dig_db=args.adig, pa_iip3_values=tuple(args.pa_iip3))
    _emit(to_csv(rows, cols), args.out)
    if args.out:
        x = cols[0]
        group = "pa_iip3_dbm" if args.var == "a_dig_total" else None
        ys = [c for c in cols[1:] if c not in ("feasible", "limiting_factor", "gain_clamped", "pa_iip3_dbm")]
        script = args.out.with_suffix(".plot.py")
        script.write_text(plot_script(args.out.name, x, ys, group))
        print(f"wrote {script}", file=sys.stderr)
    return EXIT_OK


def cmd_maxtx(args) -> int:
    params = _params(args)
    a_dig = math.inf if args.adig is None else args.adig
    res = max_tx_general(params, a_dig_db=a_dig)
    print(f"p_tx_max_dbm      {res.p_tx_max:.3f}")
    print(f"limiting_factor   {res.limiting_factor.value}")
    print(f"iterations        {res.iterations}")
    print(f"residual_db       {res.residual_db:.2e}")
    print(f"quant_limited_dbm {max_tx_quantization_limited(params):.3f}")
    try:
        print(f"nl_limited_dbm    {max_tx_nonlinearity_limited(params):.3f}")
    except NoSolutionError:
        print("nl_limited_dbm    unbounded")
    return EXIT_OK


def cmd_bitloss(args) -> int:
    print(f"{bits_lost(OperatingPoint(args.ptx, _params(args))):.3f}")
    return EXIT_OK


def cmd_digcanc(args) -> int:
    params = _params(args)
    print(f"{required_digital_cancellation(OperatingPoint(args.ptx, params), args.sinr_req):.3f}")
    return EXIT_OK


def _sim_config(args) -> SimConfig:
    if args.config:
        cfg = load_sim_config(args.config.read_text(), str(args.config))
    else:
        cfg = SimConfig(params=builtin_params(args.paramset))
    changes = {"params": _params(args)}
    if args.trials is not None:
        changes["n_trials"] = args.trials
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.symbols is not None:
        changes["n_symbols_per_trial"] = args.symbols
    if args.bits is not None:
        changes["adc_bits"] = args.bits
    try:
        return cfg.replace(**changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    res = run_simulation(cfg, frange(args.start, args.stop, args.step))
    _emit(to_csv(res.rows(), SIM_COLUMNS), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _sim_config(args)
    res = run_simulation(cfg, frange(args.start, args.stop, args.step))
    rows, stats = compare_analytic(cfg, res)
    _emit(to_csv(rows, COMPARE_COLUMNS), args.out)
    for k, v in stats.items():
        print(f"{k} {v:.3f}", file=sys.stderr)
    if args.out:
        script = args.out.with_suffix(".plot.py")
        script.write_text(plot_script(args.out.name, "p_tx_dbm", ["sinr_sim_db", "sinr_analytic_db"]))
    return EXIT_OK


def cmd_paramset(args) -> int:
    if args.action == "list":
        for name in builtin_names():
            print(name)
        return EXIT_OK
    if args.name is None:
        raise ConfigError("paramset show needs a parameter set name")
    params = builtin_params(args.name)
    print(save_params(params))
    print()
    print(format_cascade_table(params))
    print(f"\nsensitivity_dbm {sensitivity(params):.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fdcalc", description="Full-duplex transceiver power budget calculator and simulator")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("budget", help="power budget at one TX power")
    _scenario_args(p)
    p.add_argument("--ptx", type=float, required=True, help="TX power in dBm")
    p.add_argument("--adig", type=float, help="digital cancellation in dB (default from scenario)")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("sweep", help="sweep TX power, ADC bits or total digital cancellation")
    _scenario_args(p)
    p.add_argument("--var", choices=["p_tx", "adc_bits", "a_dig_total"], default="p_tx")
    p.add_argument("--start", type=float, default=-5.0)
    p.add_argument("--stop", type=float, default=25.0)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--columns", nargs="+", help="restrict output columns")
    p.add_argument("--adig", type=float, help="fixed digital cancellation for p_tx sweeps")
    p.add_argument("--pa-iip3", type=float, nargs="+", default=[10.0, 15.0, 20.0], help="PA IIP3 family for a_dig_total sweeps")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("maxtx", help="maximum TX power for the allowed SINR loss")
    _scenario_args(p)
    p.add_argument("--adig", type=float, help="fixed digital cancellation (default: perfect)")
    p.set_defaults(func=cmd_maxtx)

    p = sub.add_parser("bitloss", help="ADC bits lost to self-interference")
    _scenario_args(p)
    p.add_argument("--ptx", type=float, required=True)
    p.set_defaults(func=cmd_bitloss)

    p = sub.add_parser("digcanc", help="digital cancellation needed for the allowed SINR loss")
    _scenario_args(p)
    p.add_argument("--ptx", type=float, required=True)
    p.add_argument("--sinr-req", type=float, help="required detector SINR in dB")
    p.set_defaults(func=cmd_digcanc)

    for name, func, helptext in (
        ("simulate", cmd_simulate, "waveform simulation over a TX power sweep"),
        ("compare", cmd_compare, "simulation versus analytic SINR"),
    ):
        p = sub.add_parser(name, help=helptext)
        _scenario_args(p)
        p.add_argument("--start", type=float, default=-5.0)
        p.add_argument("--stop", type=float, default=25.0)
        p.add_argument("--step", type=float, default=2.0)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--symbols", type=int, help="measurement symbols per trial")
        p.add_argument("--workers", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("paramset", help="list or show built-in parameter sets")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_paramset)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InfeasibleError, NoSolutionError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericalError, ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
