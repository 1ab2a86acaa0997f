"""Command-line front end.

Subcommands:

* ``cut``      - run the peak cut on a load vector from a CSV file
* ``auction``  - clear a single slot from a CSV bid book
* ``simulate`` - run a full experiment sweep from a config file
* ``validate`` - check a config file and the guarantee precondition

Exit codes: 0 success, 1 usage or configuration error, 2 infeasible cut
(``cut`` subcommand only).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .auction import Bid, clear_slot
from .experiment import run_experiment
from .loads import aggregate, par, read_load_rows
from .parcut import is_feasible, par_cut
from .pricing import reserve_monotonicity_warning, reserve_prices
from .scenario import ConfigError, generate_demands, load_config


def _cmd_cut(args) -> int:
    rows = read_load_rows(args.load)
    _, vector = rows[0]
    try:
        result = par_cut(vector, args.cut_percentage)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if not result.feasible:
        print("INFEASIBLE")
        return 2
    print(",".join(repr(v) for v in result.load.values))
    print(f"par_before={par(vector):.9g} par_after={par(result.load):.9g}")
    return 0


def _read_bid_book(path) -> list[Bid]:
    bids = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        expected = {"agent_id", "quantity", "valuation"}
        if reader.fieldnames is None or set(reader.fieldnames) != expected:
            raise ValueError(f"{path}: bid book needs columns agent_id,quantity,valuation")
        for rec in reader:
            bids.append(
                Bid(int(rec["agent_id"]), float(rec["quantity"]), float(rec["valuation"]))
            )
    return bids


def _cmd_auction(args) -> int:
    try:
        bids = _read_bid_book(args.bids)
        outcome = clear_slot(bids, args.supply, args.reserve)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"clearing_price={outcome.clearing_price:.6f}")
    print(f"leftover_supply={outcome.leftover_supply:.9g}")
    for agent_id, quantity in outcome.winners:
        print(f"winner agent_id={agent_id} quantity={quantity:.9g}")
    if not outcome.winners:
        print("no winners")
    return 0


def _apply_overrides(config, args):
    from dataclasses import replace

    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if args.out is not None:
        config = replace(config, output_dir=args.out)
    return config


def _cmd_simulate(args) -> int:
    try:
        config = _apply_overrides(load_config(args.config), args)
        result = run_experiment(
            config, out_dir=Path(config.output_dir), record_trace=args.trace
        )
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    feasible = sum(1 for r in result.runs if r.session is not None)
    satisfied = sum(1 for r in result.runs if r.system.satisfied)
    print(f"wrote {config.output_dir}/: {len(result.runs)} scenario runs "
          f"({feasible} feasible, {satisfied} satisfied)")
    return 0


def _cmd_validate(args) -> int:
    try:
        config = _apply_overrides(load_config(args.config), args)
    except ConfigError as err:
        print(f"invalid config: {err}", file=sys.stderr)
        return 1

    problems = []
    warnings = []
    try:
        rng = config.trial_rng(0)
        demands = generate_demands(config, rng)
        original = aggregate(demands, config.slot_count)
        model = config.cost_model()
        reserves = reserve_prices(model, original)

        warn = reserve_monotonicity_warning(model, original)
        if warn:
            warnings.append(warn)
        if config.guarantee_kwh > 0.0:
            min_demand = min(min(d.demand.values) for d in demands)
            if config.guarantee_kwh > min_demand:
                warnings.append(
                    f"guarantee {config.guarantee_kwh} kWh exceeds the smallest per-slot "
                    f"demand {min_demand:.6f} kWh; some consumers would receive more than "
                    "they asked for in shortage slots"
                )
        for cut in config.cut_percentages:
            if not is_feasible(original, cut):
                warnings.append(f"cut {cut:g} is infeasible for the trial-0 aggregate")
                continue
            cut_load = par_cut(original, cut).load
            floor = config.guarantee_kwh * config.population
            for slot in range(config.slot_count):
                if cut_load[slot] < original[slot] - 1e-9 and cut_load[slot] < floor - 1e-9:
                    problems.append(
                        f"cut {cut:g}, slot {slot + 1}: supply {cut_load[slot]:.6f} kWh "
                        f"cannot honour the {config.guarantee_kwh} kWh guarantee for "
                        f"{config.population} consumers"
                    )
    except (ConfigError, ValueError) as err:
        problems.append(str(err))

    for w in warnings:
        print(f"warning: {w}")
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return 1
    print(f"config ok: population={config.population}, trials={config.trials}, "
          f"cuts={[f'{c:g}' for c in config.cut_percentages]}, "
          f"valuation={config.valuation_kind}, par(trial 0)={par(original):.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridauction",
        description="Peak cutting and auction-based load redistribution simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cut = sub.add_parser("cut", help="cut the peak of a load vector from a CSV file")
    p_cut.add_argument("--load", required=True, help="CSV with slot_1..slot_N columns")
    p_cut.add_argument(
        "--cut-percentage", type=float, required=True, dest="cut_percentage",
        help="fraction of the peak to remove, in (0, 1]",
    )
    p_cut.set_defaults(func=_cmd_cut)

    p_auc = sub.add_parser("auction", help="clear one slot from a CSV bid book")
    p_auc.add_argument("--bids", required=True, help="CSV with agent_id,quantity,valuation")
    p_auc.add_argument("--supply", type=float, required=True)
    p_auc.add_argument("--reserve", type=float, default=0.0)
    p_auc.set_defaults(func=_cmd_auction)

    for name, func, helptext in (
        ("simulate", _cmd_simulate, "run the full experiment sweep"),
        ("validate", _cmd_validate, "check a config file without running it"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="JSON scenario config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")
        p.add_argument("--trace", action="store_true", help="emit per-clearing trace CSVs")
        p.set_defaults(func=func)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
