"""Sub-commands producing tables, figure data and observation reports."""
from __future__ import annotations

import argparse

from phmaps import tasks
from phmaps.cli.output import as_json, emit
from phmaps.deps import positive_int
from phmaps.logger import get_logger
from phmaps.regularity import FIGURES

logger = get_logger(__name__)


def cmd_hurwitz_plan(args: argparse.Namespace) -> int:
    emit(args, as_json(tasks.hurwitz_plan(args.r, args.s, budget=args.budget, with_family=args.family)))
    return 0


def cmd_table(args: argparse.Namespace) -> int:
    emit(args, tasks.admissibility_table(args.max_n, budget=args.budget))
    return 0


def cmd_curves(args: argparse.Namespace) -> int:
    emit(args, tasks.figure_curves(args.figure, args.grid))
    return 0


def cmd_observations(args: argparse.Namespace) -> int:
    report = tasks.observations(args.max_n, args.points)
    emit(args, as_json(report))
    if not report.passed:
        logger.error("Observations failed: %s", report.failures)
        return 1
    return 0


def register(sub: argparse._SubParsersAction) -> None:
    plan = sub.add_parser("hurwitz-plan", help="best known [r, s, t] and its derivation")
    plan.add_argument("--r", type=positive_int, required=True)
    plan.add_argument("--s", type=positive_int, required=True)
    plan.add_argument("--budget", type=positive_int, default=None)
    plan.add_argument("--family", action="store_true", help="include the replayed matrices")
    plan.add_argument("--out", default=None)
    plan.set_defaults(handler=cmd_hurwitz_plan)

    table = sub.add_parser("table", help="admissible pairs (n, N) with reference values and gaps")
    table.add_argument("--max-n", type=positive_int, default=16)
    table.add_argument("--budget", type=positive_int, default=None)
    table.add_argument("--out", default=None)
    table.set_defaults(handler=cmd_table)

    curves = sub.add_parser("curves", help="CSV data of a regularity figure")
    curves.add_argument("--figure", choices=sorted(FIGURES), required=True)
    curves.add_argument("--grid", type=positive_int, default=101, help="number of theta points")
    curves.add_argument("--out", default=None)
    curves.set_defaults(handler=cmd_curves)

    obs = sub.add_parser("observations", help="check the monotonicity and regularity observations")
    obs.add_argument("--max-n", type=positive_int, default=12)
    obs.add_argument("--points", type=positive_int, default=1000, help="interior theta points")
    obs.add_argument("--out", default=None)
    obs.set_defaults(handler=cmd_observations)
