"""Sub-commands producing and checking maps: generate (alias map), construct, verify, gamma."""
from __future__ import annotations

import argparse

from phmaps.cli.output import as_json, emit
from phmaps.construct import METHODS
from phmaps.deps import load_candidate_file, load_map_file, p_from_text, parse_p, positive_int
from phmaps.logger import get_logger
from phmaps.numeric import FDConfig
from phmaps.schemas import MapSchema
from phmaps import tasks

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1


def cmd_generate(args: argparse.Namespace) -> int:
    doc = tasks.generate_map(args.n, args.p, args.method, k=args.k, budget=args.budget)
    emit(args, as_json(doc))
    return EXIT_OK


def cmd_construct(args: argparse.Namespace) -> int:
    doc = tasks.construct_candidate(args.n, args.method, k=args.k, budget=args.budget)
    emit(args, as_json(doc))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Exit 0 only when every exact and numeric check passes."""
    if args.candidate:
        candidate = load_candidate_file(args.map)
        p = p_from_text(args.p, "2")
        doc = MapSchema(candidate=candidate, profile=tasks.exponent_profile(candidate.n, candidate.k, p))
    else:
        doc = load_map_file(args.map)
        p = p_from_text(args.p, doc.profile.p)
    cfg = FDConfig.from_settings(
        residual_step=args.fd_step,
        outer_step=args.outer_step,
        sample_count=args.points,
        seed=args.seed,
        r_min=args.r_min,
        r_max=args.r_max,
        residual_levels=args.levels,
    )
    report = tasks.verify_map(doc, p=p, cfg=cfg, fd=not args.no_fd)
    emit(args, as_json(report), seed=cfg.seed, inputs=[args.map])
    if not report.passed:
        logger.error("Verification failed: %s", report.failures)
        return EXIT_FAILED
    return EXIT_OK


def cmd_gamma(args: argparse.Namespace) -> int:
    emit(args, as_json(tasks.exponent_profile(args.n, args.k, args.p)))
    return EXIT_OK


def register(sub: argparse._SubParsersAction) -> None:
    """Attach the map sub-commands to ``sub``."""
    gen = sub.add_parser("generate", aliases=["map"], help="build h and emit the map u = |x|^(gamma-k) h")
    gen.add_argument("--n", type=positive_int, required=True, help="domain dimension")
    gen.add_argument("--p", type=parse_p, default=parse_p("2"), help="exponent in [1, inf]; '3/2' and 'inf' accepted")
    gen.add_argument("--method", choices=METHODS, default="hurwitz")
    gen.add_argument("--k", type=positive_int, default=2, help="degree of h")
    gen.add_argument("--budget", type=positive_int, default=None, help="Hurwitz planner rounds")
    gen.add_argument("--out", default=None, help="output file (stdout when omitted)")
    gen.set_defaults(handler=cmd_generate)

    con = sub.add_parser("construct", help="emit the candidate h alone")
    con.add_argument("--n", type=positive_int, required=True)
    con.add_argument("--method", choices=METHODS, default="hurwitz")
    con.add_argument("--k", type=positive_int, default=2)
    con.add_argument("--budget", type=positive_int, default=None)
    con.add_argument("--out", default=None)
    con.set_defaults(handler=cmd_construct)

    ver = sub.add_parser("verify", help="check a map file exactly and numerically")
    ver.add_argument("--map", required=True, help="map JSON written by generate")
    ver.add_argument("--candidate", action="store_true", help="the file holds a bare candidate")
    ver.add_argument("--p", default=None, help="override the exponent stored in the file")
    ver.add_argument("--fd-step", type=float, default=None, help="inner gradient step of the residual")
    ver.add_argument("--outer-step", type=float, default=None)
    ver.add_argument("--points", type=positive_int, default=None)
    ver.add_argument("--seed", type=int, default=None, help="defaults to PHARMONIC_SEED")
    ver.add_argument("--r-min", type=float, default=None)
    ver.add_argument("--r-max", type=float, default=None)
    ver.add_argument("--levels", type=int, choices=range(4), default=None, help="Richardson levels of the inner gradient")
    ver.add_argument("--no-fd", action="store_true", help="exact checks only")
    ver.add_argument("--out", default=None)
    ver.set_defaults(handler=cmd_verify)

    gam = sub.add_parser("gamma", help="print the exponent profile for (n, k, p)")
    gam.add_argument("--n", type=positive_int, required=True)
    gam.add_argument("--k", type=positive_int, default=2)
    gam.add_argument("--p", type=parse_p, required=True)
    gam.add_argument("--out", default=None)
    gam.set_defaults(handler=cmd_gamma)
