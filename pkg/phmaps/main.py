"""Command-line entry point.

Exit codes: 0 when every check passes, 1 on a failed verification or an
unexpected error, 2 on a usage error.
"""
from __future__ import annotations

import sys
from datetime import datetime, timezone
from typing import Sequence

from pydantic import ValidationError

from phmaps.cli import build_parser
from phmaps.errors import (
    AdmissibilityError,
    DimensionMismatchError,
    DomainError,
    PharmonicError,
    UsageError,
)
from phmaps.logger import command_context, get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with 2 on its own errors
    args.started_at = datetime.now(timezone.utc)
    with command_context(args.command):
        return _run(args)


def _run(args) -> int:
    try:
        logger.debug("Running %s with %s", args.command, vars(args))
        return args.handler(args)
    except (UsageError, DomainError, DimensionMismatchError, ValidationError) as exc:
        logger.error("Usage error in %s: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AdmissibilityError as exc:
        logger.error("%s: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except PharmonicError as exc:
        logger.exception("%s failed: %s", args.command, exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except Exception as exc:
        logger.exception("Unhandled error in %s: %s", args.command, exc)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
