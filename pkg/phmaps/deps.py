"""Argument and input-file helpers shared by the sub-commands.

Provides ``parse_p`` used as an argparse ``type`` for exponents and loaders
that turn map or candidate JSON files back into domain objects.
"""
from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

from pydantic import ValidationError

from phmaps.errors import PharmonicError, UsageError
from phmaps.pharmonic import Exponent, as_exponent
from phmaps.schemas import CandidateSchema, MapSchema


def parse_p(text: str) -> Exponent:
    """Parse ``inf``, an integer, a fraction like ``3/2`` or a decimal like ``1.5``.

    Decimals are read exactly (``1.01`` is ``101/100``), so gamma can be
    certified whenever the discriminant is a rational square.

    Raises:
        argparse.ArgumentTypeError: if the text is not a number or p < 1.
    """
    try:
        p = as_exponent(text)
    except (ValueError, ZeroDivisionError, PharmonicError) as exc:
        raise argparse.ArgumentTypeError(f"invalid exponent {text!r}: {exc}") from exc
    if not (isinstance(p, float) and math.isinf(p)) and p < 1:
        raise argparse.ArgumentTypeError(f"p must lie in [1, inf], got {text}")
    return p


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _read_json(path: str | Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"input file {path} does not exist")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def load_map_file(path: str | Path) -> MapSchema:
    """Parse a map file; either a full map document or a bare candidate."""
    data = _read_json(path)
    try:
        if "candidate" in data:
            return MapSchema.model_validate(data)
        raise UsageError(f"{path} holds no 'candidate' entry")
    except ValidationError as exc:
        raise UsageError(f"{path} does not match the map schema: {exc}") from exc


def load_candidate_file(path: str | Path) -> CandidateSchema:
    data = _read_json(path)
    try:
        return CandidateSchema.model_validate(data.get("candidate", data))
    except ValidationError as exc:
        raise UsageError(f"{path} does not match the candidate schema: {exc}") from exc


def p_from_text(text: str | None, fallback: str) -> Exponent:
    """Exponent given on the command line, else the one stored in a map file."""
    try:
        return parse_p(text if text is not None else fallback)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc)) from exc


__all__ = ["parse_p", "positive_int", "load_map_file", "load_candidate_file", "p_from_text"]
