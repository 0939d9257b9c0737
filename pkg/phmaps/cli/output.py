"""Writing command results to stdout or to a file with its run manifest."""
from __future__ import annotations

import sys
from argparse import Namespace
from typing import Iterable

from pydantic import BaseModel

from phmaps.storage import write_manifest, write_text

_INTERNAL = {"handler", "started_at", "out", "command"}


def parameters(args: Namespace) -> dict:
    """Arguments that determine the output bytes."""
    return {k: v for k, v in vars(args).items() if k not in _INTERNAL}


def as_json(doc: BaseModel) -> str:
    return doc.model_dump_json(indent=2) + "\n"


def emit(args: Namespace, text: str, seed: int | None = None, inputs: Iterable[str] = ()) -> None:
    """Print ``text``, or write it to ``args.out`` together with ``<out>.manifest.json``."""
    if not getattr(args, "out", None):
        sys.stdout.write(text)
        return
    dest, digest = write_text(args.out, text)
    write_manifest(args.command, parameters(args), {str(dest): digest}, args.started_at,
                   seed=seed, inputs=inputs)
