"""Helpers for writing command outputs and their run manifests under OUTPUT_ROOT."""
from __future__ import annotations

import hashlib
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Mapping

from phmaps import __version__
from phmaps.config import settings
from phmaps.logger import get_logger
from phmaps.schemas import RunManifestSchema

logger = get_logger(__name__)


def resolve(path: str | Path) -> Path:
    """Relative paths are taken relative to ``settings.OUTPUT_ROOT``."""
    path = Path(path)
    return path if path.is_absolute() else Path(settings.OUTPUT_ROOT) / path


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_digest(path: str | Path) -> str:
    """SHA-256 of a file, read in 64 KiB chunks."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(1024 * 64)
            if not chunk:
                break
            h.update(chunk)
    return h.hexdigest()


def write_text(path: str | Path, text: str) -> tuple[Path, str]:
    """Write UTF-8 text, creating parent directories.

    Newlines are written untranslated so CSV rows keep their CRLF endings.

    Returns:
        The resolved path and the SHA-256 digest of the bytes written.
    """
    dest = resolve(path)
    dest.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8")
    with open(dest, "wb") as out:
        out.write(data)
    logger.debug("Wrote %s bytes to %s", len(data), dest)
    return dest, sha256_bytes(data)


def manifest_path(output: str | Path) -> Path:
    """Sidecar path of an already resolved output path."""
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")


def write_manifest(
    command: str,
    parameters: Mapping[str, Any],
    outputs: Mapping[str, str],
    started_at: datetime,
    seed: int | None = None,
    inputs: Iterable[str | Path] = (),
) -> Path:
    """Write ``<first output>.manifest.json`` describing one command run.

    Args:
        command: Sub-command name.
        parameters: Parsed arguments that determine the output bytes.
        outputs: Mapping of output path to its SHA-256 digest.
        started_at: Time the command started; the finish time is taken now.
        seed: Sampling seed, when the command uses one.
        inputs: Input files, digested here.
    """
    if not outputs:
        raise ValueError("a manifest needs at least one output")
    manifest = RunManifestSchema(
        command=command,
        parameters={k: (v if isinstance(v, (int, float, bool)) or v is None else str(v))
                    for k, v in sorted(parameters.items())},
        tool_version=__version__,
        seed=seed,
        started_at=started_at,
        finished_at=datetime.now(timezone.utc),
        inputs={str(p): file_digest(p) for p in inputs},
        outputs=dict(outputs),
    )
    dest = manifest_path(next(iter(outputs)))
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", encoding="utf-8") as out:
        out.write(manifest.model_dump_json(indent=2))
    logger.info("Run manifest written to %s", dest)
    return dest
