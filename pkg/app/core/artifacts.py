"""Atomic artifact writing and run manifests."""

import hashlib
import logging
import os
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Union

from app.core.exceptions import DataError
from app.schemas.manifest import RunManifest

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest.json"

PathLike = Union[str, Path]


def file_digest(path: PathLike) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def input_digests(paths: Iterable[PathLike]) -> Dict[str, str]:
    return {str(path): file_digest(path) for path in paths}


@contextmanager
def atomic_output(path: PathLike) -> Iterator[Path]:
    """Yield a temporary sibling of path; it replaces path only if the block succeeds."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    os.close(fd)
    temp = Path(temp_name)
    try:
        yield temp
        os.replace(temp, target)
    except BaseException:
        temp.unlink(missing_ok=True)
        logger.error(f"Discarded partial output {target}")
        raise


def write_text(path: PathLike, text: str) -> None:
    """Atomically write UTF-8 text with LF line endings."""
    with atomic_output(path) as temp:
        with temp.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)


def manifest_path(artifact: PathLike) -> Path:
    return Path(f"{artifact}{MANIFEST_SUFFIX}")


def write_manifest(manifest: RunManifest, artifacts: List[PathLike]) -> None:
    """Write the manifest next to each artifact."""
    text = manifest.model_dump_json(indent=2) + "\n"
    for artifact in artifacts:
        write_text(manifest_path(artifact), text)


def read_manifest(path: PathLike) -> RunManifest:
    try:
        return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise DataError(f"unreadable manifest {path}: {e}")


def verify_inputs(manifest: RunManifest) -> None:
    """Fail when an input recorded in the manifest is missing or changed."""
    for path, expected in manifest.inputs.items():
        if not Path(path).is_file():
            raise DataError(f"manifest input {path} is missing")
        if file_digest(path) != expected:
            raise DataError(f"manifest input {path} changed since the recorded run")
