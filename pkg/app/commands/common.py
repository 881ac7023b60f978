"""Shared helpers for command modules."""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import click

from app.core.artifacts import input_digests, write_manifest, write_text
from app.core.exceptions import DepmergeError, InvariantViolation
from app.schemas.manifest import RunManifest
from app.schemas.treebank import TagConfig, TagMode, Treebank
from app.utils.conll_io import read_treebank_file
from app.utils.treebank_ops import merge_treebanks

logger = logging.getLogger(__name__)

TAG_MODES = [mode.value for mode in TagMode]


def translate_errors(func: Callable) -> Callable:
    """Let toolkit and click errors through; anything else becomes an invariant violation."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (DepmergeError, click.ClickException, click.exceptions.Exit):
            raise
        except Exception as e:
            logger.error(f"Unexpected failure: {e}", exc_info=True)
            raise InvariantViolation(f"unexpected failure: {e}") from e

    return wrapper


def tag_config(tags: str, prefix_lang: bool) -> TagConfig:
    return TagConfig(mode=TagMode(tags), prefix_language=prefix_lang)


def load_parts(
    paths: Sequence[Path],
    langs: Sequence[str],
    repair_roots: bool = False,
    option: str = "--lang",
) -> List[Tuple[Optional[str], Treebank]]:
    """Read each file with the language code at the same position, if any."""
    if langs and len(langs) != len(paths):
        raise click.UsageError(
            f"{option} was given {len(langs)} times for {len(paths)} input files"
        )
    codes: List[Optional[str]] = list(langs) or [None] * len(paths)
    return [
        (lang, read_treebank_file(path, lang=lang, repair_roots=repair_roots))
        for path, lang in zip(paths, codes)
    ]


def load_merged(
    paths: Sequence[Path], langs: Sequence[str], repair_roots: bool = False
) -> Treebank:
    """One treebank from one or more files; several files need a language code each."""
    parts = load_parts(paths, langs, repair_roots)
    if len(parts) == 1:
        return parts[0][1]
    if not langs:
        raise click.UsageError("merging several treebanks needs --lang for each of them")
    return merge_treebanks(parts)


def _plain(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def command_argv(ctx: click.Context) -> List[str]:
    """Rebuild an equivalent argument vector from the parsed parameters."""
    argv = [ctx.info_name]
    arguments = []
    for param in ctx.command.params:
        value = ctx.params.get(param.name)
        if value is None:
            continue
        if isinstance(param, click.Argument):
            values = value if isinstance(value, (list, tuple)) else [value]
            arguments.extend(str(item) for item in values)
            continue
        if not isinstance(param, click.Option):
            continue
        opt = param.opts[-1] if param.opts[-1].startswith("--") else param.opts[0]
        if param.is_flag:
            if value:
                argv.append(opt)
            elif param.secondary_opts:
                argv.append(param.secondary_opts[0])
        elif param.multiple:
            for item in value:
                argv.extend([opt, str(item)])
        else:
            argv.extend([opt, str(value)])
    return argv + arguments


def record_run(
    ctx: click.Context,
    inputs: Sequence[Path],
    outputs: Sequence[Path],
    seed: Optional[int] = None,
) -> RunManifest:
    """Write a manifest next to every output of the running subcommand."""
    flags: Dict[str, Any] = {name: _plain(value) for name, value in ctx.params.items()}
    manifest = RunManifest(
        subcommand=ctx.info_name,
        argv=command_argv(ctx),
        flags=flags,
        inputs=input_digests(inputs),
        seed=seed,
        outputs=[str(path) for path in outputs],
    )
    write_manifest(manifest, list(outputs))
    logger.debug(f"Recorded manifest for {ctx.info_name} with {len(outputs)} outputs")
    return manifest


def emit(text: str, output: Optional[Path]) -> None:
    """Write to a file atomically, or echo to stdout."""
    if output is None:
        click.echo(text, nl=False)
    else:
        write_text(output, text)
