"""Commands for treebank merging and inspection."""

import logging
from pathlib import Path
from typing import Optional, Tuple

import click

from app.commands.common import (
    TAG_MODES,
    emit,
    load_parts,
    record_run,
    tag_config,
    translate_errors,
)
from app.services.optimizer import phase1_analyze
from app.utils.conll_io import write_treebank
from app.utils.report_formatter import ReportFormatter
from app.utils.treebank_ops import apply_tag_config, merge_treebanks, shared_tag_report

logger = logging.getLogger(__name__)

input_files = click.argument(
    "inputs", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path)
)


@click.command("merge")
@input_files
@click.option("--lang", "langs", multiple=True, required=True, help="Language code of each input, in order.")
@click.option("--tags", type=click.Choice(TAG_MODES), default=None, help="Tag configuration to apply.")
@click.option("--prefix-tags", is_flag=True, help="Prefix both tag columns with the language code.")
@click.option("--repair-roots", is_flag=True, help="Re-attach extra roots to the first root.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.pass_context
@translate_errors
def merge_command(
    ctx: click.Context,
    inputs: Tuple[Path, ...],
    langs: Tuple[str, ...],
    tags: Optional[str],
    prefix_tags: bool,
    repair_roots: bool,
    output: Path,
):
    """Concatenate treebanks into a single training file."""
    merged = merge_treebanks(load_parts(inputs, langs, repair_roots))
    if tags or prefix_tags:
        merged = apply_tag_config(merged, tag_config(tags or TAG_MODES[0], prefix_tags))
    emit(write_treebank(merged), output)
    record_run(ctx, inputs, [output])
    logger.info(f"Merged {len(merged)} sentences from {len(inputs)} treebanks into {output}")


@click.command("analyze-tags")
@input_files
@click.option("--lang", "langs", multiple=True, required=True, help="Language code of each input, in order.")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_context
@translate_errors
def analyze_tags_command(
    ctx: click.Context, inputs: Tuple[Path, ...], langs: Tuple[str, ...], output: Optional[Path]
):
    """Fine tags shared between every pair of languages."""
    matrix = shared_tag_report(load_parts(inputs, langs))
    emit(ReportFormatter.to_tsv(ReportFormatter.shared_tags(matrix), index=True), output)
    if output is not None:
        record_run(ctx, inputs, [output])


@click.command("profile")
@input_files
@click.option("--lang", "langs", multiple=True, help="Language code of each input, in order.")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@translate_errors
def profile_command(inputs: Tuple[Path, ...], langs: Tuple[str, ...], output: Optional[Path]):
    """Describe a (merged) training treebank."""
    parts = load_parts(inputs, langs)
    treebank = parts[0][1] if len(parts) == 1 else merge_treebanks(
        [(lang or "und", part) for lang, part in parts]
    )
    frame = ReportFormatter.profile(phase1_analyze(treebank))
    if output is None:
        click.echo(ReportFormatter.to_text(frame), nl=False)
    else:
        emit(ReportFormatter.to_tsv(frame), output)
