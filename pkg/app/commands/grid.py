"""Command for the monolingual/bilingual grid experiment."""

import logging
from pathlib import Path

import click

from app.commands.common import TAG_MODES, emit, record_run, tag_config, translate_errors
from app.schemas.evaluation import Metric
from app.schemas.parser import TrainParams
from app.services.evaluation import grid_report
from app.services.grid import GridRunner
from app.utils.report_formatter import ReportFormatter
from app.utils.transitions import TransitionSystem
from config import settings

logger = logging.getLogger(__name__)


@click.command("grid")
@click.option("--treebanks", "directory", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Directory with <lang>/{train,dev,test}.conll.")
@click.option("--pairs", default="all", show_default=True, help='"all" or e.g. "en+es,en+fr".')
@click.option("--system", type=click.Choice([s.value for s in TransitionSystem]),
              default=TransitionSystem.ARC_EAGER.value, show_default=True)
@click.option("--tags", type=click.Choice(TAG_MODES), default=TAG_MODES[0], show_default=True)
@click.option("--prefix-lang", is_flag=True)
@click.option("--epochs", type=click.IntRange(min=1), default=settings.default_epochs, show_default=True)
@click.option("--seed", type=int, default=settings.default_seed, show_default=True)
@click.option("--iterations", type=click.IntRange(min=1), default=settings.significance_iterations, show_default=True)
@click.option("--jobs", type=click.IntRange(min=1), default=settings.grid_jobs, show_default=True)
@click.option("--exclude-punct", is_flag=True)
@click.option("-o", "--output-dir", required=True, type=click.Path(file_okay=False, path_type=Path))
@click.pass_context
@translate_errors
def grid_command(
    ctx: click.Context,
    directory: Path,
    pairs: str,
    system: str,
    tags: str,
    prefix_lang: bool,
    epochs: int,
    seed: int,
    iterations: int,
    jobs: int,
    exclude_punct: bool,
    output_dir: Path,
):
    """Train monolingual and bilingual parsers and compare them on every test set."""
    params = TrainParams(
        epochs=epochs,
        seed=seed,
        system=TransitionSystem(system),
        tag_config=tag_config(tags, prefix_lang),
    )
    runner = GridRunner(directory, params, pairs, iterations, jobs, exclude_punct)
    result = runner.run()

    outputs = {
        "cells.tsv": ReportFormatter.to_tsv(ReportFormatter.grid_cells(result)),
        "summary.tsv": ReportFormatter.to_tsv(ReportFormatter.grid_summaries(result.summaries)),
    }
    for metric in Metric:
        for correction in ("raw", "fdr"):
            frame = grid_report(result.cells, result.languages, metric, correction)
            outputs[f"{metric.value.lower()}_{correction}.txt"] = ReportFormatter.to_text(frame, index=True)

    written = []
    for name, text in outputs.items():
        emit(text, output_dir / name)
        written.append(output_dir / name)
    record_run(ctx, runner.source_files(), written, seed=seed)

    for summary in result.summaries:
        click.echo(
            f"{summary.metric.value} ({summary.correction}): {summary.not_significantly_worse}/"
            f"{summary.cells} not significantly worse, {summary.significant_gains} significant gains, "
            f"{summary.significant_losses} significant losses"
        )
