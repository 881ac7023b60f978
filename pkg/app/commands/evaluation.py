"""Commands for scoring and significance testing."""

import io
import logging
from pathlib import Path
from typing import List, Optional

import click
import pandas as pd

from app.commands.common import emit, record_run, translate_errors
from app.core.exceptions import DataError
from app.schemas.evaluation import Metric
from app.services.evaluation import benjamini_hochberg, randomized_comparator, score
from app.utils.conll_io import read_treebank_file
from app.utils.report_formatter import ReportFormatter
from config import settings

logger = logging.getLogger(__name__)

existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)


@click.command("eval")
@click.option("--gold", "gold_file", required=True, type=existing_file)
@click.option("--pred", "pred_file", required=True, type=existing_file)
@click.option("--exclude-punct", is_flag=True, help="Skip tokens whose gold coarse tag is punctuation.")
@click.option("--sentences", "sentences_file", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also write per-sentence counts as TSV.")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_context
@translate_errors
def eval_command(
    ctx: click.Context,
    gold_file: Path,
    pred_file: Path,
    exclude_punct: bool,
    sentences_file: Optional[Path],
    output: Optional[Path],
):
    """LAS and UAS of a parsed file against gold."""
    report = score(read_treebank_file(gold_file), read_treebank_file(pred_file), exclude_punct)
    frame = ReportFormatter.eval_report(report)
    click.echo(ReportFormatter.to_text(frame), nl=False)

    outputs = []
    if output is not None:
        emit(ReportFormatter.to_tsv(frame), output)
        outputs.append(output)
    if sentences_file is not None:
        emit(ReportFormatter.to_tsv(ReportFormatter.eval_sentences(report)), sentences_file)
        outputs.append(sentences_file)
    if outputs:
        record_run(ctx, [gold_file, pred_file], outputs)


@click.command("compare")
@click.option("--gold", "gold_file", required=True, type=existing_file)
@click.option("--pred-a", "pred_a_file", required=True, type=existing_file)
@click.option("--pred-b", "pred_b_file", required=True, type=existing_file)
@click.option("--metric", type=click.Choice([m.value for m in Metric]), default=Metric.LAS.value, show_default=True)
@click.option("--iterations", type=int, default=settings.significance_iterations, show_default=True)
@click.option("--seed", type=int, default=settings.default_seed, show_default=True)
@click.option("--exclude-punct", is_flag=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_context
@translate_errors
def compare_command(
    ctx: click.Context,
    gold_file: Path,
    pred_a_file: Path,
    pred_b_file: Path,
    metric: str,
    iterations: int,
    seed: int,
    exclude_punct: bool,
    output: Optional[Path],
):
    """Randomized paired significance test between two parsed files."""
    gold = read_treebank_file(gold_file)
    report_a = score(gold, read_treebank_file(pred_a_file), exclude_punct)
    report_b = score(gold, read_treebank_file(pred_b_file), exclude_punct)
    result = randomized_comparator(report_a, report_b, Metric(metric), iterations, seed)
    emit(ReportFormatter.to_tsv(ReportFormatter.significance(result)), output)
    if output is not None:
        record_run(ctx, [gold_file, pred_a_file, pred_b_file], [output], seed=seed)


def _read_p_values(path: Path) -> List[float]:
    """p-values from a TSV with a ``p_value`` column, or the last field of each line."""
    rows = [
        (line_number, line)
        for line_number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1)
        if line.strip() and not line.strip().startswith("#")
    ]
    if rows and "p_value" in rows[0][1].strip().split("\t"):
        frame = pd.read_csv(io.StringIO("\n".join(line for _, line in rows)), sep="\t")
        values = pd.to_numeric(frame["p_value"], errors="coerce")
        missing = values.isna().to_numpy()
        if missing.any():
            line_number = rows[int(missing.argmax()) + 1][0]
            raise DataError(f"p-value file line {line_number}: p_value is not a number")
        return values.astype(float).tolist()

    values = []
    for line_number, line in rows:
        try:
            values.append(float(line.strip().split("\t")[-1]))
        except ValueError:
            raise DataError(f"p-value file line {line_number}: not a number: {line.strip()!r}")
    return values


@click.command("bh")
@click.option("--pvalues", "pvalues_file", required=True, type=existing_file,
              help="One p-value per line (last tab-separated field).")
@click.option("--q", type=float, default=settings.fdr_q, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_context
@translate_errors
def bh_command(ctx: click.Context, pvalues_file: Path, q: float, output: Optional[Path]):
    """Benjamini-Hochberg rejections at false discovery rate q."""
    p_values = _read_p_values(pvalues_file)
    rejected = benjamini_hochberg(p_values, q)
    emit(ReportFormatter.to_tsv(ReportFormatter.rejections(p_values, rejected)), output)
    if output is not None:
        record_run(ctx, [pvalues_file], [output])
