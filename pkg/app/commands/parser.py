"""Commands for parser training and parsing."""

import logging
from pathlib import Path
from typing import List, Optional, Tuple

import click

from app.commands.common import (
    TAG_MODES,
    emit,
    load_merged,
    record_run,
    tag_config,
    translate_errors,
)
from app.schemas.parser import TrainParams
from app.services.optimizer import FeatureOptimizer
from app.services.parser import ParserModel, parse_treebank, train_parser
from app.services.tagger import TaggerModel, tag_treebank
from app.utils.conll_io import read_treebank_file, write_treebank
from app.utils.features import load_templates
from app.utils.report_formatter import ReportFormatter
from app.utils.transitions import TransitionSystem
from config import settings

logger = logging.getLogger(__name__)

existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)
SYSTEMS = [system.value for system in TransitionSystem] + ["auto"]


def _read_model(path: Path) -> ParserModel:
    return ParserModel.loads(path.read_text(encoding="utf-8"))


@click.command("train")
@click.option("--train", "train_files", multiple=True, required=True, type=existing_file)
@click.option("--dev", "dev_files", multiple=True, required=True, type=existing_file)
@click.option("--lang", "langs", multiple=True, help="Language code of each train/dev file, in order.")
@click.option("--system", type=click.Choice(SYSTEMS), default=TransitionSystem.ARC_EAGER.value, show_default=True)
@click.option("--tags", type=click.Choice(TAG_MODES), default=TAG_MODES[0], show_default=True)
@click.option("--prefix-lang", is_flag=True, help="Prefix tags with the language code.")
@click.option("--epochs", type=click.IntRange(min=1), default=settings.default_epochs, show_default=True)
@click.option("--seed", type=int, default=settings.default_seed, show_default=True)
@click.option("--templates", "templates_file", type=existing_file, default=None, help="Feature template file.")
@click.option("--pool", "pool_file", type=existing_file, default=None, help="Candidate templates for feature search.")
@click.option("--optimize-features", is_flag=True, help="Run the feature search with the given system.")
@click.option("--no-shuffle", is_flag=True, help="Keep sentence order across epochs.")
@click.option("--repair-roots", is_flag=True, help="Re-attach extra roots to the first root.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.pass_context
@translate_errors
def train_command(
    ctx: click.Context,
    train_files: Tuple[Path, ...],
    dev_files: Tuple[Path, ...],
    langs: Tuple[str, ...],
    system: str,
    tags: str,
    prefix_lang: bool,
    epochs: int,
    seed: int,
    templates_file: Optional[Path],
    pool_file: Optional[Path],
    optimize_features: bool,
    no_shuffle: bool,
    repair_roots: bool,
    output: Path,
):
    """Train a parser; --system auto runs the full optimizer."""
    if langs and len(train_files) != len(dev_files):
        raise click.UsageError("--train and --dev must be given the same number of times with --lang")
    train = load_merged(train_files, langs, repair_roots)
    dev = load_merged(dev_files, langs, repair_roots)

    templates = load_templates(templates_file.read_text(encoding="utf-8")) if templates_file else None
    pool = load_templates(pool_file.read_text(encoding="utf-8")) if pool_file else None
    params = TrainParams(
        epochs=epochs,
        seed=seed,
        system=TransitionSystem.ARC_EAGER if system == "auto" else TransitionSystem(system),
        templates=templates,
        tag_config=tag_config(tags, prefix_lang),
        shuffle=not no_shuffle,
    )

    inputs: List[Path] = list(train_files) + list(dev_files)
    inputs += [path for path in (templates_file, pool_file) if path is not None]
    outputs = [output]

    if system == "auto" or optimize_features:
        optimizer = FeatureOptimizer(train, dev, params)
        model, report = optimizer.optimize(None if system == "auto" else params.system, pool)
        log_path = Path(f"{output}.optimization.txt")
        table_path = Path(f"{output}.optimization.tsv")
        emit(ReportFormatter.optimization_log(report), log_path)
        emit(ReportFormatter.to_tsv(ReportFormatter.trials(report)), table_path)
        outputs += [log_path, table_path]
    else:
        model = train_parser(train, dev, params)

    emit(model.dumps(), output)
    record_run(ctx, inputs, outputs, seed=seed)
    logger.info(
        f"Saved {model.system.value} model (epoch {model.metadata.selected_epoch}, "
        f"dev LAS {model.metadata.selected_las:.2f}) to {output}"
    )


@click.command("parse")
@click.option("--model", "model_file", required=True, type=existing_file)
@click.option("--input", "input_file", required=True, type=existing_file)
@click.option("--tagger", "tagger_file", type=existing_file, default=None, help="Predict tags before parsing.")
@click.option("--lang", default=None, help="Language code of the input, needed for prefixed tags.")
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_context
@translate_errors
def parse_command(
    ctx: click.Context,
    model_file: Path,
    input_file: Path,
    tagger_file: Optional[Path],
    lang: Optional[str],
    output: Optional[Path],
):
    """Parse a CoNLL-X file; HEAD and DEPREL of the input are ignored."""
    model = _read_model(model_file)
    treebank = read_treebank_file(input_file, lang=lang, annotated=False)
    if tagger_file is not None:
        tagger = TaggerModel.loads(tagger_file.read_text(encoding="utf-8"))
        treebank = tag_treebank(tagger, treebank)

    parsed = parse_treebank(model, treebank)
    emit(write_treebank(parsed), output)
    if output is not None:
        inputs = [model_file, input_file] + ([tagger_file] if tagger_file else [])
        record_run(ctx, inputs, [output])
