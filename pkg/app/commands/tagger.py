"""Commands for tagger training and tagging."""

import logging
from pathlib import Path
from typing import Optional, Tuple

import click

from app.commands.common import emit, load_merged, record_run, translate_errors
from app.schemas.tagger import TagColumn, TaggerParams
from app.services.tagger import TaggerModel, tag_treebank, train_tagger
from app.utils.conll_io import read_treebank_file, write_treebank
from config import settings

logger = logging.getLogger(__name__)

existing_file = click.Path(exists=True, dir_okay=False, path_type=Path)


@click.command("tag-train")
@click.option("--train", "train_files", multiple=True, required=True, type=existing_file)
@click.option("--dev", "dev_files", multiple=True, required=True, type=existing_file)
@click.option("--lang", "langs", multiple=True, help="Language code of each train/dev file, in order.")
@click.option(
    "--column",
    type=click.Choice([column.value for column in TagColumn]),
    default=TagColumn.CPOSTAG.value,
    show_default=True,
)
@click.option("--epochs", type=click.IntRange(min=1), default=settings.tagger_epochs, show_default=True)
@click.option("--seed", type=int, default=settings.default_seed, show_default=True)
@click.option("--no-shuffle", is_flag=True)
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.pass_context
@translate_errors
def tag_train_command(
    ctx: click.Context,
    train_files: Tuple[Path, ...],
    dev_files: Tuple[Path, ...],
    langs: Tuple[str, ...],
    column: str,
    epochs: int,
    seed: int,
    no_shuffle: bool,
    output: Path,
):
    """Train a (possibly multilingual) tagger."""
    train = load_merged(train_files, langs)
    dev = load_merged(dev_files, langs)
    params = TaggerParams(epochs=epochs, seed=seed, shuffle=not no_shuffle)
    model = train_tagger(train, dev, TagColumn(column), params)
    emit(model.dumps(), output)
    record_run(ctx, list(train_files) + list(dev_files), [output], seed=seed)
    logger.info(f"Saved {column} tagger with {len(model.classes)} tags to {output}")


@click.command("tag")
@click.option("--model", "model_file", required=True, type=existing_file)
@click.option("--input", "input_file", required=True, type=existing_file)
@click.option("-o", "--output", type=click.Path(dir_okay=False, path_type=Path), default=None)
@click.pass_context
@translate_errors
def tag_command(ctx: click.Context, model_file: Path, input_file: Path, output: Optional[Path]):
    """Fill the model's tag column of a CoNLL-X file."""
    model = TaggerModel.loads(model_file.read_text(encoding="utf-8"))
    treebank = read_treebank_file(input_file, annotated=False)
    emit(write_treebank(tag_treebank(model, treebank)), output)
    if output is not None:
        record_run(ctx, [model_file, input_file], [output])
