"""Command-line entry point for the depmerge toolkit."""

import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import click

from app.commands import evaluation, grid, parser, tagger, treebank
from app.core.artifacts import read_manifest, verify_inputs
from app.core.exceptions import EXIT_OK, EXIT_USAGE, DepmergeError
from app.core.logging_config import configure_logging
from config import settings

logger = logging.getLogger(__name__)


class DepmergeGroup(click.Group):

    """Command group mapping toolkit errors to exit codes."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except DepmergeError as e:
            logger.error(f"{ctx.invoked_subcommand or ctx.info_name} failed: {e}")
            click.echo(f"Error: {e}", err=True)
            ctx.exit(e.exit_code)
        except click.UsageError as e:
            e.show()
            ctx.exit(EXIT_USAGE)


@click.group(cls=DepmergeGroup, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(settings.app_version, prog_name=settings.app_name)
@click.option("-v", "--verbose", is_flag=True, help="Debug logging for the toolkit.")
@click.option("--log-config", type=click.Path(dir_okay=False), default=None, help="Logging YAML file.")
def cli(verbose: bool, log_config: Optional[str]):
    """Train, run and evaluate multilingual dependency parsers."""
    configure_logging(log_config, verbose)


@cli.command("rerun")
@click.argument("manifest_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def rerun_command(ctx: click.Context, manifest_file: Path):
    """Replay the run recorded in a manifest after checking its inputs."""
    manifest = read_manifest(manifest_file)
    verify_inputs(manifest)
    logger.info(f"Replaying {manifest.subcommand} from {manifest_file}")
    root = ctx.find_root()
    command = root.command.get_command(root, manifest.subcommand)
    if command is None or manifest.argv[:1] != [manifest.subcommand]:
        raise click.UsageError(f"manifest names an unknown subcommand {manifest.subcommand!r}")
    command.main(
        args=list(manifest.argv[1:]),
        prog_name=manifest.subcommand,
        standalone_mode=False,
        parent=root,
    )


for command in (
    treebank.merge_command,
    treebank.analyze_tags_command,
    treebank.profile_command,
    parser.train_command,
    parser.parse_command,
    evaluation.eval_command,
    evaluation.compare_command,
    evaluation.bh_command,
    tagger.tag_train_command,
    tagger.tag_command,
    grid.grid_command,
):
    cli.add_command(command)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit status instead of exiting."""
    try:
        result = cli.main(
            args=list(argv) if argv is not None else None,
            prog_name=settings.app_name,
            standalone_mode=False,
        )
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return EXIT_USAGE
    except DepmergeError as e:
        click.echo(f"Error: {e}", err=True)
        return e.exit_code
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
