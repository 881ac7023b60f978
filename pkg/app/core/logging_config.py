"""Logging setup from the YAML dictConfig file."""

import logging
import logging.config
from pathlib import Path
from typing import Optional

import yaml

from config import settings


def configure_logging(path: Optional[str] = None, verbose: bool = False) -> None:
    """Load log_conf.yaml, or fall back to a basic stderr configuration."""
    config_path = Path(path or settings.log_config)
    if config_path.is_file():
        with config_path.open(encoding="utf-8") as handle:
            logging.config.dictConfig(yaml.safe_load(handle))
    else:
        logging.basicConfig(
            level=logging.INFO,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        )

    if verbose:
        logging.getLogger("app").setLevel(logging.DEBUG)
