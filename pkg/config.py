"""Configuration settings for the depmerge toolkit."""

import os
from typing import Tuple

from dotenv import load_dotenv
from pydantic_settings import BaseSettings

load_dotenv()


class Settings(BaseSettings):
    """Toolkit settings configuration."""

    # Application
    app_name: str = os.getenv("APP_NAME", "depmerge")
    app_version: str = os.getenv("APP_VERSION", "1.0.0")
    log_config: str = os.getenv("DEPMERGE_LOG_CONFIG", "log_conf.yaml")

    # Training
    default_seed: int = int(os.getenv("DEPMERGE_SEED", "1"))
    default_epochs: int = int(os.getenv("DEPMERGE_EPOCHS", "15"))
    tagger_epochs: int = int(os.getenv("DEPMERGE_TAGGER_EPOCHS", "10"))
    weight_precision: int = 6  # decimals kept in averaged weights

    # Optimizer
    improvement_threshold: float = 0.05  # LAS points

    # Evaluation
    punctuation_tags: Tuple[str, ...] = (".", "PUNCT")
    significance_iterations: int = int(os.getenv("DEPMERGE_ITERATIONS", "10000"))
    exact_enumeration_limit: int = 12  # sentences
    significance_alpha: float = 0.05
    fdr_q: float = float(os.getenv("DEPMERGE_FDR_Q", "0.20"))

    # Grid driver
    grid_jobs: int = int(os.getenv("DEPMERGE_JOBS", "1"))

    class Config:
        """Pydantic configuration."""

        env_file = ".env"
        extra = "allow"  # Allow extra fields


settings = Settings()
