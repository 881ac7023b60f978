"""Pydantic schemas for tagger data models."""

from enum import Enum
from typing import Dict, List

from pydantic import BaseModel, Field

from config import settings


class TagColumn(str, Enum):

    """Tag column a tagger predicts."""

    CPOSTAG = "cpostag"
    POSTAG = "postag"


class TaggerParams(BaseModel):

    """TaggerParams class."""

    epochs: int = Field(default_factory=lambda: settings.tagger_epochs, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    shuffle: bool = True


class TaggerMetadata(BaseModel):

    """TaggerMetadata class."""

    column: TagColumn
    languages: List[str] = []
    seed: int
    epochs: int
    dev_accuracy: List[float] = []
    selected_epoch: int = 0
    # Most frequent coarse tag of each fine tag; only filled for postag taggers
    coarse_map: Dict[str, str] = {}
    version: str = settings.app_version
