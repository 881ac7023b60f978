"""Pydantic schemas for parser training data models."""

from typing import List, Optional

from pydantic import BaseModel, Field

from app.schemas.features import FeatureTemplate
from app.schemas.treebank import TagConfig
from app.utils.transitions import TransitionSystem
from config import settings


class TrainParams(BaseModel):

    """TrainParams class."""

    epochs: int = Field(default_factory=lambda: settings.default_epochs, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    system: TransitionSystem = TransitionSystem.ARC_EAGER
    # None selects default_templates(system)
    templates: Optional[List[FeatureTemplate]] = None
    tag_config: TagConfig = TagConfig()
    shuffle: bool = True


class ParserMetadata(BaseModel):

    """Everything besides the weights needed to rebuild a parser."""

    system: TransitionSystem
    tag_config: TagConfig
    templates: List[str]
    labels: List[str]
    root_labels: List[str] = []
    dependent_labels: List[str] = []
    # most frequent non-root label, given to re-attached extra roots
    fallback_label: Optional[str] = None
    languages: List[str] = []
    seed: int
    epochs: int
    shuffle: bool = True
    dev_las: List[float] = []
    selected_epoch: int = 0
    version: str = settings.app_version

    @property
    def selected_las(self) -> float:
        if not self.dev_las or self.selected_epoch < 1:
            return 0.0
        return self.dev_las[self.selected_epoch - 1]
