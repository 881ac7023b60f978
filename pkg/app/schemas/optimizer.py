"""Pydantic schemas for optimizer data models."""

from typing import Dict, List

from pydantic import BaseModel

from app.utils.transitions import TransitionSystem


class DataProfile(BaseModel):

    """DataProfile class."""

    sentences: int
    tokens: int
    non_projective_rate: float
    label_count: int
    language_proportions: Dict[str, float]
    fine_tagset_size: int
    coarse_tagset_size: int


class TemplateTrial(BaseModel):

    """One forward (+name) or backward (-name) move of the feature search."""

    step: int
    move: str
    dev_las: float
    accepted: bool


class OptimizationReport(BaseModel):

    """OptimizationReport class."""

    profile: DataProfile
    system_las: Dict[str, float] = {}
    chosen_system: TransitionSystem
    baseline_las: float
    trials: List[TemplateTrial] = []
    templates: List[str]
    final_las: float

    @property
    def accepted_las(self) -> List[float]:
        return [self.baseline_las] + [trial.dev_las for trial in self.trials if trial.accepted]
