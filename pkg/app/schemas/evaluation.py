"""Pydantic schemas for evaluation data models."""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, model_validator


class Metric(str, Enum):

    """Attachment score metrics."""

    LAS = "LAS"
    UAS = "UAS"


class SentenceScore(BaseModel):

    """Per-sentence attachment counts."""

    heads_correct: int
    labeled_correct: int
    tokens: int


class EvalReport(BaseModel):

    """Corpus-level and per-sentence attachment scores."""

    tokens: int
    heads_correct: int
    labeled_correct: int
    las: float
    uas: float
    sentences: List[SentenceScore]
    exclude_punct: bool = False
    gold_digest: str = ""

    @model_validator(mode="after")
    def _check_counts(self) -> "EvalReport":
        if self.labeled_correct > self.heads_correct:
            raise ValueError("labeled attachments cannot exceed head attachments")
        if self.tokens != sum(sentence.tokens for sentence in self.sentences):
            raise ValueError("corpus token count differs from per-sentence sum")
        if self.heads_correct != sum(s.heads_correct for s in self.sentences):
            raise ValueError("corpus head count differs from per-sentence sum")
        if self.labeled_correct != sum(s.labeled_correct for s in self.sentences):
            raise ValueError("corpus labeled count differs from per-sentence sum")
        return self

    def value(self, metric: Metric) -> float:
        return self.las if metric == Metric.LAS else self.uas

    def correct_counts(self, metric: Metric) -> List[int]:
        if metric == Metric.LAS:
            return [sentence.labeled_correct for sentence in self.sentences]
        return [sentence.heads_correct for sentence in self.sentences]


class SignificanceResult(BaseModel):

    """Outcome of a randomized paired comparison."""

    metric: Metric
    score_a: float
    score_b: float
    observed: float  # absolute difference in metric points
    p_value: float
    iterations: int
    seed: Optional[int] = None  # None under exact enumeration
    exact: bool = False


class GridCell(BaseModel):

    """One (evaluation language, partner language) comparison."""

    eval_lang: str
    partner: str
    mono_las: float
    mono_uas: float
    las: float
    uas: float
    p_las: Optional[float] = None
    p_uas: Optional[float] = None
    fdr_las: bool = False  # rejected by Benjamini-Hochberg
    fdr_uas: bool = False

    @property
    def diagonal(self) -> bool:
        return self.eval_lang == self.partner

    def diff(self, metric: Metric) -> float:
        if metric == Metric.LAS:
            return self.las - self.mono_las
        return self.uas - self.mono_uas

    def p_value(self, metric: Metric) -> Optional[float]:
        return self.p_las if metric == Metric.LAS else self.p_uas

    def fdr_rejected(self, metric: Metric) -> bool:
        return self.fdr_las if metric == Metric.LAS else self.fdr_uas


class GridSummary(BaseModel):

    """Annotation counts over the off-diagonal cells of one metric."""

    metric: Metric
    correction: str  # "raw" or "fdr"
    cells: int
    significant_gains: int
    gains: int
    losses: int
    significant_losses: int

    @property
    def not_significantly_worse(self) -> int:
        return self.cells - self.significant_losses


class GridResult(BaseModel):

    """Every cell and summary of a monolingual/bilingual grid run."""

    languages: List[str]
    cells: List[GridCell]
    summaries: List[GridSummary] = []
