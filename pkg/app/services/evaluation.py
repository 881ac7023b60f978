"""Attachment scoring, randomized significance testing and FDR correction."""

import hashlib
import logging
from typing import List, Optional, Sequence, Set

import numpy as np
import pandas as pd

from app.core.exceptions import AlignmentError, DataError
from app.schemas.evaluation import (
    EvalReport,
    GridCell,
    GridSummary,
    Metric,
    SentenceScore,
    SignificanceResult,
)
from app.schemas.treebank import Treebank
from config import settings

logger = logging.getLogger(__name__)

# Shuffles drawn per numpy batch when sampling
SAMPLE_BATCH = 1000


def gold_digest(gold: Treebank) -> str:
    """sha256 over forms, heads and labels of the gold treebank."""
    digest = hashlib.sha256()
    for sentence in gold.sentences:
        for token in sentence.tokens:
            digest.update(f"{token.form}\t{token.head}\t{token.deprel}\n".encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def _percent(correct: int, total: int) -> float:
    return 100.0 * correct / total if total else 0.0


def score(gold: Treebank, predicted: Treebank, exclude_punct: bool = False) -> EvalReport:
    """LAS/UAS of predicted against gold; punctuation is judged on the gold cpostag."""
    if len(gold) != len(predicted):
        raise AlignmentError(
            f"gold has {len(gold)} sentences, prediction has {len(predicted)}"
        )

    punctuation = set(settings.punctuation_tags)
    sentences = []
    for index, (gold_sentence, pred_sentence) in enumerate(
        zip(gold.sentences, predicted.sentences), start=1
    ):
        if len(gold_sentence) != len(pred_sentence):
            raise AlignmentError(
                f"sentence {index}: gold has {len(gold_sentence)} tokens, "
                f"prediction has {len(pred_sentence)}"
            )
        heads_correct = labeled_correct = tokens = 0
        for gold_token, pred_token in zip(gold_sentence.tokens, pred_sentence.tokens):
            if exclude_punct and gold_token.cpostag in punctuation:
                continue
            tokens += 1
            if gold_token.head == pred_token.head:
                heads_correct += 1
                if gold_token.deprel == pred_token.deprel:
                    labeled_correct += 1
        sentences.append(
            SentenceScore(
                heads_correct=heads_correct,
                labeled_correct=labeled_correct,
                tokens=tokens,
            )
        )

    tokens = sum(sentence.tokens for sentence in sentences)
    heads_correct = sum(sentence.heads_correct for sentence in sentences)
    labeled_correct = sum(sentence.labeled_correct for sentence in sentences)
    return EvalReport(
        tokens=tokens,
        heads_correct=heads_correct,
        labeled_correct=labeled_correct,
        las=_percent(labeled_correct, tokens),
        uas=_percent(heads_correct, tokens),
        sentences=sentences,
        exclude_punct=exclude_punct,
        gold_digest=gold_digest(gold),
    )


def _check_comparable(a: EvalReport, b: EvalReport) -> None:
    if a.gold_digest and b.gold_digest and a.gold_digest != b.gold_digest:
        raise AlignmentError("reports were scored against different gold treebanks")
    if a.exclude_punct != b.exclude_punct:
        raise AlignmentError("reports use different punctuation policies")
    if [s.tokens for s in a.sentences] != [s.tokens for s in b.sentences]:
        raise AlignmentError("reports have different per-sentence token counts")


def randomized_comparator(
    a: EvalReport,
    b: EvalReport,
    metric: Metric = Metric.LAS,
    iterations: Optional[int] = None,
    seed: Optional[int] = None,
) -> SignificanceResult:
    """Two-sided paired test swapping whole-sentence outputs between a and b.

    Up to ``exact_enumeration_limit`` sentences every swap assignment is
    enumerated; otherwise ``iterations`` assignments are sampled.
    """
    _check_comparable(a, b)
    iterations = settings.significance_iterations if iterations is None else iterations
    seed = settings.default_seed if seed is None else seed
    if iterations < 1:
        raise DataError(f"iterations must be >= 1, got {iterations}")

    diffs = np.array(a.correct_counts(metric), dtype=np.int64) - np.array(
        b.correct_counts(metric), dtype=np.int64
    )
    total = int(diffs.sum())
    observed = abs(total)
    n = len(diffs)

    result = dict(
        metric=metric,
        score_a=a.value(metric),
        score_b=b.value(metric),
        observed=abs(a.value(metric) - b.value(metric)),
    )

    if n <= settings.exact_enumeration_limit:
        masks = (np.arange(2 ** n, dtype=np.int64)[:, None] >> np.arange(n)) & 1
        shuffled = np.abs(total - 2 * (masks @ diffs))
        reaching = int(np.count_nonzero(shuffled >= observed))
        logger.debug(f"Exact enumeration over {2 ** n} assignments, {reaching} reach {observed}")
        return SignificanceResult(
            **result,
            p_value=reaching / 2 ** n,
            iterations=2 ** n - 1,
            exact=True,
        )

    rng = np.random.default_rng(seed)
    exceed = 0
    remaining = iterations
    while remaining:
        size = min(remaining, SAMPLE_BATCH)
        swaps = rng.integers(0, 2, size=(size, n), dtype=np.int64)
        shuffled = np.abs(total - 2 * (swaps @ diffs))
        exceed += int(np.count_nonzero(shuffled >= observed))
        remaining -= size

    return SignificanceResult(
        **result,
        p_value=(exceed + 1) / (iterations + 1),
        iterations=iterations,
        seed=seed,
        exact=False,
    )


def benjamini_hochberg(p_values: Sequence[float], q: Optional[float] = None) -> Set[int]:
    """Indices rejected by the step-up procedure at false discovery rate q."""
    q = settings.fdr_q if q is None else q
    if not 0.0 < q < 1.0:
        raise DataError(f"false discovery rate must be in (0, 1), got {q}")
    values = np.asarray(p_values, dtype=np.float64)
    if values.size == 0:
        return set()
    if np.any(~np.isfinite(values)) or np.any(values <= 0.0) or np.any(values > 1.0):
        raise DataError("p-values must lie in (0, 1]")

    m = values.size
    order = np.argsort(values, kind="stable")
    thresholds = q * np.arange(1, m + 1) / m
    below = np.flatnonzero(values[order] <= thresholds)
    if below.size == 0:
        return set()
    return {int(index) for index in order[: below[-1] + 1]}


def annotate(diff: float, significant: bool) -> str:
    """Cell mark: doubled sign when significant; a zero difference counts as a gain."""
    if diff >= 0:
        return "++" if significant else "+"
    return "--" if significant else "-"


def _significant(cell: GridCell, metric: Metric, correction: str, alpha: float) -> bool:
    if correction == "fdr":
        return cell.fdr_rejected(metric)
    p_value = cell.p_value(metric)
    return p_value is not None and p_value < alpha


def grid_report(
    cells: Sequence[GridCell],
    languages: Sequence[str],
    metric: Metric = Metric.LAS,
    correction: str = "raw",
    alpha: Optional[float] = None,
) -> pd.DataFrame:
    """Rows are evaluation languages, columns partner languages, the diagonal the monolingual score."""
    alpha = settings.significance_alpha if alpha is None else alpha
    frame = pd.DataFrame("", index=list(languages), columns=list(languages))
    frame.index.name = "eval"
    for cell in cells:
        if cell.diagonal:
            value = cell.mono_las if metric == Metric.LAS else cell.mono_uas
            frame.loc[cell.eval_lang, cell.partner] = f"{value:.2f}"
            continue
        value = cell.las if metric == Metric.LAS else cell.uas
        mark = annotate(cell.diff(metric), _significant(cell, metric, correction, alpha))
        frame.loc[cell.eval_lang, cell.partner] = f"{value:.2f} {mark}"
    return frame


def grid_summary(
    cells: Sequence[GridCell],
    metric: Metric,
    correction: str = "raw",
    alpha: Optional[float] = None,
) -> GridSummary:
    """Counts of each annotation over the off-diagonal cells."""
    alpha = settings.significance_alpha if alpha is None else alpha
    marks: List[str] = [
        annotate(cell.diff(metric), _significant(cell, metric, correction, alpha))
        for cell in cells
        if not cell.diagonal
    ]
    return GridSummary(
        metric=metric,
        correction=correction,
        cells=len(marks),
        significant_gains=marks.count("++"),
        gains=marks.count("+"),
        losses=marks.count("-"),
        significant_losses=marks.count("--"),
    )
