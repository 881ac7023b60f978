"""Utility functions for report formatting operations."""

import logging
from typing import Iterable, Sequence, Set

import pandas as pd

from app.schemas.evaluation import EvalReport, GridResult, GridSummary, SignificanceResult
from app.schemas.optimizer import DataProfile, OptimizationReport
from app.schemas.treebank import SharedTagMatrix

logger = logging.getLogger(__name__)


class ReportFormatter:

    """ReportFormatter class."""

    @staticmethod
    def to_tsv(frame: pd.DataFrame, index: bool = False) -> str:
        """Tab-separated text with a header row and LF line endings."""
        return frame.to_csv(sep="\t", index=index, lineterminator="\n", float_format="%.4f")

    @staticmethod
    def to_text(frame: pd.DataFrame, index: bool = False) -> str:
        """Aligned plain-text table."""
        return frame.to_string(index=index) + "\n"

    @staticmethod
    def shared_tags(matrix: SharedTagMatrix) -> pd.DataFrame:
        frame = pd.DataFrame(matrix.counts, index=matrix.languages, columns=matrix.languages)
        frame.index.name = "lang"
        return frame

    @staticmethod
    def eval_report(report: EvalReport) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "tokens": report.tokens,
                    "heads_correct": report.heads_correct,
                    "labeled_correct": report.labeled_correct,
                    "LAS": round(report.las, 2),
                    "UAS": round(report.uas, 2),
                    "exclude_punct": report.exclude_punct,
                }
            ]
        )

    @staticmethod
    def eval_sentences(report: EvalReport) -> pd.DataFrame:
        frame = pd.DataFrame([sentence.model_dump() for sentence in report.sentences])
        frame.insert(0, "sentence", range(1, len(frame) + 1))
        return frame

    @staticmethod
    def significance(result: SignificanceResult) -> pd.DataFrame:
        row = result.model_dump()
        row["metric"] = result.metric.value
        return pd.DataFrame([row])

    @staticmethod
    def rejections(p_values: Sequence[float], rejected: Set[int]) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "index": range(len(p_values)),
                "p_value": list(p_values),
                "rejected": [i in rejected for i in range(len(p_values))],
            }
        )

    @staticmethod
    def profile(profile: DataProfile) -> pd.DataFrame:
        rows = [
            ("sentences", profile.sentences),
            ("tokens", profile.tokens),
            ("non_projective_rate", round(profile.non_projective_rate, 4)),
            ("labels", profile.label_count),
            ("fine_tags", profile.fine_tagset_size),
            ("coarse_tags", profile.coarse_tagset_size),
        ]
        rows += [
            (f"share[{lang}]", round(share, 4))
            for lang, share in profile.language_proportions.items()
        ]
        return pd.DataFrame(rows, columns=["field", "value"])

    @staticmethod
    def trials(report: OptimizationReport) -> pd.DataFrame:
        columns = ["step", "move", "dev_las", "accepted"]
        return pd.DataFrame([trial.model_dump() for trial in report.trials], columns=columns)

    @staticmethod
    def optimization_log(report: OptimizationReport) -> str:
        """Human-readable account of all three phases."""
        lines = [
            f"phase 1: {report.profile.sentences} sentences, {report.profile.tokens} tokens, "
            f"non-projective rate {report.profile.non_projective_rate:.4f}",
        ]
        for system, las in report.system_las.items():
            lines.append(f"phase 2: {system} dev LAS {las:.2f}")
        lines.append(f"phase 2: chosen system {report.chosen_system.value}")
        lines.append(f"phase 3: baseline dev LAS {report.baseline_las:.2f}")
        for trial in report.trials:
            verdict = "accepted" if trial.accepted else "rejected"
            lines.append(f"phase 3: step {trial.step} {trial.move} dev LAS {trial.dev_las:.2f} {verdict}")
        lines.append(f"final dev LAS {report.final_las:.2f} with {len(report.templates)} templates")
        lines.extend(f"  {name}" for name in report.templates)
        return "\n".join(lines) + "\n"

    @staticmethod
    def grid_cells(result: GridResult) -> pd.DataFrame:
        rows = []
        for cell in result.cells:
            row = cell.model_dump()
            row["las_diff"] = cell.las - cell.mono_las
            row["uas_diff"] = cell.uas - cell.mono_uas
            rows.append(row)
        return pd.DataFrame(rows)

    @staticmethod
    def grid_summaries(summaries: Iterable[GridSummary]) -> pd.DataFrame:
        rows = []
        for summary in summaries:
            row = summary.model_dump()
            row["metric"] = summary.metric.value
            row["not_significantly_worse"] = summary.not_significantly_worse
            rows.append(row)
        return pd.DataFrame(rows)
