"""Monolingual versus bilingual training grid over a directory of treebanks."""

import logging
import multiprocessing
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.core.exceptions import DataError
from app.schemas.evaluation import GridCell, GridResult, Metric
from app.schemas.parser import TrainParams
from app.schemas.treebank import Treebank
from app.services.evaluation import (
    benjamini_hochberg,
    grid_summary,
    randomized_comparator,
    score,
)
from app.services.parser import ParserModel, parse_treebank, train_parser
from app.utils.conll_io import read_treebank_file
from app.utils.treebank_ops import merge_treebanks
from config import settings

logger = logging.getLogger(__name__)

SPLITS = ("train", "dev", "test")

TrainJob = Tuple[str, Treebank, Treebank, TrainParams]


def _train_job(job: TrainJob) -> Tuple[str, str]:
    name, train, dev, params = job
    logger.info(f"Training {name} on {len(train)} sentences")
    return name, train_parser(train, dev, params).dumps()


def parse_pairs(selection: str, languages: Sequence[str]) -> List[Tuple[str, str]]:
    """Pairs named by a comma list such as "en+es,en+fr", or every pair for "all"."""
    if selection.strip() == "all":
        return list(combinations(languages, 2))

    order = {lang: i for i, lang in enumerate(languages)}
    pairs = []
    for item in selection.split(","):
        first, _, second = item.strip().partition("+")
        if first not in order or second not in order or first == second:
            raise DataError(f"invalid language pair {item!r} for languages {list(languages)}")
        pair = tuple(sorted((first, second), key=order.get))
        if pair not in pairs:
            pairs.append(pair)
    return pairs


class GridRunner:

    """Trains one model per language and per language pair, then compares them on each test set.

    Expects ``<directory>/<lang>/{train,dev,test}.conll``.
    """

    def __init__(
        self,
        directory: Union[str, Path],
        params: Optional[TrainParams] = None,
        pairs: str = "all",
        iterations: Optional[int] = None,
        jobs: Optional[int] = None,
        exclude_punct: bool = False,
    ):
        self.directory = Path(directory)
        self.params = params or TrainParams()
        self.pairs_selection = pairs
        self.iterations = iterations or settings.significance_iterations
        self.jobs = jobs or settings.grid_jobs
        self.exclude_punct = exclude_punct
        self.treebanks: Dict[str, Dict[str, Treebank]] = {}

    def load(self) -> List[str]:
        """Read every language directory holding all three splits."""
        if not self.directory.is_dir():
            raise DataError(f"treebank directory {self.directory} does not exist")
        for path in sorted(self.directory.iterdir()):
            files = {split: path / f"{split}.conll" for split in SPLITS}
            if not path.is_dir() or not all(f.is_file() for f in files.values()):
                continue
            self.treebanks[path.name] = {
                split: read_treebank_file(f, lang=path.name) for split, f in files.items()
            }
        if len(self.treebanks) < 2:
            raise DataError(
                f"grid needs at least two languages under {self.directory}, found {len(self.treebanks)}"
            )
        logger.info(f"Loaded treebanks for {', '.join(self.treebanks)}")
        return list(self.treebanks)

    def source_files(self) -> List[Path]:
        return [
            self.directory / lang / f"{split}.conll"
            for lang in self.treebanks
            for split in SPLITS
        ]

    def _jobs(self, pairs: Sequence[Tuple[str, str]]) -> List[TrainJob]:
        jobs = []
        for lang, splits in self.treebanks.items():
            jobs.append((lang, splits["train"], splits["dev"], self.params))
        for first, second in pairs:
            parts = [self.treebanks[first], self.treebanks[second]]
            train = merge_treebanks([(first, parts[0]["train"]), (second, parts[1]["train"])])
            dev = merge_treebanks([(first, parts[0]["dev"]), (second, parts[1]["dev"])])
            jobs.append((f"{first}+{second}", train, dev, self.params))
        return jobs

    def train_all(self, pairs: Sequence[Tuple[str, str]]) -> Dict[str, ParserModel]:
        jobs = self._jobs(pairs)
        if self.jobs == 1:
            results = [_train_job(job) for job in jobs]
        else:
            with multiprocessing.Pool(processes=self.jobs) as pool:
                results = list(pool.imap_unordered(_train_job, jobs))
        return {name: ParserModel.loads(text) for name, text in results}

    def run(self) -> GridResult:
        languages = self.load() if not self.treebanks else list(self.treebanks)
        pairs = parse_pairs(self.pairs_selection, languages)
        models = self.train_all(pairs)

        seed = self.params.seed
        cells: List[GridCell] = []
        for lang in languages:
            test = self.treebanks[lang]["test"]
            mono = score(test, parse_treebank(models[lang], test), self.exclude_punct)
            cells.append(
                GridCell(
                    eval_lang=lang,
                    partner=lang,
                    mono_las=mono.las,
                    mono_uas=mono.uas,
                    las=mono.las,
                    uas=mono.uas,
                )
            )
            for first, second in pairs:
                if lang not in (first, second):
                    continue
                partner = second if lang == first else first
                bilingual = score(
                    test, parse_treebank(models[f"{first}+{second}"], test), self.exclude_punct
                )
                las = randomized_comparator(bilingual, mono, Metric.LAS, self.iterations, seed)
                uas = randomized_comparator(bilingual, mono, Metric.UAS, self.iterations, seed)
                cells.append(
                    GridCell(
                        eval_lang=lang,
                        partner=partner,
                        mono_las=mono.las,
                        mono_uas=mono.uas,
                        las=bilingual.las,
                        uas=bilingual.uas,
                        p_las=las.p_value,
                        p_uas=uas.p_value,
                    )
                )
                logger.info(
                    f"{lang} with {partner}: LAS {mono.las:.2f} -> {bilingual.las:.2f} "
                    f"(p={las.p_value:.4f})"
                )

        cells = self._correct(cells)
        summaries = [
            grid_summary(cells, metric, correction)
            for metric in Metric
            for correction in ("raw", "fdr")
        ]
        return GridResult(languages=languages, cells=cells, summaries=summaries)

    def _correct(self, cells: List[GridCell]) -> List[GridCell]:
        """Flag the off-diagonal cells Benjamini-Hochberg rejects, per metric."""
        positions = [i for i, cell in enumerate(cells) if not cell.diagonal]
        updates: Dict[int, Dict[str, bool]] = {i: {} for i in positions}
        for metric, field in ((Metric.LAS, "fdr_las"), (Metric.UAS, "fdr_uas")):
            p_values = [cells[i].p_value(metric) for i in positions]
            rejected = benjamini_hochberg(p_values) if p_values else set()
            for k, i in enumerate(positions):
                updates[i][field] = k in rejected
        return [
            cell.model_copy(update=updates[i]) if i in updates else cell
            for i, cell in enumerate(cells)
        ]
