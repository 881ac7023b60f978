"""Three-phase optimization: data analysis, algorithm selection, feature search."""

import logging
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

from app.core.exceptions import EmptyInputError
from app.schemas.features import FeatureTemplate
from app.schemas.optimizer import DataProfile, OptimizationReport, TemplateTrial
from app.schemas.parser import TrainParams
from app.schemas.treebank import Treebank
from app.services.parser import ParserModel, train_parser
from app.utils.features import candidate_pool, default_templates
from app.utils.transitions import TransitionSystem
from app.utils.treebank_ops import is_projective
from config import settings

logger = logging.getLogger(__name__)

UNDETERMINED_LANGUAGE = "und"


def phase1_analyze(train: Treebank) -> DataProfile:
    """Profile the training data."""
    if not len(train):
        raise EmptyInputError("cannot profile an empty treebank")

    non_projective = sum(1 for sentence in train.sentences if not is_projective(sentence))
    languages = Counter(sentence.lang or UNDETERMINED_LANGUAGE for sentence in train.sentences)
    tokens = [token for sentence in train.sentences for token in sentence.tokens]
    return DataProfile(
        sentences=len(train),
        tokens=len(tokens),
        non_projective_rate=non_projective / len(train),
        label_count=len({token.deprel for token in tokens}),
        language_proportions={
            lang: count / len(train) for lang, count in sorted(languages.items())
        },
        fine_tagset_size=len({token.postag for token in tokens}),
        coarse_tagset_size=len({token.cpostag for token in tokens}),
    )


class FeatureOptimizer:

    """Runs the selection phases against one train/dev split.

    Trained models are cached per (system, template names).
    """

    def __init__(self, train: Treebank, dev: Treebank, params: Optional[TrainParams] = None):
        self.train = train
        self.dev = dev
        self.params = params or TrainParams()
        self.threshold = settings.improvement_threshold
        self.models: Dict[Tuple[str, Tuple[str, ...]], ParserModel] = {}

    def _train(self, system: TransitionSystem, templates: Sequence[FeatureTemplate]) -> ParserModel:
        key = (system.value, tuple(template.name for template in templates))
        if key not in self.models:
            params = self.params.model_copy(
                update={"system": system, "templates": list(templates)}
            )
            self.models[key] = train_parser(self.train, self.dev, params)
        return self.models[key]

    def _dev_las(self, system: TransitionSystem, templates: Sequence[FeatureTemplate]) -> float:
        return self._train(system, templates).metadata.selected_las

    def _improves(self, candidate: float, best: float) -> bool:
        return round(candidate - best, 6) >= self.threshold

    def phase2_select_algorithm(self) -> Tuple[TransitionSystem, Dict[str, float]]:
        """Default-template dev LAS per system; arc-eager wins ties."""
        scores = {}
        for system in (TransitionSystem.ARC_EAGER, TransitionSystem.ARC_STANDARD):
            scores[system.value] = self._dev_las(system, default_templates(system))
            logger.info(f"Phase 2: {system.value} dev LAS {scores[system.value]:.2f}")

        chosen = TransitionSystem.ARC_EAGER
        if scores[TransitionSystem.ARC_STANDARD.value] > scores[TransitionSystem.ARC_EAGER.value]:
            chosen = TransitionSystem.ARC_STANDARD
        return chosen, scores

    def phase3_feature_search(
        self,
        system: TransitionSystem,
        pool: Optional[Sequence[FeatureTemplate]] = None,
    ) -> Tuple[List[FeatureTemplate], float, List[TemplateTrial]]:
        """Greedy forward additions then backward removals, in canonical name order."""
        pool = list(pool) if pool is not None else candidate_pool(system)
        current = list(self.params.templates or default_templates(system))
        start_names = {template.name for template in current}
        best = self._dev_las(system, current)
        baseline = best
        trials: List[TemplateTrial] = []

        extras = sorted(
            (template for template in pool if template.name not in start_names),
            key=lambda template: template.name,
        )
        if not extras:
            logger.info("Phase 3: pool offers no templates beyond the current set")
            return current, best, trials

        for template in extras:
            candidate = current + [template]
            las = self._dev_las(system, candidate)
            accepted = self._improves(las, best)
            trials.append(
                TemplateTrial(step=len(trials) + 1, move=f"+{template.name}", dev_las=las, accepted=accepted)
            )
            if accepted:
                current, best = candidate, las
            logger.info(f"Phase 3: +{template.name} dev LAS {las:.2f} {'accepted' if accepted else 'rejected'}")

        for name in sorted(template.name for template in current):
            if len(current) == 1:
                break
            candidate = [template for template in current if template.name != name]
            las = self._dev_las(system, candidate)
            accepted = self._improves(las, best)
            trials.append(
                TemplateTrial(step=len(trials) + 1, move=f"-{name}", dev_las=las, accepted=accepted)
            )
            if accepted:
                current, best = candidate, las
            logger.info(f"Phase 3: -{name} dev LAS {las:.2f} {'accepted' if accepted else 'rejected'}")

        logger.info(f"Phase 3: dev LAS {baseline:.2f} -> {best:.2f} with {len(current)} templates")
        return current, best, trials

    def optimize(
        self,
        system: Optional[TransitionSystem] = None,
        pool: Optional[Sequence[FeatureTemplate]] = None,
    ) -> Tuple[ParserModel, OptimizationReport]:
        """All three phases; a given system skips phase 2 and fixes the algorithm."""
        profile = phase1_analyze(self.train)
        logger.info(
            f"Phase 1: {profile.sentences} sentences, "
            f"non-projective rate {profile.non_projective_rate:.3f}"
        )

        system_las: Dict[str, float] = {}
        if system is None:
            system, system_las = self.phase2_select_algorithm()
        baseline = self._dev_las(system, self.params.templates or default_templates(system))

        templates, final_las, trials = self.phase3_feature_search(system, pool)
        report = OptimizationReport(
            profile=profile,
            system_las=system_las,
            chosen_system=system,
            baseline_las=baseline,
            trials=trials,
            templates=[template.name for template in templates],
            final_las=final_las,
        )
        return self._train(system, templates), report


def phase2_select_algorithm(
    train: Treebank, dev: Treebank, params: Optional[TrainParams] = None
) -> Tuple[TransitionSystem, Dict[str, float]]:
    return FeatureOptimizer(train, dev, params).phase2_select_algorithm()


def phase3_feature_search(
    train: Treebank,
    dev: Treebank,
    system: TransitionSystem,
    pool: Optional[Sequence[FeatureTemplate]] = None,
    params: Optional[TrainParams] = None,
) -> Tuple[List[FeatureTemplate], OptimizationReport]:
    """Feature search with the algorithm fixed."""
    _, report = FeatureOptimizer(train, dev, params).optimize(system, pool)
    return [FeatureTemplate.parse(name) for name in report.templates], report
