"""Oracle-driven parser training with dev-set model selection, and greedy decoding."""

import json
import logging
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import (
    DataError,
    EmptyInputError,
    ModelFormatError,
    ParseError,
)
from app.schemas.features import FeatureTemplate
from app.schemas.parser import ParserMetadata, TrainParams
from app.schemas.treebank import Sentence, TagConfig, Treebank
from app.services.evaluation import score
from app.services.learner import LinearModel, load_model, save_model
from app.utils.conll_io import attach_extra_roots
from app.utils.features import default_templates, extract
from app.utils.transitions import (
    Configuration,
    Transition,
    TransitionKind,
    TransitionSystem,
    apply,
    extract_tree,
    initial_config,
    is_legal,
    is_terminal,
    static_oracle,
    transition_inventory,
)
from app.utils.treebank_ops import (
    apply_tag_config,
    apply_tag_config_to_sentence,
    projectivize,
)

logger = logging.getLogger(__name__)

MODEL_KIND = "parser"


class ParserModel:

    """Finalized linear model plus the settings it was trained under."""

    def __init__(self, linear: LinearModel, metadata: ParserMetadata):
        self.linear = linear
        self.metadata = metadata
        self.templates = [FeatureTemplate.parse(name) for name in metadata.templates]
        self.transitions = [Transition.from_signature(name) for name in linear.classes]
        index = {transition: i for i, transition in enumerate(self.transitions)}

        root_labels = set(metadata.root_labels) or set(metadata.labels)
        dependent_labels = set(metadata.dependent_labels) or set(metadata.labels)
        # Arcs headed by the artificial root only carry labels seen on root arcs
        self._by_kind: Dict[Tuple[TransitionKind, bool], List[int]] = {}
        for kind in TransitionKind:
            for from_root in (False, True):
                if kind in (TransitionKind.SHIFT, TransitionKind.REDUCE):
                    allowed = [index[t] for t in self.transitions if t.kind == kind]
                else:
                    labels = root_labels if from_root else dependent_labels
                    allowed = [
                        index[t]
                        for t in self.transitions
                        if t.kind == kind and t.label in labels
                    ]
                self._by_kind[(kind, from_root)] = allowed
        self.index = index

    @property
    def system(self) -> TransitionSystem:
        return self.metadata.system

    @property
    def tag_config(self) -> TagConfig:
        return self.metadata.tag_config

    @property
    def labels(self) -> List[str]:
        return self.metadata.labels

    def legal_indices(self, config: Configuration) -> List[int]:
        """Class indices of the legal transitions, in canonical order."""
        system = self.system
        stack = config.stack
        if system == TransitionSystem.ARC_EAGER:
            arc_head = stack[-1] if stack else None
        else:
            arc_head = stack[-2] if len(stack) >= 2 else None

        legal = []
        for kind in TransitionKind:
            sample = Transition(kind, None if kind in (TransitionKind.SHIFT, TransitionKind.REDUCE) else "_")
            if not is_legal(config, sample, system):
                continue
            from_root = kind == TransitionKind.RIGHT_ARC and arc_head == 0
            legal.extend(self._by_kind[(kind, from_root)])
        return sorted(legal)

    def decode(self, sentence: Sentence, grow: bool = False) -> Configuration:
        """Greedy argmax decoding of an already tag-configured sentence."""
        config = initial_config(sentence)
        while not is_terminal(config, self.system):
            legal = self.legal_indices(config)
            if not legal:
                break
            features = extract(config, sentence, self.templates, self.linear.interner, grow=grow)
            choice = self.linear.best(features, legal)
            config = apply(config, self.transitions[choice], self.system)
        return config

    def dumps(self) -> str:
        metadata = {
            "kind": MODEL_KIND,
            "system": self.system.value,
            "tag_config": self.tag_config.name,
            "templates": ",".join(self.metadata.templates),
            "metadata": self.metadata.model_dump_json(),
        }
        return save_model(self.linear, metadata)

    @classmethod
    def loads(cls, text: str) -> "ParserModel":
        linear, header = load_model(text)
        if header.get("kind") != MODEL_KIND:
            raise ModelFormatError(f"expected a {MODEL_KIND} model, found {header.get('kind')!r}")
        try:
            metadata = ParserMetadata.model_validate(json.loads(header["metadata"]))
        except (KeyError, ValueError) as e:
            raise ModelFormatError(f"unreadable parser metadata: {e}")
        return cls(linear, metadata)


def _training_labels(sentences: Sequence[Sentence]) -> Tuple[List[str], List[str]]:
    """Labels seen on arcs from the artificial root and on all other arcs."""
    root_labels = set()
    dependent_labels = set()
    for sentence in sentences:
        for token in sentence.tokens:
            (root_labels if token.head == 0 else dependent_labels).add(token.deprel)
    return sorted(root_labels), sorted(dependent_labels)


def _most_frequent_dependent_label(sentences: Sequence[Sentence]) -> Optional[str]:
    counts = Counter(
        token.deprel for sentence in sentences for token in sentence.tokens if token.head != 0
    )
    if not counts:
        return None
    return min(counts, key=lambda label: (-counts[label], label))


def _parse_prepared(model: ParserModel, sentence: Sentence) -> Sentence:
    config = model.decode(sentence)
    heads, labels = extract_tree(config, len(sentence))
    repaired = attach_extra_roots(heads)
    fallback = model.metadata.fallback_label or next(iter(model.metadata.dependent_labels), None)
    if fallback is not None:
        # re-attached roots leave the root label behind
        labels = [
            fallback if head != original else label
            for head, original, label in zip(repaired, heads, labels)
        ]
    return sentence.with_tree(repaired, labels)


def _dev_las(model: ParserModel, dev: Treebank) -> float:
    predicted = Treebank(
        sentences=tuple(_parse_prepared(model, sentence) for sentence in dev.sentences)
    )
    return score(dev, predicted).las


def train_parser(train: Treebank, dev: Treebank, params: Optional[TrainParams] = None) -> ParserModel:
    """Averaged-perceptron training; returns the epoch snapshot with the best dev LAS."""
    params = params or TrainParams()
    if not len(train) or not train.token_count:
        raise EmptyInputError("training treebank is empty")
    if not len(dev) or not dev.token_count:
        raise EmptyInputError("development treebank is empty")

    system = params.system
    templates = params.templates or default_templates(system)
    train = apply_tag_config(train, params.tag_config)
    dev = apply_tag_config(dev, params.tag_config)

    sentences = []
    lifted = 0
    for sentence in train.sentences:
        projective = projectivize(sentence)
        lifted += projective is not sentence
        sentences.append(projective)
    if lifted:
        logger.warning(f"Projectivized {lifted} of {len(sentences)} training sentences")

    root_labels, dependent_labels = _training_labels(sentences)
    labels = sorted(set(root_labels) | set(dependent_labels))
    classes = [t.signature for t in transition_inventory(system, labels)]
    metadata = ParserMetadata(
        system=system,
        tag_config=params.tag_config,
        templates=[template.name for template in templates],
        labels=labels,
        root_labels=root_labels,
        dependent_labels=dependent_labels,
        fallback_label=_most_frequent_dependent_label(sentences),
        languages=train.languages,
        seed=params.seed,
        epochs=params.epochs,
        shuffle=params.shuffle,
    )
    linear = LinearModel(classes)
    trainer = ParserModel(linear, metadata)
    oracles = [static_oracle(sentence, system) for sentence in sentences]

    rng = np.random.default_rng(params.seed)
    best: Optional[LinearModel] = None
    best_las = -1.0
    dev_las = []
    for epoch in range(1, params.epochs + 1):
        order = rng.permutation(len(sentences)) if params.shuffle else range(len(sentences))
        mistakes = steps = 0
        for position in order:
            sentence = sentences[int(position)]
            config = initial_config(sentence)
            for gold in oracles[int(position)]:
                features = extract(config, sentence, trainer.templates, linear.interner)
                gold_index = trainer.index[gold]
                predicted = linear.best(features, trainer.legal_indices(config))
                if predicted != gold_index:
                    linear.update(features, gold_index, predicted)
                    mistakes += 1
                linear.tick()
                steps += 1
                config = apply(config, gold, system)

        snapshot = linear.averaged()
        las = _dev_las(ParserModel(snapshot, metadata), dev)
        dev_las.append(las)
        logger.info(
            f"Epoch {epoch}/{params.epochs}: {mistakes}/{steps} training mistakes, dev LAS {las:.2f}"
        )
        if las > best_las:
            best, best_las = snapshot, las
            metadata = metadata.model_copy(update={"selected_epoch": epoch})

    metadata = metadata.model_copy(update={"dev_las": dev_las})
    logger.info(f"Selected epoch {metadata.selected_epoch} with dev LAS {best_las:.2f}")
    return ParserModel(best, metadata)


def parse(model: ParserModel, sentence: Sentence) -> Sentence:
    """Greedy parse; the input's tag columns are kept, heads and labels replaced."""
    if not len(sentence):
        raise EmptyInputError("cannot parse an empty sentence")
    prepared = apply_tag_config_to_sentence(sentence, model.tag_config)
    parsed = _parse_prepared(model, prepared)
    return sentence.with_tree(parsed.heads, parsed.labels)


def parse_treebank(model: ParserModel, treebank: Treebank) -> Treebank:
    """Parse every sentence in order; failures carry the 1-based sentence index."""
    sentences = []
    for index, sentence in enumerate(treebank.sentences, start=1):
        try:
            sentences.append(parse(model, sentence))
        except DataError as e:
            logger.error(f"Failed to parse sentence {index}: {e}")
            raise ParseError(str(e), index) from e
    return treebank.model_copy(update={"sentences": tuple(sentences)})
