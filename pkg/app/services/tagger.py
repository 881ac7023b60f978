"""Greedy left-to-right averaged-perceptron part-of-speech tagger."""

import json
import logging
from collections import Counter, defaultdict
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.core.exceptions import AlignmentError, EmptyInputError, ModelFormatError
from app.schemas.tagger import TagColumn, TaggerMetadata, TaggerParams
from app.schemas.treebank import Sentence, Treebank
from app.services.learner import LinearModel, load_model, save_model
from app.utils.features import FeatureInterner, FeatureVector

logger = logging.getLogger(__name__)

MODEL_KIND = "tagger"
START = "<S>"
END = "</S>"


def tagger_features(forms: Sequence[str], index: int, prev: str, prev2: str) -> List[str]:
    """Feature strings for the token at index given the two previous tags."""
    form = forms[index]
    features = [
        "bias",
        f"w={form}",
        f"lw={form.lower()}",
        f"t-1={prev}",
        f"t-2={prev2}",
        f"w-1={forms[index - 1] if index > 0 else START}",
        f"w+1={forms[index + 1] if index + 1 < len(forms) else END}",
    ]
    for length in range(1, 4):
        if len(form) >= length:
            features.append(f"p{length}={form[:length]}")
            features.append(f"s{length}={form[-length:]}")
    if any(char.isdigit() for char in form):
        features.append("digit")
    if "-" in form:
        features.append("hyphen")
    return features


def _vector(strings: Sequence[str], interner: FeatureInterner, grow: bool) -> FeatureVector:
    ids = set()
    for string in strings:
        feature_id = interner.intern(string) if grow else interner.get(string)
        if feature_id is not None:
            ids.add(feature_id)
    return tuple(sorted(ids))


def _gold_tags(sentence: Sentence, column: TagColumn) -> List[str]:
    return [getattr(token, column.value) for token in sentence.tokens]


class TaggerModel:

    """TaggerModel class."""

    def __init__(self, linear: LinearModel, metadata: TaggerMetadata):
        self.linear = linear
        self.metadata = metadata
        self._all = list(range(len(linear.classes)))

    @property
    def column(self) -> TagColumn:
        return self.metadata.column

    @property
    def classes(self) -> List[str]:
        return self.linear.classes

    def predict(self, forms: Sequence[str], grow: bool = False) -> List[str]:
        tags: List[str] = []
        for index in range(len(forms)):
            prev = tags[-1] if tags else START
            prev2 = tags[-2] if len(tags) > 1 else START
            features = _vector(tagger_features(forms, index, prev, prev2), self.linear.interner, grow)
            tags.append(self.linear.classes[self.linear.best(features, self._all)])
        return tags

    def dumps(self) -> str:
        metadata = {
            "kind": MODEL_KIND,
            "column": self.column.value,
            "metadata": self.metadata.model_dump_json(),
        }
        return save_model(self.linear, metadata)

    @classmethod
    def loads(cls, text: str) -> "TaggerModel":
        linear, header = load_model(text)
        if header.get("kind") != MODEL_KIND:
            raise ModelFormatError(f"expected a {MODEL_KIND} model, found {header.get('kind')!r}")
        try:
            metadata = TaggerMetadata.model_validate(json.loads(header["metadata"]))
        except (KeyError, ValueError) as e:
            raise ModelFormatError(f"unreadable tagger metadata: {e}")
        return cls(linear, metadata)


def _coarse_map(train: Treebank) -> Dict[str, str]:
    """Most frequent coarse tag per fine tag; ties go to the smaller tag."""
    counts: Dict[str, Counter] = defaultdict(Counter)
    for sentence in train.sentences:
        for token in sentence.tokens:
            counts[token.postag][token.cpostag] += 1
    return {
        fine: min(coarse.items(), key=lambda item: (-item[1], item[0]))[0]
        for fine, coarse in sorted(counts.items())
    }


def train_tagger(
    train: Treebank,
    dev: Treebank,
    column: TagColumn = TagColumn.CPOSTAG,
    params: Optional[TaggerParams] = None,
) -> TaggerModel:
    """Averaged perceptron over predicted tag history; best dev accuracy epoch wins."""
    params = params or TaggerParams()
    if not train.token_count:
        raise EmptyInputError("training treebank is empty")
    if not dev.token_count:
        raise EmptyInputError("development treebank is empty")

    classes = sorted({tag for sentence in train.sentences for tag in _gold_tags(sentence, column)})
    metadata = TaggerMetadata(
        column=column,
        languages=train.languages,
        seed=params.seed,
        epochs=params.epochs,
        coarse_map=_coarse_map(train) if column == TagColumn.POSTAG else {},
    )
    linear = LinearModel(classes)
    index = {tag: i for i, tag in enumerate(classes)}
    candidates = list(range(len(classes)))
    sentences = list(train.sentences)

    rng = np.random.default_rng(params.seed)
    best: Optional[LinearModel] = None
    best_accuracy = -1.0
    dev_accuracy = []
    for epoch in range(1, params.epochs + 1):
        order = rng.permutation(len(sentences)) if params.shuffle else range(len(sentences))
        mistakes = 0
        for position in order:
            sentence = sentences[int(position)]
            forms = sentence.forms
            history: List[str] = []
            for i, gold in enumerate(_gold_tags(sentence, column)):
                prev = history[-1] if history else START
                prev2 = history[-2] if len(history) > 1 else START
                features = _vector(tagger_features(forms, i, prev, prev2), linear.interner, True)
                predicted = linear.best(features, candidates)
                if predicted != index[gold]:
                    linear.update(features, index[gold], predicted)
                    mistakes += 1
                linear.tick()
                history.append(classes[predicted])

        snapshot = TaggerModel(linear.averaged(), metadata)
        predictions = [snapshot.predict(sentence.forms) for sentence in dev.sentences]
        accuracy = tagging_accuracy(dev, predictions, column)
        dev_accuracy.append(accuracy)
        logger.info(
            f"Tagger epoch {epoch}/{params.epochs}: {mistakes} training mistakes, "
            f"dev accuracy {accuracy:.4f}"
        )
        if accuracy > best_accuracy:
            best, best_accuracy = snapshot.linear, accuracy
            metadata = metadata.model_copy(update={"selected_epoch": epoch})

    metadata = metadata.model_copy(update={"dev_accuracy": dev_accuracy})
    return TaggerModel(best, metadata)


def tag(model: TaggerModel, forms: Sequence[str]) -> List[str]:
    """One predicted tag per form."""
    if not forms:
        raise EmptyInputError("cannot tag an empty token sequence")
    return model.predict(forms)


def tag_sentence(model: TaggerModel, sentence: Sentence) -> Sentence:
    """Copy of the sentence with the model's column (and mapped coarse tags) predicted."""
    tags = tag(model, sentence.forms)
    tokens = []
    for token, predicted in zip(sentence.tokens, tags):
        update = {model.column.value: predicted}
        if model.column == TagColumn.POSTAG and predicted in model.metadata.coarse_map:
            update["cpostag"] = model.metadata.coarse_map[predicted]
        tokens.append(token.model_copy(update=update))
    return sentence.model_copy(update={"tokens": tuple(tokens), "tag_config": None})


def tag_treebank(model: TaggerModel, treebank: Treebank) -> Treebank:
    sentences = tuple(tag_sentence(model, sentence) for sentence in treebank.sentences)
    return treebank.model_copy(update={"sentences": sentences})


def tagging_accuracy(gold: Treebank, predicted: Sequence[Sequence[str]], column: TagColumn) -> float:
    """Token-level exact-match rate of predicted tags against the gold column."""
    if len(gold) != len(predicted):
        raise AlignmentError(
            f"gold has {len(gold)} sentences, prediction has {len(predicted)}"
        )
    total = correct = 0
    for index, (sentence, tags) in enumerate(zip(gold.sentences, predicted), start=1):
        if len(sentence) != len(tags):
            raise AlignmentError(
                f"sentence {index}: gold has {len(sentence)} tokens, prediction has {len(tags)}"
            )
        total += len(tags)
        correct += sum(1 for g, p in zip(_gold_tags(sentence, column), tags) if g == p)
    return correct / total if total else 0.0
