"""Averaged multiclass perceptron with a versioned flat-text format."""

import logging
from decimal import Decimal, InvalidOperation
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import FrozenModelError, ModelFormatError
from app.utils.features import FeatureInterner, FeatureVector
from config import settings

logger = logging.getLogger(__name__)

FORMAT_MAGIC = "depmerge-linear-model"
FORMAT_VERSION = 1


class LinearModel:

    """Sparse feature x class weight table.

    Weights are integers divided by ``scale``: raw perceptron weights use
    scale 1; averaged (finalized) weights are rounded to ``weight_precision``
    decimals and stored as integer multiples of 10**-precision, which keeps
    scoring exact and independent of summation order.
    """

    def __init__(
        self,
        classes: Sequence[str],
        interner: Optional[FeatureInterner] = None,
        scale: int = 1,
    ):
        if not classes:
            raise ValueError("a linear model needs at least one class")
        if len(set(classes)) != len(classes):
            raise ValueError("class list contains duplicates")

        self.classes = list(classes)
        self.class_index = {name: i for i, name in enumerate(self.classes)}
        self.interner = interner if interner is not None else FeatureInterner()
        self.scale = scale
        self.finalized = False
        self._weights: Dict[int, np.ndarray] = {}
        self._totals: Dict[int, np.ndarray] = {}
        self._clock = 0

    @classmethod
    def from_weights(
        cls,
        classes: Sequence[str],
        weights: Mapping[str, Mapping[str, float]],
        precision: Optional[int] = None,
    ) -> "LinearModel":
        """Finalized model from explicit {feature string: {class: weight}} values."""
        precision = settings.weight_precision if precision is None else precision
        model = cls(classes, scale=10 ** precision)
        for feature, row in sorted(weights.items()):
            vector = np.zeros(len(model.classes), dtype=np.int64)
            for name, value in row.items():
                vector[model.class_index[name]] = int(round(value * model.scale))
            model._weights[model.interner.intern(feature)] = vector
        model.finalized = True
        return model

    @property
    def feature_count(self) -> int:
        return len(self._weights)

    def score(self, features: FeatureVector) -> np.ndarray:
        """Per-class scores; unseen features contribute nothing."""
        total = np.zeros(len(self.classes), dtype=np.int64)
        for feature in features:
            row = self._weights.get(feature)
            if row is not None:
                total += row
        return total / self.scale

    def best(self, features: FeatureVector, candidates: Sequence[int]) -> int:
        """Highest-scoring class index among candidates; lowest index wins ties."""
        if not candidates:
            raise ValueError("no candidate classes to choose from")
        scores = self.score(features)
        ordered = sorted(candidates)
        return ordered[int(np.argmax(scores[ordered]))]

    def update(self, features: FeatureVector, gold: int, predicted: int) -> None:
        """Perceptron update: +1 on gold, -1 on predicted for every active feature."""
        if self.finalized:
            raise FrozenModelError("cannot update a finalized model")
        if gold == predicted:
            return
        size = len(self.classes)
        for feature in features:
            row = self._weights.get(feature)
            if row is None:
                row = self._weights[feature] = np.zeros(size, dtype=np.int64)
                self._totals[feature] = np.zeros(size, dtype=np.int64)
            totals = self._totals[feature]
            row[gold] += 1
            row[predicted] -= 1
            totals[gold] += self._clock
            totals[predicted] -= self._clock

    def tick(self) -> None:
        """Advance the averaging clock by one training instance."""
        self._clock += 1

    def averaged(self, precision: Optional[int] = None) -> "LinearModel":
        """Finalized snapshot holding the mean of the weights after each instance."""
        precision = settings.weight_precision if precision is None else precision
        snapshot = LinearModel(self.classes, self.interner, scale=10 ** precision)
        for feature, row in self._weights.items():
            if self.scale != 1:
                mean = row / self.scale
            elif self._clock:
                mean = row - self._totals[feature] / self._clock
            else:
                mean = row.astype(np.float64)
            quantized = np.rint(mean * snapshot.scale).astype(np.int64)
            if quantized.any():
                snapshot._weights[feature] = quantized
        snapshot.finalized = True
        return snapshot

    def finalize(self) -> "LinearModel":
        """Replace the weights by their average and freeze the model."""
        if self.finalized:
            return self
        snapshot = self.averaged()
        self._weights = snapshot._weights
        self._totals = {}
        self.scale = snapshot.scale
        self.finalized = True
        return self

    def entries(self) -> Iterable[Tuple[str, str, int]]:
        """(feature string, class signature, integer weight) for nonzero weights."""
        for feature, row in self._weights.items():
            name = self.interner.string(feature)
            for index in np.flatnonzero(row):
                yield name, self.classes[index], int(row[index])


def _format_weight(value: int, scale: int) -> str:
    precision = len(str(scale)) - 1
    sign = "-" if value < 0 else ""
    whole, fraction = divmod(abs(value), scale)
    if precision == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{fraction:0{precision}d}"


def save_model(model: LinearModel, metadata: Optional[Mapping[str, str]] = None) -> str:
    """Serialize a finalized model; entries are sorted by (feature, class)."""
    if not model.finalized:
        raise FrozenModelError("only finalized models can be saved")

    entries = sorted(model.entries())
    lines = [f"{FORMAT_MAGIC}\t{FORMAT_VERSION}"]
    for key, value in (metadata or {}).items():
        lines.append(f"meta\t{key}\t{value}")
    lines.append("classes\t" + "\t".join(model.classes))
    lines.append(f"scale\t{model.scale}")
    lines.append(f"entries\t{len(entries)}")
    for feature, name, value in entries:
        lines.append(f"{feature}\t{name}\t{_format_weight(value, model.scale)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _header_value(lines: List[str], index: int, key: str) -> List[str]:
    if index >= len(lines):
        raise ModelFormatError(f"truncated model file: missing {key!r} line")
    fields = lines[index].split("\t")
    if fields[0] != key:
        raise ModelFormatError(f"expected {key!r} line, found {fields[0]!r}")
    return fields[1:]


def load_model(text: str) -> Tuple[LinearModel, Dict[str, str]]:
    """Inverse of save_model: returns the finalized model and its metadata."""
    lines = text.splitlines()
    if not lines:
        raise ModelFormatError("empty model file")

    magic, _, version = lines[0].partition("\t")
    if magic != FORMAT_MAGIC:
        raise ModelFormatError("not a depmerge model file")
    if version != str(FORMAT_VERSION):
        raise ModelFormatError(
            f"unsupported model format version {version!r}, expected {FORMAT_VERSION}"
        )

    index = 1
    metadata: Dict[str, str] = {}
    while index < len(lines) and lines[index].startswith("meta\t"):
        fields = lines[index].split("\t", 2)
        if len(fields) != 3:
            raise ModelFormatError(f"malformed metadata at line {index + 1}")
        metadata[fields[1]] = fields[2]
        index += 1

    classes = _header_value(lines, index, "classes")
    scale_field = _header_value(lines, index + 1, "scale")
    count_field = _header_value(lines, index + 2, "entries")
    try:
        scale = int(scale_field[0])
        count = int(count_field[0])
    except (IndexError, ValueError):
        raise ModelFormatError("malformed scale or entries header")
    index += 3

    body = lines[index:index + count]
    if len(body) != count or index + count >= len(lines) or lines[index + count] != "end":
        raise ModelFormatError(f"truncated model file: expected {count} weight entries")

    model = LinearModel(classes, scale=scale)
    for line_number, line in enumerate(body, start=index + 1):
        fields = line.split("\t")
        if len(fields) != 3 or fields[1] not in model.class_index:
            raise ModelFormatError(f"malformed weight entry at line {line_number}")
        feature, name, raw = fields
        try:
            value = Decimal(raw) * scale
        except InvalidOperation:
            raise ModelFormatError(f"malformed weight at line {line_number}")
        feature_id = model.interner.intern(feature)
        row = model._weights.get(feature_id)
        if row is None:
            row = model._weights[feature_id] = np.zeros(len(classes), dtype=np.int64)
        row[model.class_index[name]] = int(value)

    model.finalized = True
    logger.debug(f"Loaded model with {model.feature_count} features, {len(classes)} classes")
    return model, metadata
