"""Arc-eager and arc-standard transition systems with their static oracles."""

from enum import Enum
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from app.core.exceptions import IllegalTransitionError, NonProjectiveError
from app.schemas.treebank import Sentence
from app.utils.treebank_ops import is_projective

ROOT_LABEL = "root"


class TransitionSystem(str, Enum):

    """Supported transition systems."""

    ARC_EAGER = "arc-eager"
    ARC_STANDARD = "arc-standard"


class TransitionKind(str, Enum):

    """Transition kinds."""

    SHIFT = "SHIFT"
    REDUCE = "REDUCE"
    LEFT_ARC = "LEFT_ARC"
    RIGHT_ARC = "RIGHT_ARC"


class Transition(NamedTuple):

    """A transition; arc transitions carry a label."""

    kind: TransitionKind
    label: Optional[str] = None

    @property
    def signature(self) -> str:
        if self.label is None:
            return self.kind.value
        return f"{self.kind.value}:{self.label}"

    @classmethod
    def from_signature(cls, signature: str) -> "Transition":
        kind, _, label = signature.partition(":")
        return cls(TransitionKind(kind), label or None)


SHIFT = Transition(TransitionKind.SHIFT)
REDUCE = Transition(TransitionKind.REDUCE)


def left_arc(label: str) -> Transition:
    return Transition(TransitionKind.LEFT_ARC, label)


def right_arc(label: str) -> Transition:
    return Transition(TransitionKind.RIGHT_ARC, label)


def transition_inventory(system: TransitionSystem, labels: Iterable[str]) -> List[Transition]:
    """Every transition of the system over a label set, in canonical class order."""
    ordered = sorted(set(labels))
    inventory = [SHIFT]
    if system == TransitionSystem.ARC_EAGER:
        inventory.append(REDUCE)
    inventory.extend(left_arc(label) for label in ordered)
    inventory.extend(right_arc(label) for label in ordered)
    return inventory


class Configuration:

    """Parser state: stack, buffer and the arcs built so far.

    Instances are treated as values; ``apply`` returns a new configuration.
    """

    __slots__ = ("stack", "buffer", "heads", "labels")

    def __init__(
        self,
        stack: Tuple[int, ...],
        buffer: Tuple[int, ...],
        heads: Dict[int, int],
        labels: Dict[int, str],
    ):
        self.stack = stack
        self.buffer = buffer
        self.heads = heads
        self.labels = labels

    @property
    def arcs(self) -> frozenset:
        """Set of (head, dependent, label) triples."""
        return frozenset(
            (head, dependent, self.labels[dependent])
            for dependent, head in self.heads.items()
        )

    def has_head(self, token: int) -> bool:
        return token in self.heads

    def dependents(self, head: int) -> List[int]:
        return sorted(dep for dep, h in self.heads.items() if h == head)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (
            self.stack == other.stack
            and self.buffer == other.buffer
            and self.heads == other.heads
            and self.labels == other.labels
        )

    def __repr__(self) -> str:
        return f"Configuration(stack={list(self.stack)}, buffer={list(self.buffer)}, arcs={sorted(self.arcs)})"


def initial_config(sentence: Sentence) -> Configuration:
    return Configuration((0,), tuple(range(1, len(sentence) + 1)), {}, {})


def is_terminal(config: Configuration, system: TransitionSystem) -> bool:
    if system == TransitionSystem.ARC_EAGER:
        return not config.buffer
    return not config.buffer and len(config.stack) == 1


def legal_transitions(
    config: Configuration, system: TransitionSystem, labels: Iterable[str]
) -> List[Transition]:
    """Legal transitions in canonical order (see transition_inventory)."""
    legal = []
    for transition in transition_inventory(system, labels):
        if is_legal(config, transition, system):
            legal.append(transition)
    return legal


def is_legal(config: Configuration, transition: Transition, system: TransitionSystem) -> bool:
    kind = transition.kind
    stack, buffer = config.stack, config.buffer

    if system == TransitionSystem.ARC_EAGER:
        if not buffer:
            return False
        top = stack[-1]
        if kind == TransitionKind.SHIFT or kind == TransitionKind.RIGHT_ARC:
            return True
        if kind == TransitionKind.LEFT_ARC:
            return top != 0 and top not in config.heads
        return top in config.heads

    if kind == TransitionKind.SHIFT:
        return bool(buffer)
    if kind == TransitionKind.LEFT_ARC:
        return len(stack) >= 2 and stack[-2] != 0
    if kind == TransitionKind.RIGHT_ARC:
        return len(stack) >= 2
    return False


def apply(config: Configuration, transition: Transition, system: TransitionSystem) -> Configuration:
    """Apply a legal transition, returning the successor configuration."""
    if not is_legal(config, transition, system):
        raise IllegalTransitionError(f"{transition.signature} is illegal in {config!r}")

    kind = transition.kind
    stack, buffer = config.stack, config.buffer
    heads, labels = config.heads, config.labels

    if kind == TransitionKind.SHIFT:
        return Configuration(stack + (buffer[0],), buffer[1:], heads, labels)

    if system == TransitionSystem.ARC_EAGER:
        if kind == TransitionKind.REDUCE:
            return Configuration(stack[:-1], buffer, heads, labels)
        if kind == TransitionKind.LEFT_ARC:
            head, dependent = buffer[0], stack[-1]
            return Configuration(
                stack[:-1],
                buffer,
                {**heads, dependent: head},
                {**labels, dependent: transition.label},
            )
        head, dependent = stack[-1], buffer[0]
        return Configuration(
            stack + (dependent,),
            buffer[1:],
            {**heads, dependent: head},
            {**labels, dependent: transition.label},
        )

    if kind == TransitionKind.LEFT_ARC:
        head, dependent = stack[-1], stack[-2]
        return Configuration(
            stack[:-2] + (head,),
            buffer,
            {**heads, dependent: head},
            {**labels, dependent: transition.label},
        )
    head, dependent = stack[-2], stack[-1]
    return Configuration(
        stack[:-1],
        buffer,
        {**heads, dependent: head},
        {**labels, dependent: transition.label},
    )


def _eager_oracle_step(
    config: Configuration, gold_heads: Sequence[int], gold_labels: Sequence[str]
) -> Transition:
    top = config.stack[-1]
    front = config.buffer[0]
    if top != 0 and gold_heads[top - 1] == front:
        return left_arc(gold_labels[top - 1])
    if gold_heads[front - 1] == top:
        return right_arc(gold_labels[front - 1])
    if top in config.heads and all(
        dep in config.heads
        for dep, head in enumerate(gold_heads, start=1)
        if head == top
    ):
        return REDUCE
    return SHIFT


def _standard_oracle_step(
    config: Configuration, gold_heads: Sequence[int], gold_labels: Sequence[str]
) -> Transition:
    if len(config.stack) >= 2:
        top, second = config.stack[-1], config.stack[-2]
        if second != 0 and gold_heads[second - 1] == top:
            return left_arc(gold_labels[second - 1])
        if gold_heads[top - 1] == second and all(
            dep in config.heads
            for dep, head in enumerate(gold_heads, start=1)
            if head == top
        ):
            return right_arc(gold_labels[top - 1])
    return SHIFT


def static_oracle(sentence: Sentence, system: TransitionSystem) -> List[Transition]:
    """Transition sequence that rebuilds the (projective) gold tree of the sentence."""
    if not is_projective(sentence):
        raise NonProjectiveError("static oracle needs a projective tree")

    gold_heads = sentence.heads
    gold_labels = sentence.labels
    step = _eager_oracle_step if system == TransitionSystem.ARC_EAGER else _standard_oracle_step

    transitions = []
    config = initial_config(sentence)
    while not is_terminal(config, system):
        transition = step(config, gold_heads, gold_labels)
        if not is_legal(config, transition, system):
            raise NonProjectiveError(f"oracle reached a dead end at {config!r}")
        transitions.append(transition)
        config = apply(config, transition, system)
    return transitions


def extract_tree(config: Configuration, n: int) -> Tuple[List[int], List[str]]:
    """Heads and labels from the arcs; tokens without a head attach to 0 as root."""
    heads = [config.heads.get(token, 0) for token in range(1, n + 1)]
    labels = [config.labels.get(token, ROOT_LABEL) for token in range(1, n + 1)]
    return heads, labels
