"""Treebank merging, tag configuration, shared-tag statistics and projectivity."""

import logging
from typing import List, Sequence, Tuple

from app.core.exceptions import EmptyInputError, InvariantViolation, TagConfigError
from app.schemas.treebank import (
    SharedTagMatrix,
    Sentence,
    TagConfig,
    TagMode,
    Treebank,
)

logger = logging.getLogger(__name__)


def merge_treebanks(parts: Sequence[Tuple[str, Treebank]]) -> Treebank:
    """Concatenate treebanks in argument order, stamping each sentence with its language."""
    if not parts:
        raise EmptyInputError("merge needs at least one treebank")

    sentences = []
    for lang, treebank in parts:
        sentences.extend(
            sentence.model_copy(update={"lang": lang})
            for sentence in treebank.sentences
        )
        logger.debug(f"Merged {len(treebank)} sentences for {lang}")

    source = "+".join(lang for lang, _ in parts)
    return Treebank(sentences=tuple(sentences), source=source)


def _prefixed(lang: str, tag: str) -> str:
    # tags read back from a prefixed file already carry the code
    prefix = f"{lang}_"
    return tag if tag.startswith(prefix) else prefix + tag


def apply_tag_config_to_sentence(sentence: Sentence, config: TagConfig) -> Sentence:
    """Rewrite the tag columns of one sentence for the given configuration."""
    if sentence.tag_config is not None:
        if sentence.tag_config == config:
            return sentence
        raise TagConfigError(
            f"sentence already carries tag configuration {sentence.tag_config.name}, "
            f"cannot apply {config.name}"
        )
    if config.prefix_language and not sentence.lang:
        raise TagConfigError("language prefixing requires a language code on every sentence")

    tokens = []
    for token in sentence.tokens:
        cpostag = token.cpostag
        postag = cpostag if config.mode == TagMode.UNIVERSAL_ONLY else token.postag
        if config.prefix_language:
            cpostag = _prefixed(sentence.lang, cpostag)
            postag = _prefixed(sentence.lang, postag)
        tokens.append(token.model_copy(update={"cpostag": cpostag, "postag": postag}))
    return sentence.model_copy(update={"tokens": tuple(tokens), "tag_config": config})


def apply_tag_config(treebank: Treebank, config: TagConfig) -> Treebank:
    """Apply a tag configuration to every sentence; idempotent."""
    sentences = tuple(
        apply_tag_config_to_sentence(sentence, config)
        for sentence in treebank.sentences
    )
    return treebank.model_copy(update={"sentences": sentences})


def shared_tag_report(parts: Sequence[Tuple[str, Treebank]]) -> SharedTagMatrix:
    """Count fine tags shared by every pair of languages; diagonal holds tagset sizes."""
    if len(parts) < 2:
        raise EmptyInputError("shared tag report needs at least two treebanks")

    tagsets = [
        {token.postag for sentence in treebank.sentences for token in sentence.tokens}
        for _, treebank in parts
    ]
    counts = [[len(first & second) for second in tagsets] for first in tagsets]
    return SharedTagMatrix(languages=[lang for lang, _ in parts], counts=counts)


def _dominated(heads: Sequence[int], ancestor: int, node: int) -> bool:
    while node != 0:
        if node == ancestor:
            return True
        node = heads[node - 1]
    return ancestor == 0


def _non_projective_arcs(heads: Sequence[int]) -> List[Tuple[int, int]]:
    """(length, dependent) for arcs spanning a token their head does not dominate."""
    arcs = []
    for dependent, head in enumerate(heads, start=1):
        low, high = sorted((head, dependent))
        for between in range(low + 1, high):
            if not _dominated(heads, head, between):
                arcs.append((high - low, dependent))
                break
    return arcs


def heads_are_projective(heads: Sequence[int]) -> bool:
    """True iff no two arcs cross, arcs from the artificial root included."""
    spans = sorted(
        tuple(sorted((head, dependent)))
        for dependent, head in enumerate(heads, start=1)
    )
    for i, (left1, right1) in enumerate(spans):
        for left2, right2 in spans[i + 1:]:
            if left2 >= right1:
                break
            if left1 < left2 < right1 < right2:
                return False
    return True


def is_projective(sentence: Sentence) -> bool:
    return heads_are_projective(sentence.heads)


def projectivize_heads(heads: Sequence[int]) -> List[int]:
    """Lift the dependent of the shortest non-projective arc to its grandparent until none remain."""
    lifted = list(heads)
    limit = len(lifted) * len(lifted) + 1
    for _ in range(limit):
        arcs = _non_projective_arcs(lifted)
        if not arcs:
            return lifted
        _, dependent = min(arcs)
        parent = lifted[dependent - 1]
        lifted[dependent - 1] = lifted[parent - 1]
    raise InvariantViolation("projectivization did not reach a fixpoint")


def projectivize(sentence: Sentence) -> Sentence:
    """Projective copy of the sentence; labels are kept, projective input is returned as is."""
    if is_projective(sentence):
        return sentence
    heads = projectivize_heads(sentence.heads)
    return sentence.with_tree(heads, sentence.labels)
