"""Pydantic schemas for treebank data models."""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

EMPTY = "_"


class Token(BaseModel):

    """One CoNLL-X token line."""

    model_config = ConfigDict(frozen=True)

    id: int
    form: str
    lemma: str = EMPTY
    cpostag: str = EMPTY
    postag: str = EMPTY
    feats: str = EMPTY
    head: int = 0
    deprel: str = EMPTY

    @field_validator("lemma", "cpostag", "postag", "feats", "deprel")
    @classmethod
    def _empty_marker(cls, value: str) -> str:
        return value if value else EMPTY

    @model_validator(mode="after")
    def _check_ids(self) -> "Token":
        if self.id < 1:
            raise ValueError(f"token id must be >= 1, got {self.id}")
        if self.head < 0:
            raise ValueError(f"head must be >= 0, got {self.head}")
        if self.head == self.id:
            raise ValueError(f"token {self.id} is its own head")
        if not self.form:
            raise ValueError(f"token {self.id} has an empty form")
        return self


class TagMode(str, Enum):

    """Which tag information reaches the feature model."""

    TREEBANK_DEPENDENT = "fine"
    UNIVERSAL_ONLY = "universal"


class TagConfig(BaseModel):

    """Training tag configuration."""

    model_config = ConfigDict(frozen=True)

    mode: TagMode = TagMode.TREEBANK_DEPENDENT
    prefix_language: bool = False

    @property
    def name(self) -> str:
        return self.mode.value + ("+prefix" if self.prefix_language else "")

    @classmethod
    def from_name(cls, name: str) -> "TagConfig":
        mode, _, suffix = name.partition("+")
        return cls(mode=TagMode(mode), prefix_language=suffix == "prefix")


class Sentence(BaseModel):

    """An ordered sequence of tokens with an optional language code."""

    model_config = ConfigDict(frozen=True)

    tokens: Tuple[Token, ...]
    lang: Optional[str] = None
    # Tag configuration already applied to the tag columns, if any
    tag_config: Optional[TagConfig] = None

    @model_validator(mode="after")
    def _check_positions(self) -> "Sentence":
        n = len(self.tokens)
        for position, token in enumerate(self.tokens, start=1):
            if token.id != position:
                raise ValueError(f"expected token id {position}, got {token.id}")
            if token.head > n:
                raise ValueError(
                    f"head out of range: token {token.id} has head {token.head} "
                    f"in a {n}-token sentence"
                )
        return self

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def heads(self) -> List[int]:
        return [token.head for token in self.tokens]

    @property
    def labels(self) -> List[str]:
        return [token.deprel for token in self.tokens]

    @property
    def forms(self) -> List[str]:
        return [token.form for token in self.tokens]

    def with_tree(self, heads: List[int], labels: List[str]) -> "Sentence":
        """Return a copy carrying the given heads and labels."""
        tokens = tuple(
            token.model_copy(update={"head": head, "deprel": label})
            for token, head, label in zip(self.tokens, heads, labels)
        )
        return self.model_copy(update={"tokens": tokens})


class Treebank(BaseModel):

    """An ordered collection of sentences."""

    model_config = ConfigDict(frozen=True)

    sentences: Tuple[Sentence, ...] = ()
    source: str = ""

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(sentence) for sentence in self.sentences)

    @property
    def languages(self) -> List[str]:
        """Language codes in order of first appearance."""
        seen: Dict[str, None] = {}
        for sentence in self.sentences:
            if sentence.lang is not None:
                seen.setdefault(sentence.lang, None)
        return list(seen)


class SharedTagMatrix(BaseModel):

    """Shared fine-tag counts between language pairs."""

    languages: List[str]
    counts: List[List[int]]

    def shared(self, first: str, second: str) -> int:
        i = self.languages.index(first)
        j = self.languages.index(second)
        return self.counts[i][j]
