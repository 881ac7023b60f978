"""Conftest module."""

import random
from typing import Callable, Dict, List, Optional, Sequence

import pytest

from app.schemas.treebank import Sentence, Token, Treebank
from app.utils.conll_io import read_treebank

FIXTURE_CONLL = (
    "1\tHe\the\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n"
    "2\truns\trun\tVERB\tVBZ\t_\t0\troot\t_\t_\n"
    "3\t.\t.\t.\t.\t_\t2\tpunct\t_\t_\n"
    "\n"
    "1\tLa\tel\tDET\tDA\tGender=Fem\t2\tdet\t_\t_\n"
    "2\tcasa\tcasa\tNOUN\tNC\tGender=Fem\t0\troot\t_\t_\n"
    "3\tblanca\tblanco\tADJ\tAQ\tGender=Fem\t2\tamod\t_\t_\n"
    "\n"
    "1\tHello\t_\tX\tUH\t_\t0\troot\t_\t_\n"
    "\n"
    "1\tThe\tthe\tDET\tDT\t_\t3\tdet\t_\t_\n"
    "2\told\told\tADJ\tJJ\t_\t3\tamod\t_\t_\n"
    "3\tman\tman\tNOUN\tNN\t_\t4\tnsubj\t_\t_\n"
    "4\tsaw\tsee\tVERB\tVBD\tTense=Past\t0\troot\t_\t_\n"
    "5\ta\ta\tDET\tDT\t_\t6\tdet\t_\t_\n"
    "6\tdog\tdog\tNOUN\tNN\t_\t4\tobj\t_\t_\n"
    "\n"
    "1\tI\tI\tPRON\tPRP\t_\t2\tnsubj\t_\t_\n"
    "2\tthink\tthink\tVERB\tVBP\t_\t0\troot\t_\t_\n"
    "3\tso\tso\tADV\tRB\t_\t2\tadvmod\t_\t_\n"
    "4\t.\t.\t.\t.\t_\t2\tpunct\t_\t_\n"
    "\n"
)

CROSSING_CONLL = (
    "1\tA\t_\tX\tX\t_\t3\tdep\t_\t_\n"
    "2\tB\t_\tX\tX\t_\t4\tdep\t_\t_\n"
    "3\tC\t_\tX\tX\t_\t0\troot\t_\t_\n"
    "4\tD\t_\tX\tX\t_\t3\tdep\t_\t_\n"
    "\n"
)

# Two toy languages sharing coarse tags and labels. "a" is SVO with
# DET ADJ NOUN noun phrases; "b" is SOV with NOUN ADJ DET noun phrases.
TOY_LANGUAGES: Dict[str, Dict] = {
    "a": {
        "verb_final": False,
        "modifiers_after": False,
        "fine": {"DET": "DT", "NOUN": "NN", "VERB": "VB", "ADJ": "JJ"},
    },
    "b": {
        "verb_final": True,
        "modifiers_after": True,
        "fine": {"DET": "dt", "NOUN": "nc", "VERB": "vm", "ADJ": "aq"},
    },
}
VOCABULARY = {"DET": 2, "NOUN": 8, "VERB": 5, "ADJ": 4}


class _Word:
    def __init__(self, lang: str, coarse: str, index: int, deprel: str):
        self.form = f"{lang}-{coarse.lower()}{index}"
        self.coarse = coarse
        self.fine = TOY_LANGUAGES[lang]["fine"][coarse]
        self.deprel = deprel
        self.head: Optional["_Word"] = None


def _word(rng: random.Random, lang: str, coarse: str, deprel: str) -> _Word:
    return _Word(lang, coarse, rng.randrange(VOCABULARY[coarse]), deprel)


def _noun_phrase(rng: random.Random, lang: str, deprel: str, head: _Word) -> List[_Word]:
    noun = _word(rng, lang, "NOUN", deprel)
    noun.head = head
    modifiers = []
    if rng.random() < 0.4:
        modifiers.append(_word(rng, lang, "ADJ", "amod"))
    modifiers.append(_word(rng, lang, "DET", "det"))
    for modifier in modifiers:
        modifier.head = noun
    if TOY_LANGUAGES[lang]["modifiers_after"]:
        return [noun] + modifiers
    return list(reversed(modifiers)) + [noun]


def _to_sentence(words: Sequence[_Word], lang: Optional[str]) -> Sentence:
    position = {id(word): i for i, word in enumerate(words, start=1)}
    tokens = tuple(
        Token(
            id=i,
            form=word.form,
            cpostag=word.coarse,
            postag=word.fine,
            head=position[id(word.head)] if word.head is not None else 0,
            deprel=word.deprel,
        )
        for i, word in enumerate(words, start=1)
    )
    return Sentence(tokens=tokens, lang=lang)


def toy_sentence(
    rng: random.Random,
    verb_lang: str,
    subject_lang: Optional[str] = None,
    object_lang: Optional[str] = None,
    with_object: Optional[bool] = None,
) -> Sentence:
    """Clause order follows the verb's language; each noun phrase follows its own."""
    subject_lang = subject_lang or verb_lang
    verb = _word(rng, verb_lang, "VERB", "root")
    subject = _noun_phrase(rng, subject_lang, "nsubj", verb)
    if with_object is None:
        with_object = rng.random() < 0.7
    obj: List[_Word] = []
    if with_object:
        obj = _noun_phrase(rng, object_lang or verb_lang, "obj", verb)
    if TOY_LANGUAGES[verb_lang]["verb_final"]:
        words = subject + obj + [verb]
    else:
        words = subject + [verb] + obj
    languages = {verb_lang, subject_lang, object_lang or verb_lang}
    return _to_sentence(words, verb_lang if len(languages) == 1 else None)


def make_toy_treebank(lang: str, size: int, seed: int) -> Treebank:
    rng = random.Random(seed)
    return Treebank(
        sentences=tuple(toy_sentence(rng, lang) for _ in range(size)),
        source=f"toy-{lang}",
    )


def make_code_switched_treebank(size: int, seed: int) -> Treebank:
    """Every sentence mixes both languages within the clause."""
    rng = random.Random(seed)
    sentences = []
    for _ in range(size):
        verb_lang = rng.choice("ab")
        other = "b" if verb_lang == "a" else "a"
        subject_lang, object_lang = rng.choice(
            [(verb_lang, other), (other, verb_lang), (other, other)]
        )
        sentences.append(toy_sentence(rng, verb_lang, subject_lang, object_lang, with_object=True))
    return Treebank(sentences=tuple(sentences), source="toy-mixed")


@pytest.fixture
def fixture_text() -> str:
    return FIXTURE_CONLL


@pytest.fixture
def fixture_treebank() -> Treebank:
    return read_treebank(FIXTURE_CONLL, lang="en", source="fixture")


@pytest.fixture
def crossing_sentence() -> Sentence:
    return read_treebank(CROSSING_CONLL).sentences[0]


@pytest.fixture
def toy_treebank() -> Callable[[str, int, int], Treebank]:
    """Factory for monolingual toy treebanks: toy_treebank(lang, size, seed)."""
    return make_toy_treebank


@pytest.fixture
def code_switched_treebank() -> Callable[[int, int], Treebank]:
    return make_code_switched_treebank


def random_tree(rng: random.Random, n: int) -> List[int]:
    """Uniform-ish random single-rooted tree as a head array."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = [0] * n
    for position, token in enumerate(order):
        heads[token - 1] = 0 if position == 0 else order[rng.randrange(position)]
    return heads


@pytest.fixture
def tree_factory() -> Callable[[random.Random, int], List[int]]:
    return random_tree
