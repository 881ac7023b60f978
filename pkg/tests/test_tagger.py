"""Tests for the part-of-speech tagger and the tag-then-parse pipeline."""

import random

import pytest

from app.core.exceptions import AlignmentError, EmptyInputError, ModelFormatError
from app.schemas.parser import TrainParams
from app.schemas.tagger import TagColumn, TaggerParams
from app.schemas.treebank import Sentence, TagConfig, TagMode, Token, Treebank
from app.services.evaluation import score
from app.services.parser import parse_treebank, train_parser
from app.services.tagger import (
    TaggerModel,
    tag,
    tag_sentence,
    tag_treebank,
    tagger_features,
    tagging_accuracy,
    train_tagger,
)
from app.utils.treebank_ops import merge_treebanks

UNIVERSAL = TagConfig(mode=TagMode.UNIVERSAL_ONLY)


def _tagged(*sentences) -> Treebank:
    """Sentences given as lists of (form, coarse, fine) triples, chained to the first token."""
    built = []
    for words in sentences:
        tokens = tuple(
            Token(id=i, form=form, cpostag=coarse, postag=fine, head=0 if i == 1 else 1, deprel="dep")
            for i, (form, coarse, fine) in enumerate(words, start=1)
        )
        built.append(Sentence(tokens=tokens))
    return Treebank(sentences=tuple(built))


def test_features_of_a_word():
    """Test affix, context and shape features."""
    features = tagger_features(["the", "well-known", "2nd"], 1, "DET", "<S>")
    assert "w=well-known" in features
    assert "t-1=DET" in features
    assert "w-1=the" in features
    assert "w+1=2nd" in features
    assert "s3=own" in features
    assert "p2=we" in features
    assert "hyphen" in features
    assert "digit" in tagger_features(["2nd"], 0, "<S>", "<S>")


def test_single_tag_corpus():
    """Test that a corpus with one tag predicts it everywhere."""
    train = _tagged([("a", "X", "X"), ("b", "X", "X")], [("c", "X", "X")])
    model = train_tagger(train, train, TagColumn.CPOSTAG, TaggerParams(epochs=2))
    assert model.classes == ["X"]
    assert tag(model, ["never", "seen", "before"]) == ["X", "X", "X"]


def test_training_is_deterministic(toy_treebank):
    """Test that equal seeds give identical model files."""
    train, dev = toy_treebank("a", 10, 1), toy_treebank("a", 5, 2)
    params = TaggerParams(epochs=3, seed=4)
    first = train_tagger(train, dev, TagColumn.POSTAG, params)
    second = train_tagger(train, dev, TagColumn.POSTAG, params)
    assert first.dumps() == second.dumps()


def test_suffix_drives_unseen_words():
    """Test that unknown words are tagged by their endings."""
    verbs = ["walking", "talking", "running", "singing", "reading", "eating"]
    nouns = ["nation", "station", "motion", "lotion", "fraction", "caution"]
    train = _tagged(*([(word, "VERB", "VB")] for word in verbs), *([(word, "NOUN", "NN")] for word in nouns))
    model = train_tagger(train, train, TagColumn.CPOSTAG, TaggerParams(epochs=5))
    assert tag(model, ["jumping"]) == ["VERB"]
    assert tag(model, ["potion"]) == ["NOUN"]


def test_previous_tag_disambiguates():
    """Test that an ambiguous word follows the tag before it."""
    train = _tagged(
        [("I", "PRON", "PRP"), ("can", "VERB", "MD")],
        [("the", "DET", "DT"), ("can", "NOUN", "NN")],
        [("we", "PRON", "PRP"), ("see", "VERB", "VB")],
        [("a", "DET", "DT"), ("dog", "NOUN", "NN")],
    )
    model = train_tagger(train, train, TagColumn.CPOSTAG, TaggerParams(epochs=10))
    assert tag(model, ["we", "can"]) == ["PRON", "VERB"]
    assert tag(model, ["a", "can"]) == ["DET", "NOUN"]


def test_fine_tagger_fills_coarse_column(toy_treebank):
    """Test that fine-tag predictions also set the mapped coarse tag."""
    train = toy_treebank("b", 20, 1)
    model = train_tagger(train, train, TagColumn.POSTAG, TaggerParams(epochs=5))
    assert model.metadata.coarse_map == {"aq": "ADJ", "dt": "DET", "nc": "NOUN", "vm": "VERB"}

    sentence = train.sentences[0]
    blank = sentence.model_copy(
        update={"tokens": tuple(t.model_copy(update={"cpostag": "_", "postag": "_"}) for t in sentence.tokens)}
    )
    tagged = tag_sentence(model, blank)
    assert [t.postag for t in tagged.tokens] == [t.postag for t in sentence.tokens]
    assert [t.cpostag for t in tagged.tokens] == [t.cpostag for t in sentence.tokens]
    assert tagged.heads == sentence.heads


def test_model_file_round_trip(toy_treebank):
    """Test that a reloaded tagger predicts identically."""
    train, test = toy_treebank("a", 10, 1), toy_treebank("a", 10, 7)
    model = train_tagger(train, train, TagColumn.CPOSTAG, TaggerParams(epochs=3))
    loaded = TaggerModel.loads(model.dumps())
    assert loaded.metadata == model.metadata
    assert tag_treebank(loaded, test) == tag_treebank(model, test)
    with pytest.raises(ModelFormatError):
        TaggerModel.loads(model.dumps().replace("meta\tkind\ttagger", "meta\tkind\tparser"))


def test_accuracy():
    """Test exact-match accuracy and its error cases."""
    gold = _tagged([("a", "A", "A"), ("b", "B", "B"), ("c", "C", "C"), ("d", "D", "D")])
    assert tagging_accuracy(gold, [["A", "B", "C", "D"]], TagColumn.CPOSTAG) == 1.0
    assert tagging_accuracy(gold, [["A", "B", "X", "D"]], TagColumn.CPOSTAG) == 0.75
    assert tagging_accuracy(Treebank(), [], TagColumn.CPOSTAG) == 0.0
    with pytest.raises(AlignmentError):
        tagging_accuracy(gold, [["A"]], TagColumn.CPOSTAG)
    with pytest.raises(AlignmentError):
        tagging_accuracy(gold, [], TagColumn.CPOSTAG)


def test_accuracy_matches_recount(toy_treebank):
    """Test accuracy against a naive count on random corruptions."""
    rng = random.Random(8)
    gold = toy_treebank("a", 15, 3)
    tags = ["DET", "NOUN", "VERB", "ADJ"]
    for _ in range(20):
        predicted = [[rng.choice(tags) for _ in sentence.tokens] for sentence in gold.sentences]
        pairs = [
            (token.cpostag, guess)
            for sentence, guesses in zip(gold.sentences, predicted)
            for token, guess in zip(sentence.tokens, guesses)
        ]
        expected = sum(1 for g, p in pairs if g == p) / len(pairs)
        assert tagging_accuracy(gold, predicted, TagColumn.CPOSTAG) == pytest.approx(expected)


def test_empty_inputs():
    """Test empty training data and empty token sequences."""
    train = _tagged([("a", "X", "X")])
    with pytest.raises(EmptyInputError):
        train_tagger(Treebank(), train)
    model = train_tagger(train, train, TagColumn.CPOSTAG, TaggerParams(epochs=1))
    with pytest.raises(EmptyInputError):
        tag(model, [])


def _pipeline_las(tagger, parser, treebank) -> float:
    return score(treebank, parse_treebank(parser, tag_treebank(tagger, treebank))).las


def test_code_switching_pipeline(toy_treebank, code_switched_treebank):
    """Test that bilingual tagger and parser beat monolingual pipelines on mixed sentences."""
    parser_params = TrainParams(epochs=10, seed=1, tag_config=UNIVERSAL)
    tagger_params = TaggerParams(epochs=5, seed=1)
    splits = {lang: (toy_treebank(lang, 80, 30 + i), toy_treebank(lang, 20, 40 + i)) for i, lang in enumerate("ab")}
    mixed = code_switched_treebank(60, 99)

    monolingual = []
    for lang, (train, dev) in splits.items():
        tagger = train_tagger(train, dev, TagColumn.CPOSTAG, tagger_params)
        parser = train_parser(train, dev, parser_params)
        monolingual.append(_pipeline_las(tagger, parser, mixed))

    train = merge_treebanks([(lang, train) for lang, (train, _) in splits.items()])
    dev = merge_treebanks([(lang, dev) for lang, (_, dev) in splits.items()])
    bilingual = _pipeline_las(
        train_tagger(train, dev, TagColumn.CPOSTAG, tagger_params),
        train_parser(train, dev, parser_params),
        mixed,
    )
    assert bilingual >= max(monolingual) + 10.0
