"""Tests for attachment scores, the randomized comparator and FDR correction."""

import random

import pytest

from app.core.exceptions import AlignmentError, DataError
from app.schemas.evaluation import EvalReport, GridCell, Metric, SentenceScore
from app.schemas.treebank import Sentence, Token, Treebank
from app.services.evaluation import (
    annotate,
    benjamini_hochberg,
    grid_report,
    grid_summary,
    randomized_comparator,
    score,
)
from app.utils.conll_io import read_treebank


def _sentence(heads, labels, tags=None) -> Sentence:
    tags = tags or ["X"] * len(heads)
    return Sentence(
        tokens=tuple(
            Token(id=i, form=f"w{i}", cpostag=tag, postag=tag, head=head, deprel=label)
            for i, (head, label, tag) in enumerate(zip(heads, labels, tags), start=1)
        )
    )


def _report(correct, tokens=2, digest="gold") -> EvalReport:
    """Report with the given labeled (and unlabeled) correct count per sentence."""
    sentences = [SentenceScore(heads_correct=c, labeled_correct=c, tokens=tokens) for c in correct]
    total = tokens * len(correct)
    return EvalReport(
        tokens=total,
        heads_correct=sum(correct),
        labeled_correct=sum(correct),
        las=100.0 * sum(correct) / total,
        uas=100.0 * sum(correct) / total,
        sentences=sentences,
        gold_digest=digest,
    )


def test_perfect_prediction(fixture_treebank):
    """Test that gold scored against itself is perfect."""
    report = score(fixture_treebank, fixture_treebank)
    assert report.las == report.uas == 100.0
    assert report.tokens == fixture_treebank.token_count
    assert len(report.sentences) == len(fixture_treebank)


def test_one_wrong_head():
    """Test UAS with one of two heads wrong, then with one label wrong."""
    gold = Treebank(sentences=(_sentence([2, 0], ["nsubj", "root"]),))
    report = score(gold, Treebank(sentences=(_sentence([0, 0], ["nsubj", "root"]),)))
    assert report.uas == 50.0
    assert report.las == 50.0

    report = score(gold, Treebank(sentences=(_sentence([2, 0], ["obj", "root"]),)))
    assert report.uas == 100.0
    assert report.las == 50.0


def test_half_heads_right():
    """Test counts with two of three heads right."""
    gold = Treebank(sentences=(_sentence([3, 3, 0], ["a", "b", "root"]),))
    pred = Treebank(sentences=(_sentence([3, 1, 0], ["a", "b", "root"]),))
    report = score(gold, pred)
    assert report.heads_correct == 2
    assert report.uas == pytest.approx(200 / 3)


def test_punctuation_exclusion(fixture_text):
    """Test that punctuation is judged on the gold coarse tag."""
    gold = read_treebank(fixture_text)
    wrong_punct = fixture_text.replace("3\t.\t.\t.\t.\t_\t2\tpunct", "3\t.\t.\t.\t.\t_\t1\tpunct")
    pred = read_treebank(wrong_punct)

    assert score(gold, pred).uas < 100.0
    excluded = score(gold, pred, exclude_punct=True)
    assert excluded.uas == 100.0
    assert excluded.tokens == gold.token_count - 2


def test_no_scored_tokens():
    """Test that an all-punctuation corpus scores zero when punctuation is skipped."""
    gold = Treebank(sentences=(_sentence([0], ["punct"], ["."]),))
    report = score(gold, gold, exclude_punct=True)
    assert report.tokens == 0
    assert report.las == report.uas == 0.0


def test_misaligned_inputs(fixture_treebank):
    """Test sentence and token count mismatches."""
    with pytest.raises(AlignmentError):
        score(fixture_treebank, Treebank(sentences=fixture_treebank.sentences[:2]))
    shifted = Treebank(sentences=fixture_treebank.sentences[1:] + fixture_treebank.sentences[:1])
    with pytest.raises(AlignmentError, match="sentence 2"):
        score(fixture_treebank, shifted)


def test_scores_match_recount(tree_factory):
    """Test corpus scores against a naive token count on random trees."""
    rng = random.Random(13)
    labels = ["a", "b", "c"]
    for _ in range(1000):
        gold_sentences, pred_sentences = [], []
        for _ in range(rng.randint(1, 3)):
            n = rng.randint(1, 7)
            gold_sentences.append(_sentence(tree_factory(rng, n), [rng.choice(labels) for _ in range(n)]))
            pred_sentences.append(_sentence(tree_factory(rng, n), [rng.choice(labels) for _ in range(n)]))
        gold, pred = Treebank(sentences=tuple(gold_sentences)), Treebank(sentences=tuple(pred_sentences))
        pairs = [
            (g, p)
            for gs, ps in zip(gold_sentences, pred_sentences)
            for g, p in zip(gs.tokens, ps.tokens)
        ]
        heads = sum(1 for g, p in pairs if g.head == p.head)
        labeled = sum(1 for g, p in pairs if g.head == p.head and g.deprel == p.deprel)
        report = score(gold, pred)
        assert report.uas == pytest.approx(100.0 * heads / len(pairs))
        assert report.las == pytest.approx(100.0 * labeled / len(pairs))
        assert report.las <= report.uas


def test_identical_systems():
    """Test that equal per-sentence scores are never significant."""
    result = randomized_comparator(_report([1, 2, 0]), _report([1, 2, 0]))
    assert result.observed == 0.0
    assert result.p_value == 1.0
    assert result.exact


def test_single_sentence():
    """Test that one sentence can never be significant."""
    result = randomized_comparator(_report([2]), _report([0]))
    assert result.p_value == 1.0


def test_strict_dominance():
    """Test the exact p-value when one system wins every sentence equally."""
    result = randomized_comparator(_report([2] * 10), _report([1] * 10), Metric.LAS)
    assert result.exact
    assert result.iterations == 1023
    assert result.seed is None
    assert result.p_value == pytest.approx(2 / 1024)
    assert result.observed == pytest.approx(50.0)


def test_sampled_comparison_is_seeded_and_symmetric():
    """Test reproducibility and symmetry of the sampled test."""
    rng = random.Random(2)
    a = _report([rng.randint(0, 2) for _ in range(40)])
    b = _report([rng.randint(0, 2) for _ in range(40)])
    first = randomized_comparator(a, b, Metric.UAS, iterations=2000, seed=5)
    again = randomized_comparator(a, b, Metric.UAS, iterations=2000, seed=5)
    swapped = randomized_comparator(b, a, Metric.UAS, iterations=2000, seed=5)

    assert not first.exact
    assert first.iterations == 2000
    assert first.p_value == again.p_value == swapped.p_value
    assert 1 / 2001 <= first.p_value <= 1.0


def test_sampled_dominance_is_significant():
    """Test that a large consistent gain gets a small sampled p-value."""
    result = randomized_comparator(_report([2] * 30), _report([0] * 30), iterations=1000, seed=1)
    assert result.p_value == pytest.approx(1 / 1001)


def test_comparator_errors():
    """Test invalid iteration counts and incomparable reports."""
    with pytest.raises(DataError):
        randomized_comparator(_report([1]), _report([0]), iterations=0)
    with pytest.raises(AlignmentError):
        randomized_comparator(_report([1], digest="x"), _report([0], digest="y"))
    with pytest.raises(AlignmentError):
        randomized_comparator(_report([1, 1]), _report([1]))


def test_benjamini_hochberg_step_up():
    """Test the step-up rule on a small list."""
    assert benjamini_hochberg([0.001, 0.02, 0.04, 0.6], q=0.05) == {0, 1}
    assert benjamini_hochberg([0.6, 0.04, 0.001, 0.02], q=0.05) == {2, 3}
    assert benjamini_hochberg([1.0, 1.0, 1.0], q=0.05) == set()
    assert benjamini_hochberg([0.05], q=0.05) == {0}
    assert benjamini_hochberg([]) == set()


def test_benjamini_hochberg_is_monotone():
    """Test that lowering a p-value never removes rejections."""
    rng = random.Random(21)
    for _ in range(200):
        values = [rng.uniform(0.0001, 1.0) for _ in range(rng.randint(1, 12))]
        rejected = benjamini_hochberg(values, q=0.2)
        index = rng.randrange(len(values))
        lowered = list(values)
        lowered[index] = values[index] / 2
        assert rejected <= benjamini_hochberg(lowered, q=0.2)


def test_benjamini_hochberg_errors():
    """Test invalid rates and p-values."""
    with pytest.raises(DataError):
        benjamini_hochberg([0.1], q=1.5)
    with pytest.raises(DataError):
        benjamini_hochberg([0.0])
    with pytest.raises(DataError):
        benjamini_hochberg([1.2])


def test_annotations():
    """Test the four cell marks."""
    assert annotate(1.5, True) == "++"
    assert annotate(1.5, False) == "+"
    assert annotate(0.0, False) == "+"
    assert annotate(-0.3, False) == "-"
    assert annotate(-0.3, True) == "--"


def _cells():
    return [
        GridCell(eval_lang="en", partner="en", mono_las=80.0, mono_uas=85.0, las=80.0, uas=85.0),
        GridCell(eval_lang="en", partner="es", mono_las=80.0, mono_uas=85.0, las=82.0, uas=84.0,
                 p_las=0.01, p_uas=0.30, fdr_las=False, fdr_uas=False),
        GridCell(eval_lang="es", partner="es", mono_las=70.0, mono_uas=75.0, las=70.0, uas=75.0),
        GridCell(eval_lang="es", partner="en", mono_las=70.0, mono_uas=75.0, las=65.5, uas=76.0,
                 p_las=0.001, p_uas=0.04, fdr_las=True, fdr_uas=False),
    ]


def test_grid_report_table():
    """Test the table layout and the raw marks."""
    frame = grid_report(_cells(), ["en", "es"], Metric.LAS, "raw")
    assert frame.loc["en", "en"] == "80.00"
    assert frame.loc["en", "es"] == "82.00 ++"
    assert frame.loc["es", "en"] == "65.50 --"
    assert frame.loc["es", "es"] == "70.00"

    uas = grid_report(_cells(), ["en", "es"], Metric.UAS, "raw")
    assert uas.loc["en", "es"] == "84.00 -"
    assert uas.loc["es", "en"] == "76.00 ++"


def test_grid_report_fdr_marks():
    """Test that corrected marks follow the rejection flags."""
    frame = grid_report(_cells(), ["en", "es"], Metric.LAS, "fdr")
    assert frame.loc["en", "es"] == "82.00 +"
    assert frame.loc["es", "en"] == "65.50 --"


def test_grid_summary_counts():
    """Test annotation counts over off-diagonal cells."""
    raw = grid_summary(_cells(), Metric.LAS, "raw")
    assert (raw.cells, raw.significant_gains, raw.gains, raw.losses, raw.significant_losses) == (2, 1, 0, 0, 1)
    assert raw.not_significantly_worse == 1

    fdr = grid_summary(_cells(), Metric.UAS, "fdr")
    assert (fdr.cells, fdr.significant_gains, fdr.gains, fdr.losses, fdr.significant_losses) == (2, 0, 1, 1, 0)
    assert fdr.not_significantly_worse == 2
