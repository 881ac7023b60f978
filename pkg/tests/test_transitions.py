"""Tests for the transition systems and their static oracles."""

import itertools
import random

import pytest

from app.core.exceptions import IllegalTransitionError, NonProjectiveError
from app.schemas.treebank import Sentence, Token
from app.utils.conll_io import attach_extra_roots, is_tree
from app.utils.transitions import (
    REDUCE,
    SHIFT,
    Configuration,
    Transition,
    TransitionSystem,
    apply,
    extract_tree,
    initial_config,
    is_terminal,
    left_arc,
    legal_transitions,
    right_arc,
    static_oracle,
    transition_inventory,
)
from app.utils.treebank_ops import heads_are_projective, projectivize_heads

EAGER = TransitionSystem.ARC_EAGER
STANDARD = TransitionSystem.ARC_STANDARD


def _sentence(heads, labels=None) -> Sentence:
    labels = labels or ["root" if head == 0 else "dep" for head in heads]
    return Sentence(
        tokens=tuple(
            Token(id=i, form=f"w{i}", cpostag="X", postag="X", head=head, deprel=label)
            for i, (head, label) in enumerate(zip(heads, labels), start=1)
        )
    )


def _projective_trees(n):
    for heads in itertools.product(range(n + 1), repeat=n):
        if is_tree(heads) and heads_are_projective(heads):
            yield list(heads)


def _replay(sentence, system):
    config = initial_config(sentence)
    for transition in static_oracle(sentence, system):
        config = apply(config, transition, system)
    assert is_terminal(config, system)
    return config


def test_initial_config():
    """Test stack and buffer of a fresh configuration."""
    config = initial_config(_sentence([2, 0, 2]))
    assert config.stack == (0,)
    assert config.buffer == (1, 2, 3)
    assert config.arcs == frozenset()


def test_empty_sentence_is_terminal():
    """Test that a sentence without tokens starts terminal."""
    config = initial_config(Sentence(tokens=()))
    assert config.buffer == ()
    assert is_terminal(config, EAGER)
    assert is_terminal(config, STANDARD)


def test_inventory_order():
    """Test the canonical class order of both systems."""
    assert transition_inventory(EAGER, ["b", "a"]) == [
        SHIFT, REDUCE, left_arc("a"), left_arc("b"), right_arc("a"), right_arc("b"),
    ]
    assert transition_inventory(STANDARD, ["a"]) == [SHIFT, left_arc("a"), right_arc("a")]


def test_signature_round_trip():
    """Test signatures of plain and labeled transitions."""
    for transition in (SHIFT, REDUCE, left_arc("nsubj"), right_arc("root")):
        assert Transition.from_signature(transition.signature) == transition
    assert left_arc("nsubj").signature == "LEFT_ARC:nsubj"


def test_eager_initial_legal_set():
    """Test that only SHIFT and RIGHT_ARC are legal from the initial configuration."""
    config = initial_config(_sentence([2, 0]))
    legal = legal_transitions(config, EAGER, ["a", "b"])
    assert legal == [SHIFT, right_arc("a"), right_arc("b")]


def test_eager_empty_buffer_has_no_moves():
    """Test that arc-eager stops once the buffer is empty."""
    config = Configuration((0, 1), (), {1: 0}, {1: "root"})
    assert legal_transitions(config, EAGER, ["root"]) == []
    assert is_terminal(config, EAGER)


def test_standard_two_item_stack():
    """Test that only RIGHT_ARC is legal on [0, 1] with an empty buffer."""
    config = Configuration((0, 1), (), {}, {})
    assert legal_transitions(config, STANDARD, ["x", "y"]) == [right_arc("x"), right_arc("y")]
    assert not is_terminal(config, STANDARD)


def test_apply_right_arc_from_root():
    """Test the arc-eager RIGHT_ARC from the artificial root."""
    config = initial_config(_sentence([0]))
    successor = apply(config, right_arc("root"), EAGER)
    assert successor.stack == (0, 1)
    assert successor.buffer == ()
    assert successor.arcs == frozenset({(0, 1, "root")})
    assert config.stack == (0,)


def test_reduce_on_headless_top():
    """Test that REDUCE needs a headed stack top."""
    config = Configuration((0, 1), (2,), {}, {})
    with pytest.raises(IllegalTransitionError):
        apply(config, REDUCE, EAGER)


def test_left_arc_on_root():
    """Test that the artificial root never becomes a dependent."""
    config = initial_config(_sentence([0, 1]))
    with pytest.raises(IllegalTransitionError):
        apply(config, left_arc("dep"), EAGER)


def test_oracle_examples():
    """Test oracle sequences on hand-traced sentences."""
    assert static_oracle(_sentence([0]), EAGER) == [right_arc("root")]
    assert static_oracle(_sentence([2, 0], ["nsubj", "root"]), EAGER) == [
        SHIFT, left_arc("nsubj"), right_arc("root"),
    ]
    assert static_oracle(_sentence([0, 1]), EAGER) == [right_arc("root"), right_arc("dep")]
    assert static_oracle(_sentence([2, 0], ["nsubj", "root"]), STANDARD) == [
        SHIFT, SHIFT, left_arc("nsubj"), right_arc("root"),
    ]


def test_oracle_needs_projective_tree(crossing_sentence):
    """Test that the oracle refuses crossing arcs."""
    with pytest.raises(NonProjectiveError):
        static_oracle(crossing_sentence, EAGER)


def test_extract_tree():
    """Test heads and the root fallback for unattached tokens."""
    config = Configuration((0, 1), (), {1: 0}, {1: "root"})
    assert extract_tree(config, 1) == ([0], ["root"])
    assert extract_tree(config, 2) == ([0, 0], ["root", "root"])


@pytest.mark.parametrize("system", [EAGER, STANDARD])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_oracle_rebuilds_every_projective_tree(system, n):
    """Test the oracle replay against all projective trees up to five tokens."""
    count = 0
    for heads in _projective_trees(n):
        labels = [f"l{head}" for head in heads]
        sentence = _sentence(heads, labels)
        config = _replay(sentence, system)
        assert extract_tree(config, n) == (heads, labels)
        count += 1
    # single-rooted projective trees over n tokens
    assert count == {1: 1, 2: 2, 3: 7, 4: 30, 5: 143}[n]


@pytest.mark.parametrize("system", [EAGER, STANDARD])
def test_oracle_on_random_long_sentences(system, tree_factory):
    """Test oracle replay and the 2n step bound on random projective trees up to 40 tokens."""
    rng = random.Random(17)
    for _ in range(300):
        n = rng.randint(1, 40)
        heads = projectivize_heads(tree_factory(rng, n))
        labels = [rng.choice(["a", "b", "c"]) for _ in heads]
        sentence = _sentence(heads, labels)
        transitions = static_oracle(sentence, system)
        assert len(transitions) <= 2 * n
        if system == STANDARD:
            assert len(transitions) == 2 * n
        config = _replay(sentence, system)
        assert extract_tree(config, n) == (heads, labels)


def _check_invariants(config, n, system):
    assert config.stack[0] == 0
    assert 0 not in config.stack[1:]
    assert config.buffer == tuple(range(n - len(config.buffer) + 1, n + 1))
    assert not set(config.stack) & set(config.buffer)
    assert set(config.heads) == set(config.labels)
    assert 0 not in config.heads
    assert not set(config.heads) & set(config.buffer)
    if system == STANDARD:
        assert not set(config.heads) & set(config.stack)
    for token in config.heads:
        seen = {token}
        while token in config.heads:
            token = config.heads[token]
            assert token not in seen
            seen.add(token)


@pytest.mark.parametrize("system", [EAGER, STANDARD])
def test_random_legal_walks(system):
    """Test that any sequence of legal moves keeps the configuration well formed and ends a tree."""
    rng = random.Random(23)
    labels = ["a", "b"]
    for _ in range(500):
        n = rng.randint(0, 15)
        config = initial_config(_sentence([0] + [1] * (n - 1)) if n else Sentence(tokens=()))
        steps = 0
        while not is_terminal(config, system):
            legal = legal_transitions(config, system, labels)
            assert legal
            config = apply(config, rng.choice(legal), system)
            steps += 1
            _check_invariants(config, n, system)
            assert steps <= 2 * n
        heads, _ = extract_tree(config, n)
        if n:
            repaired = attach_extra_roots(heads)
            assert is_tree(repaired)
            assert repaired.count(0) == 1
