from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import full_tree_select, quantize_weights_transcription
from scmux.muxtree import (
    BiasedSelectorTreeSpec,
    biased_leaf_path_products,
    build_biased_selector_tree,
    build_hardwired_tree,
    dump_tree,
    precise_sampling_counts,
    quantize_weights,
    select_leaf_noisy,
    select_leaf_precise,
)
from scmux.sngen import PccKind

weight_lists = st.lists(
    st.floats(-1.0, 1.0).filter(lambda x: abs(x) > 1e-12), min_size=1, max_size=24
)


def test_quantize_examples():
    assert quantize_weights([1 / 2, 3 / 8, 1 / 8], 3).numerators == (4, 3, 1)
    assert quantize_weights([7 / 16, 1 / 4, 1 / 4, 1 / 16], 4).numerators == (7, 4, 4, 1)
    q = quantize_weights([-1 / 2, 3 / 8, 1 / 8], 3)
    assert q.numerators == (4, 3, 1)
    assert q.signs == (-1, 1, 1)


def test_quantize_decrement_loop_case():
    w = [0.375, 0.375, 0.25]
    q = quantize_weights(w, 1)
    assert q.numerators == tuple(quantize_weights_transcription(w, 1))
    assert sum(q.numerators) == 2


def test_quantize_errors():
    with pytest.raises(ValueError):
        quantize_weights([0.0, 0.0], 3)
    with pytest.raises(ValueError):
        quantize_weights([], 3)


@settings(max_examples=400, deadline=None)
@given(weight_lists, st.integers(1, 12))
def test_quantize_matches_transcription_and_sums(w, m):
    q = quantize_weights(w, m)
    assert sum(q.numerators) == 1 << m
    assert q.numerators == tuple(quantize_weights_transcription(w, m))
    assert all(n >= 0 for n in q.numerators)


def test_tree_level_assignment_matches_binary_expansions():
    q = quantize_weights([7 / 16, 1 / 4, 1 / 4, 1 / 16], 4)
    tree = build_hardwired_tree(q)
    assert tree.level_inputs == ((), (0, 1, 2), (0,), (0, 3))
    assert tree.mux_count == 5  # six 1-bits total, minus one


def test_single_input_tree_has_no_muxes():
    q = quantize_weights([0.7], 3)
    tree = build_hardwired_tree(q)
    assert tree.mux_count == 0
    assert all(select_leaf_precise(tree, w) == 0 for w in range(8))


def test_equal_four_way_tree_counts():
    q = quantize_weights([1, 1, 1, 1], 2)
    tree = build_hardwired_tree(q)
    owners = [select_leaf_precise(tree, w) for w in range(4)]
    assert sorted(owners) == [0, 1, 2, 3]


def test_precise_counts_eq15():
    q = quantize_weights([7 / 16, 1 / 4, 1 / 4, 1 / 16], 4)
    tree = build_hardwired_tree(q)
    counts = np.bincount(tree.owner, minlength=4)
    assert counts.tolist() == [7, 4, 4, 1]
    assert precise_sampling_counts(q, 16).tolist() == [7, 4, 4, 1]


@settings(max_examples=200, deadline=None)
@given(weight_lists, st.integers(1, 8), st.integers(0, 2**16))
def test_precise_sampling_exact_any_phase(w, h, phase):
    q = quantize_weights(w, h)
    tree = build_hardwired_tree(q)
    n_cycles = 4 << h
    words = (phase + np.arange(n_cycles)) % (1 << h)
    counts = np.bincount(tree.owner[words], minlength=len(w))
    assert counts.tolist() == list(precise_sampling_counts(q, n_cycles))


@settings(max_examples=200, deadline=None)
@given(weight_lists, st.integers(1, 8))
def test_ddg_routing_fractions_exact(w, h):
    q = quantize_weights(w, h)
    tree = build_hardwired_tree(q)
    counts = np.bincount(tree.owner, minlength=len(w))
    assert counts.tolist() == list(q.numerators)


@settings(max_examples=150, deadline=None)
@given(weight_lists, st.integers(1, 6), st.data())
def test_select_matches_full_tree_oracle(w, h, data):
    q = quantize_weights(w, h)
    tree = build_hardwired_tree(q)
    word = data.draw(st.integers(0, (1 << h) - 1))
    assert select_leaf_precise(tree, word) == full_tree_select(q.numerators, h, word)
    assert tree.owner[word] == select_leaf_precise(tree, word)


def test_select_noisy_matches_word_traversal():
    q = quantize_weights([5 / 8, 1 / 4, 1 / 8], 3)
    tree = build_hardwired_tree(q)
    for word in range(8):
        bits = [(word >> (3 - lvl)) & 1 for lvl in (1, 2, 3)]
        assert select_leaf_noisy(tree, bits) == select_leaf_precise(tree, word)


def test_select_noisy_binomial_mean():
    q = quantize_weights([0.5, 0.5], 1)
    tree = build_hardwired_tree(q)
    rng = np.random.default_rng(3)
    n_cycles, reps = 64, 400
    counts = np.array(
        [
            sum(select_leaf_noisy(tree, [int(b)]) == 0 for b in rng.integers(0, 2, n_cycles))
            for _ in range(reps)
        ],
        dtype=float,
    )
    se = np.sqrt(n_cycles * 0.25 / reps)
    assert abs(counts.mean() - n_cycles / 2) < 3 * se


def test_mux_count_bound():
    rng = np.random.default_rng(5)
    for _ in range(200):
        m_inputs = int(rng.integers(1, 20))
        h = int(rng.integers(1, 9))
        w = rng.uniform(-1, 1, m_inputs)
        if not np.any(w):
            continue
        q = quantize_weights(w, h)
        tree = build_hardwired_tree(q)
        popcount = sum(bin(x).count("1") for x in q.numerators)
        assert tree.mux_count == popcount - 1
        assert tree.mux_count <= min(m_inputs * h - 1, (1 << h) - 1)


def test_biased_tree_example_grouping():
    q = quantize_weights([1 / 2, 3 / 8, 1 / 8], 3)
    tree = build_biased_selector_tree(q, PccKind.COMPARATOR, "lfsr", 8)
    prods = biased_leaf_path_products(tree)
    assert prods == {0: Fraction(1, 2), 1: Fraction(3, 8), 2: Fraction(1, 8)}
    root = tree.root
    assert tree.probabilities[root] == Fraction(4, 8)  # toward input 0
    inner = int(tree.child1[root])
    assert tree.probabilities[inner] == Fraction(3, 4)  # toward input 1


def test_biased_tree_equal_weights_all_half():
    q = quantize_weights([1, 1, 1, 1], 4)
    tree = build_biased_selector_tree(q, PccKind.COMPARATOR, "lfsr", 8)
    assert all(p == Fraction(1, 2) for p in tree.probabilities)


@settings(max_examples=200, deadline=None)
@given(weight_lists, st.integers(2, 8))
def test_biased_path_products_recover_quantized_weights(w, h):
    q = quantize_weights(w, h)
    try:
        tree = build_biased_selector_tree(q, PccKind.COMPARATOR, "lfsr", 8)
    except ValueError:
        return
    prods = biased_leaf_path_products(tree)
    assert sum(prods.values()) == 1
    for i, num in enumerate(q.numerators):
        if num > 0:
            assert prods[i] == Fraction(num, q.denominator)


def test_biased_zero_weight_inputs_dropped():
    q = quantize_weights([0.5, 1e-9, 0.5], 2)
    assert q.numerators == (2, 0, 2)
    tree = build_biased_selector_tree(q, PccKind.COMPARATOR, "lfsr", 8)
    assert 1 not in biased_leaf_path_products(tree)


def test_dump_tree_format():
    q = quantize_weights([7 / 16, 1 / 4, 1 / 4, 1 / 16], 4)
    text = dump_tree(build_hardwired_tree(q))
    assert text.splitlines() == [
        "height 4",
        "inputs 4",
        "level 1:",
        "level 2: 0 1 2",
        "level 3: 0",
        "level 4: 0 3",
        "muxes 5",
    ]
