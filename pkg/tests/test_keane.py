import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from keanelab.keane import (BitBudgetError, ParamSeq, SequenceError, column_mass, generate,
                            keane_matrix, length_vector, level_data, level_masses, level_weights,
                            mass_bounds, product_matrix, validate_sequence)
from keanelab.numerics import column, identity, l1_norm, mat_vec, basis
from oracles import a_matrix, minimal_pairs, product


def test_keane_matrix_displayed_form():
    assert keane_matrix(1, 1) == ((0, 0, 1, 1), (0, 1, 0, 0), (1, 1, 0, 1), (1, 1, 1, 1))
    assert keane_matrix(33, 10) == ((0, 0, 1, 1), (32, 33, 0, 0), (10, 10, 9, 10), (1, 1, 1, 1))
    assert column(keane_matrix(7, 4), 2) == (0, 7, 4, 1)
    with pytest.raises(SequenceError):
        keane_matrix(0, 3)


def test_generators():
    assert generate("minimal", 3).pairs == ((33, 10), (198, 65), (1188, 395))
    assert generate("theorem4", 2).pairs == ((81, 9), (531441, 6561))
    seq = generate("theorem3", 6, r=2)
    assert all(seq.m(k) >= k * k * seq.n(k) for k in range(1, 7))
    assert seq.r == 2


def test_corollary1_generator_hypotheses(corollary1):
    seq = corollary1
    for k in range(1, seq.depth):
        b = column_mass(seq, k, 2)
        assert seq.n(k + 1) >= (b * 2 ** k) ** k * seq.m(k)
        assert seq.m(k) <= F(seq.n(k + 1) + 1, 2)
    assert validate_sequence(seq).ok


def test_bit_budget():
    with pytest.raises(BitBudgetError) as info:
        generate("corollary1", 6, bit_budget=10_000)
    assert info.value.k == 6
    with pytest.raises(BitBudgetError):
        generate("theorem4", 12, bit_budget=10_000)


def test_validate_minimal_is_tight():
    v = validate_sequence(generate("minimal", 3))
    assert v.ok and v.n1_ok
    assert [c.lower_slack for c in v.levels] == [0, 0, 0]
    assert [c.upper_slack for c in v.levels[:2]] == [0, 0]
    assert v.levels[-1].upper_ok is None


def test_validate_theorem4():
    v = validate_sequence(generate("theorem4", 4))
    assert not v.n1_ok and v.n1 == 9
    assert v.ratios_ok and not v.ok


def test_validate_failing_pair():
    v = validate_sequence(ParamSeq(((10, 10),)))
    assert not v.levels[0].lower_ok


def test_product_matrix():
    seq = generate("minimal", 4)
    assert product_matrix(seq, 0) == identity()
    assert product_matrix(seq, 1) == keane_matrix(33, 10)
    assert column(product_matrix(seq, 2), 2) == (66, 6534, 2575, 264)
    for k in range(5):
        assert product_matrix(seq, k) == tuple(map(tuple, product(seq.pairs[:k])))
    with pytest.raises(SequenceError):
        product_matrix(seq, 5)


def test_column_mass():
    seq = generate("minimal", 3)
    assert [column_mass(seq, 1, i) for i in (1, 2, 3, 4)] == [43, 44, 11, 12]
    assert column_mass(seq, 2, 2) == 9439
    assert [column_mass(seq, 0, i) for i in (1, 2, 3, 4)] == [1, 1, 1, 1]


def test_mass_bounds():
    seq = generate("minimal", 3)
    assert mass_bounds(seq, 2) == (6534, 11616)
    assert 6534 <= column_mass(seq, 2, 2) <= 11616
    assert mass_bounds(seq, 1) == (33, 44) and column_mass(seq, 1, 2) == 44
    t4 = generate("theorem4", 3)
    lo, hi = mass_bounds(t4, 2)
    assert (lo, hi) == (9 ** 8, 91 * (9 ** 6 + 9 ** 4 + 1))
    assert lo <= column_mass(t4, 2, 2) <= hi


def test_length_vector():
    seq = generate("minimal", 3)
    assert length_vector(seq, 2) == (F(65, 759), F(32, 759), F(596, 759), F(66, 759))
    with pytest.raises(SequenceError):
        length_vector(seq, 1)
    assert sum(length_vector(seq, 3)) == 1


def test_level_weights():
    seq = generate("minimal", 3)
    w2 = level_weights(seq, 1, 3, 2)
    assert w2 == tuple(F(x, 339769) for x in (396, 235224, 102565, 1584))
    assert w2[1] >= F(1, 3)
    assert level_weights(seq, 1, 3, 3)[1] == F(197, 26334)
    n3 = seq.n(3)
    assert level_weights(seq, 2, 3, 3) == (F(1, n3 + 1), 0, F(n3 - 1, n3 + 1), F(1, n3 + 1))
    oracle = product(seq.pairs[1:3])[:, 1]
    assert w2 == tuple(F(int(x), int(sum(oracle))) for x in oracle)


def test_level_masses_are_ambient_lengths(minimal):
    K = 5
    lengths = length_vector(minimal, K)
    for k in range(K):
        masses = level_masses(minimal, k, K, 3)
        # lambda(I_i) = sum_j (B_k)_{ij} lambda(I_j^(k))
        assert mat_vec(product_matrix(minimal, k), masses) == lengths


@pytest.mark.parametrize("kind", ["minimal", "theorem3"])
def test_column_dominance_and_sandwich(kind):
    seq = generate(kind, 6)
    for k in range(1, 7):
        b = [column_mass(seq, k, i) for i in (1, 2, 3, 4)]
        assert b[1] >= max(b[0], b[2], b[3])
        lo, hi = mass_bounds(seq, k)
        assert lo <= b[1] <= hi


def test_consistency_level_zero(minimal):
    for K in range(2, 6):
        assert level_weights(minimal, 0, K, 3) == length_vector(minimal, K)


def test_positive_lengths(minimal):
    for K in range(2, 7):
        assert all(x > 0 for x in length_vector(minimal, K))


def test_convergence_evidence(minimal):
    # reported, not rate-asserted: distances shrink with K for k = 1
    dist = []
    for K in range(3, 7):
        a, b = level_weights(minimal, 1, K, 2), level_weights(minimal, 1, K + 1, 2)
        dist.append(max(abs(x - y) for x, y in zip(a, b)))
    assert all(d1 > d2 for d1, d2 in zip(dist, dist[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(10, 10 ** 6), st.integers(1, 5))
def test_generated_minimal_style_sequences_validate(n1, depth):
    pairs, n = [], n1
    for _ in range(depth):
        m = 3 * (n + 1)
        pairs.append((m, n))
        n = 2 * m - 1
    seq = ParamSeq(tuple(pairs))
    assert validate_sequence(seq).ok
    for k in range(1, depth + 1):
        b = [column_mass(seq, k, i) for i in (1, 2, 3, 4)]
        assert b[1] >= max(b)


def test_level_data_and_json(minimal):
    d = level_data(minimal, 1, 4)
    assert d.masses == (43, 44, 11, 12)
    assert sum(d.lebesgue_weights) == 1 == sum(d.singular_weights)
    doc = generate("theorem4", 3).to_json()
    text = json.dumps(doc)
    assert doc["pairs"][0] == ["81", "9"] and doc["depth"] == "3"
    assert ParamSeq.from_json(json.loads(text)).pairs == generate("theorem4", 3).pairs


def test_explicit_pairs_equal_generator():
    seq = ParamSeq.from_json({"pairs": [["33", "10"], ["198", "65"]]})
    assert seq.pairs == generate("minimal", 2).pairs
    assert seq.pairs == tuple(minimal_pairs(2))
