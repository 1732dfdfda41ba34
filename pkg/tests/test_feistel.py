import itertools
import random
from fractions import Fraction

import pytest

from cryptkit.feistel import (
    DiffProbResult,
    FeistelParams,
    MATRIX_A1,
    MATRIX_A2,
    TooLarge,
    branch_number,
    diff_distribution,
    diff_probability,
    encrypt,
    matrix_apply,
    one_round_diff_images,
    random_sbox,
    round_encrypt,
    round_is_permutation,
    sbox_flags,
    verify_impossible,
    verify_xor_class_invariant,
    verify_pair_class_invariant,
    w_eps_set,
    w_pair_set,
)

IDENTITY = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def params(m, matrix, sbox_seed=1, rounds=1, sbox=None):
    table = sbox if sbox is not None else random_sbox(m, sbox_seed)
    return FeistelParams(m, matrix, table, rounds)


# ---------------------------------------------------------------------------
# round mechanics


def test_zero_fixed_point():
    p = params(2, IDENTITY, sbox=(0, 1, 2, 3))
    assert round_encrypt((0, 0, 0, 0), (0, 0), p) == (0, 0, 0, 0)


def test_matrix_row_actions_match_expansions():
    for _ in range(50):
        rng = random.Random(_)
        x3, x2, x1, x0 = (rng.randrange(16) for _ in range(4))
        assert matrix_apply(MATRIX_A1, (x3, x2, x1, x0)) == (
            x3 ^ x2 ^ x0,
            x3 ^ x1 ^ x0,
            x2 ^ x1 ^ x0,
            x3 ^ x2 ^ x1,
        )
        assert matrix_apply(MATRIX_A2, (x3, x2, x1, x0)) == (
            x3 ^ x2 ^ x1,
            x3 ^ x2 ^ x0,
            x3 ^ x1 ^ x0,
            x2 ^ x1 ^ x0,
        )


def test_encrypt_is_round_composition():
    p1 = params(3, MATRIX_A1, rounds=1)
    p2 = params(3, MATRIX_A1, rounds=2)
    rng = random.Random(17)
    for _ in range(20):
        block = tuple(rng.randrange(8) for _ in range(4))
        keys = [(rng.randrange(8), rng.randrange(8)) for _ in range(2)]
        one = round_encrypt(block, keys[0], p1)
        assert encrypt(block, keys, p2) == round_encrypt(one, keys[1], p2)


def test_round_keys_length_checked():
    p = params(2, MATRIX_A1, rounds=3)
    with pytest.raises(ValueError):
        encrypt((0, 0, 0, 0), [(0, 0)], p)


GOLDEN_SBOX = (6, 6, 3, 2, 3, 3, 2, 1)  # random_sbox(3, 99)
GOLDEN_KEYS = [(6, 2), (0, 6), (6, 5), (4, 2), (7, 0)]
GOLDEN_A1 = [
    ((7, 2, 2, 7), (3, 4, 6, 4)),
    ((1, 0, 2, 2), (5, 2, 6, 6)),
    ((2, 5, 1, 2), (1, 6, 2, 5)),
    ((3, 3, 7, 0), (6, 0, 2, 4)),
]
GOLDEN_A2 = [
    ((7, 2, 2, 7), (3, 5, 4, 5)),
    ((1, 0, 2, 2), (3, 1, 3, 6)),
    ((2, 5, 1, 2), (2, 4, 1, 7)),
    ((3, 3, 7, 0), (5, 0, 6, 0)),
]


def test_golden_vectors():
    assert random_sbox(3, 99) == GOLDEN_SBOX
    pa = FeistelParams(3, MATRIX_A1, GOLDEN_SBOX, 5)
    pb = FeistelParams(3, MATRIX_A2, GOLDEN_SBOX, 5)
    for block, expected in GOLDEN_A1:
        assert encrypt(block, GOLDEN_KEYS, pa) == expected
    for block, expected in GOLDEN_A2:
        assert encrypt(block, GOLDEN_KEYS, pb) == expected


def test_round_is_permutation_for_any_sbox():
    rng = random.Random(3)
    for m in (1, 2, 3):
        for matrix in (MATRIX_A1, MATRIX_A2):
            table = tuple(rng.randrange(1 << m) for _ in range(1 << m))  # not bijective
            p = FeistelParams(m, matrix, table, 1)
            key = (rng.randrange(1 << m), rng.randrange(1 << m))
            assert round_is_permutation(p, key)


def test_branch_numbers_are_maximal():
    assert branch_number(MATRIX_A1) == 4
    assert branch_number(MATRIX_A2) == 4
    assert branch_number(IDENTITY) == 2
    # 4 is the best any binary 4x4 matrix achieves (5 would need MDS)
    best = max(
        branch_number(tuple(tuple(v >> (4 * r + c) & 1 for c in range(4)) for r in range(4)))
        for v in random.Random(8).sample(range(1 << 16), 2000)
    )
    assert best <= 4


def test_sbox_flags():
    assert sbox_flags((0, 1, 2, 3), 2) == {"bijective": True, "affine": True}
    assert sbox_flags((0, 0, 0, 0), 2) == {"bijective": False, "affine": True}
    assert sbox_flags((0, 1, 2, 2), 2)["bijective"] is False


# ---------------------------------------------------------------------------
# structural reduction correctness

def _full_trace_one_round_diffs(delta, p):
    """Oracle: every output difference over every (input, round key) pair."""
    size = 1 << p.m
    seen = set()
    for block in itertools.product(range(size), repeat=4):
        for key in itertools.product(range(size), repeat=2):
            a = round_encrypt(block, key, p)
            b = round_encrypt(tuple(x ^ d for x, d in zip(block, delta)), key, p)
            seen.add(tuple(x ^ y for x, y in zip(a, b)))
    return seen


def test_offset_reduction_equals_full_trace():
    # the (u, w) offset grid reproduces exactly the differences seen over all
    # (input, key) pairs; this justifies the structural verifier
    rng = random.Random(77)
    for m in (1, 2):
        for matrix in (MATRIX_A1, MATRIX_A2):
            p = params(m, matrix, sbox_seed=rng.randrange(100))
            for _ in range(4):
                delta = tuple(rng.randrange(1 << m) for _ in range(4))
                if delta == (0, 0, 0, 0):
                    continue
                imgs = one_round_diff_images(delta, p)
                reduced = {tuple(int(v) for v in imgs[u, w]) for u in range(1 << m) for w in range(1 << m)}
                assert reduced == _full_trace_one_round_diffs(delta, p)


# ---------------------------------------------------------------------------
# differential probabilities


def test_linear_cipher_identity_difference():
    # zero sbox and identity matrix move every difference through unchanged
    p = FeistelParams(2, IDENTITY, (0, 0, 0, 0), 1)
    res = diff_probability((1, 2, 3, 0), (1, 2, 3, 0), p)
    assert res.probability == 1
    assert res.exhaustive


def test_diff_probability_sums_to_one():
    cases = [
        params(1, MATRIX_A1, rounds=2),
        params(2, MATRIX_A1, rounds=2),
        params(2, MATRIX_A2, rounds=1),
        params(3, MATRIX_A2, rounds=1),
    ]
    rng = random.Random(5)
    for p in cases:
        size = 1 << p.m
        delta = tuple(rng.randrange(size) for _ in range(4))
        if delta == (0, 0, 0, 0):
            delta = (1, 0, 0, 0)
        counts, total, exhaustive = diff_distribution(delta, p)
        assert exhaustive
        assert Fraction(int(counts.sum()), total) == 1
        # nonzero input difference through a permutation never collapses
        assert counts[0] == 0


def test_invariant_class_membership_sum_is_one():
    # instance of the probability-1 claim: summed over the target set, mass is 1
    p = params(2, MATRIX_A1, rounds=2, sbox_seed=9)
    wset = set(w_eps_set(2, 0))
    for delta in [(1, 0, 1, 0), (2, 3, 2, 1)]:
        assert delta in wset
        counts, total, _ = diff_distribution(delta, p)
        mass = sum(
            Fraction(int(counts[(e3 << 6) | (e2 << 4) | (e1 << 2) | e0]), total)
            for (e3, e2, e1, e0) in wset
        )
        assert mass == 1


def test_cross_class_pairs_have_zero_probability():
    p = params(2, MATRIX_A1, rounds=2, sbox_seed=10)
    for delta in [(1, 0, 1, 2), (3, 1, 3, 0)]:  # members of W(0)
        for eps in [(1, 0, 0, 0), (2, 1, 3, 1)]:  # members of W(1)
            res = diff_probability(delta, eps, p)
            assert res.probability == 0


def test_pair_class_impossible_complement():
    p = params(2, MATRIX_A2, rounds=2, sbox_seed=11)
    outside = [(1, 0, 0, 0), (2, 1, 3, 0)]  # not of the shape (0,d,d,t)
    for delta in [(0, 1, 1, 0), (0, 3, 3, 2)]:
        for eps in outside:
            assert diff_probability(delta, eps, p).probability == 0
    rep = verify_impossible(w_pair_set(2), outside, p)
    assert rep.passed


def test_sampled_mode_is_flagged():
    p = params(3, MATRIX_A1, rounds=3)
    res = diff_probability((1, 0, 1, 0), (1, 0, 1, 0), p, keys=50, seed=4)
    assert not res.exhaustive
    assert res.total == 50 * (1 << 12)


def test_exhaustive_work_bound():
    p = params(3, MATRIX_A1, rounds=3)
    with pytest.raises(TooLarge):
        diff_probability((1, 0, 1, 0), (1, 0, 1, 0), p, work_bound=1 << 20)


# ---------------------------------------------------------------------------
# invariant verification


def test_xor_class_invariant_small_sweep():
    for m in (1, 2):
        for rounds in (1, 2, 3):
            for seed in range(3):
                p = params(m, MATRIX_A1, sbox_seed=seed, rounds=rounds)
                for eps in range(1 << m):
                    rep = verify_xor_class_invariant(p, eps)
                    assert rep.passed, (m, rounds, seed, eps, rep.counterexample)


def test_exhaustive_layer_runs_when_cheap():
    rep = verify_xor_class_invariant(params(1, MATRIX_A1, rounds=1), 1)
    assert "exhaustive" in rep.layers and rep.passed


def test_pair_class_invariant_small_sweep():
    for m in (1, 2, 3):
        for rounds in (1, 2, 3):
            p = params(m, MATRIX_A2, sbox_seed=rounds, rounds=rounds)
            rep = verify_pair_class_invariant(p)
            assert rep.passed, (m, rounds, rep.counterexample)


def test_wrong_matrix_fails_with_counterexample():
    p = params(2, MATRIX_A2, sbox_seed=5, rounds=1)
    rep = verify_xor_class_invariant(p, 1)
    assert not rep.passed
    cex = rep.counterexample
    # the witness is a concrete (block, key, difference) triple
    block, key, delta = cex["input_block"], cex["round_key"], cex["input_difference"]
    mate = tuple(b ^ d for b, d in zip(block, delta))
    out_diff = tuple(
        a ^ b for a, b in zip(round_encrypt(block, key, p), round_encrypt(mate, key, p))
    )
    assert out_diff == tuple(cex["output_difference"])
    assert out_diff[0] ^ out_diff[2] != 1 or out_diff == (0, 0, 0, 0)

    p1 = params(2, MATRIX_A1, sbox_seed=5, rounds=1)
    assert not verify_pair_class_invariant(p1).passed


def test_w_sets_shapes():
    assert len(w_eps_set(2, 0)) == 63
    assert len(w_eps_set(2, 1)) == 64
    assert len(w_pair_set(2)) == 15
    assert all(a3 ^ a1 == 1 for a3, _, a1, _ in w_eps_set(2, 1))
    assert all(d == dd and a == 0 for a, d, dd, _ in w_pair_set(2))


def test_diff_prob_result_type():
    p = params(1, MATRIX_A1, rounds=1)
    res = diff_probability((1, 0, 1, 0), (1, 1, 1, 1), p)
    assert isinstance(res, DiffProbResult)
    assert isinstance(res.probability, Fraction)
