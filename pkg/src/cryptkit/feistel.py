"""Four-line generalized Feistel cipher with a binary diffusion matrix, plus
exhaustive verification of its probability-1 and impossible differential sets.

A block is a tuple (x3, x2, x1, x0) of m-bit words.  One round XORs an S-box
of word 3 into word 2 and an S-box of word 1 into word 0, then applies a
binary 4x4 matrix word-wise (matrix rows act on the column vector
(x3, x2, x1, x0)).  Difference propagation through a round depends on the
input difference and on the two S-box input offsets u = x3 xor k1,
w = x1 xor k0 only, which is what the structural verifier enumerates; that
reduction is itself cross-checked against full (input, key) traces.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

# rows act on (x3, x2, x1, x0); both matrices have branch number 4, the
# maximum for binary 4x4
MATRIX_A1 = ((1, 1, 0, 1), (1, 0, 1, 1), (0, 1, 1, 1), (1, 1, 1, 0))
MATRIX_A2 = ((1, 1, 1, 0), (1, 1, 0, 1), (1, 0, 1, 1), (0, 1, 1, 1))

MATRICES = {"A1": MATRIX_A1, "A2": MATRIX_A2}


class TooLarge(ValueError):
    """Exhaustive enumeration would exceed the configured work bound."""


@dataclass(frozen=True)
class FeistelParams:
    m: int
    matrix: tuple[tuple[int, int, int, int], ...]
    sbox: tuple[int, ...]
    rounds: int = 1

    def __post_init__(self):
        if not 1 <= self.m <= 8:
            raise ValueError("word width m must be 1..8")
        if self.rounds < 1:
            raise ValueError("at least one round")
        if len(self.matrix) != 4 or any(len(r) != 4 for r in self.matrix):
            raise ValueError("matrix must be 4x4")
        if any(v not in (0, 1) for row in self.matrix for v in row):
            raise ValueError("matrix entries must be bits")
        size = 1 << self.m
        if len(self.sbox) != size or any(not 0 <= v < size for v in self.sbox):
            raise ValueError(f"sbox must map {size} words to {self.m}-bit words")

    @property
    def word_count(self) -> int:
        return 1 << self.m


def random_sbox(m: int, seed: int) -> tuple[int, ...]:
    rng = random.Random(seed)
    return tuple(rng.randrange(1 << m) for _ in range(1 << m))


def sbox_flags(sbox: tuple[int, ...], m: int) -> dict:
    """Whether the table is a permutation and whether it is affine over GF(2).

    The differential-set invariants hold for arbitrary tables, so these are
    reported rather than enforced.
    """
    bijective = len(set(sbox)) == len(sbox)
    base = sbox[0]
    lin = [sbox[x] ^ base for x in range(1 << m)]
    affine = all(
        lin[x ^ y] == lin[x] ^ lin[y] for x in range(1 << m) for y in range(1 << m)
    )
    return {"bijective": bijective, "affine": affine}


def _check_block(block, m: int):
    if len(block) != 4 or any(not 0 <= v < (1 << m) for v in block):
        raise ValueError(f"block must be four {m}-bit words")


def matrix_apply(matrix, words):
    """Word-wise GF(2) action: output r is the XOR of the selected words."""
    out = []
    for row in matrix:
        acc = 0
        for sel, w in zip(row, words):
            if sel:
                acc ^= w
        out.append(acc)
    return tuple(out)


def round_encrypt(block, key, params: FeistelParams):
    """One keyed round: the two S-box injections, then the matrix."""
    _check_block(block, params.m)
    k1, k0 = key
    x3, x2, x1, x0 = block
    b = params.sbox
    mid = (x3, x2 ^ b[x3 ^ k1], x1, x0 ^ b[x1 ^ k0])
    return matrix_apply(params.matrix, mid)


def encrypt(block, round_keys, params: FeistelParams):
    if len(round_keys) != params.rounds:
        raise ValueError(f"expected {params.rounds} round keys")
    for key in round_keys:
        block = round_encrypt(block, key, params)
    return block


def round_is_permutation(params: FeistelParams, key) -> bool:
    """Bijectivity check of one round by full enumeration (m <= 3)."""
    if params.m > 3:
        raise TooLarge("bijectivity check limited to m <= 3")
    size = 1 << params.m
    seen = set()
    for block in itertools.product(range(size), repeat=4):
        seen.add(round_encrypt(block, key, params))
    return len(seen) == size ** 4


def branch_number(matrix) -> int:
    """min over nonzero x of wt(x) + wt(Ax), with single-bit words."""
    best = 8
    for bits in range(1, 16):
        x = tuple(bits >> i & 1 for i in (3, 2, 1, 0))
        y = matrix_apply(matrix, x)
        best = min(best, sum(x) + sum(v != 0 for v in y))
    return best


# ---------------------------------------------------------------------------
# difference sets

def w_eps_set(m: int, eps: int):
    """All nonzero differences (a3, a2, a1, a0) with a3 xor a1 = eps."""
    size = 1 << m
    out = []
    for a3 in range(size):
        a1 = a3 ^ eps
        for a2 in range(size):
            for a0 in range(size):
                if (a3, a2, a1, a0) != (0, 0, 0, 0):
                    out.append((a3, a2, a1, a0))
    return out


def w_pair_set(m: int):
    """All nonzero differences of the shape (0, d, d, t)."""
    size = 1 << m
    return [
        (0, d, d, t)
        for d in range(size)
        for t in range(size)
        if (d, t) != (0, 0)
    ]


def _delta_table(sbox, m: int) -> np.ndarray:
    """db[t, u] = sbox(u) xor sbox(u xor t)."""
    size = 1 << m
    b = np.array(sbox, dtype=np.int64)
    u = np.arange(size)
    return b[np.newaxis, :] ^ b[u[np.newaxis, :] ^ u[:, np.newaxis]]


def one_round_diff_images(delta, params: FeistelParams) -> np.ndarray:
    """Output differences of one round over all S-box offsets (u, w).

    Returns an array of shape (2^m, 2^m, 4); entry [u, w] is the difference
    produced when the first S-box sees offset u and the second sees w, which
    together with the free words exhausts every (input, round key) pair.
    """
    m = params.m
    size = 1 << m
    d3, d2, d1, d0 = delta
    db = _delta_table(params.sbox, m)
    lam = d2 ^ db[d3]          # shape (size,): indexed by u
    omg = d0 ^ db[d1]          # shape (size,): indexed by w
    words = (
        np.broadcast_to(np.int64(d3), (size, size)),
        np.broadcast_to(lam[:, None], (size, size)),
        np.broadcast_to(np.int64(d1), (size, size)),
        np.broadcast_to(omg[None, :], (size, size)),
    )
    out = []
    for row in params.matrix:
        acc = np.zeros((size, size), dtype=np.int64)
        for sel, w in zip(row, words):
            if sel:
                acc = acc ^ w
        out.append(acc)
    return np.stack(out, axis=-1)


def reachable_difference_sets(start, params: FeistelParams) -> list[set]:
    """Per-round reachable difference sets starting from the given set.

    Exact for impossibility arguments: a difference outside round r's set
    cannot occur for any key/input after r rounds.
    """
    current = {tuple(d) for d in start}
    sets = [set(current)]
    for _ in range(params.rounds):
        nxt = set()
        for delta in current:
            imgs = one_round_diff_images(delta, params)
            nxt.update(map(tuple, imgs.reshape(-1, 4)))
        current = nxt
        sets.append(set(current))
    return sets


# ---------------------------------------------------------------------------
# differential probability

def _iter_round_keys(params: FeistelParams):
    size = 1 << params.m
    one_round = itertools.product(range(size), repeat=2)
    return itertools.product(one_round, repeat=params.rounds)


def _encrypt_vectorized(words, round_keys, params: FeistelParams):
    b = np.array(params.sbox, dtype=np.int64)
    x3, x2, x1, x0 = words
    for k1, k0 in round_keys:
        t2 = x2 ^ b[x3 ^ k1]
        t0 = x0 ^ b[x1 ^ k0]
        mid = (x3, t2, x1, t0)
        out = []
        for row in params.matrix:
            acc = np.zeros_like(x3)
            for sel, w in zip(row, mid):
                if sel:
                    acc = acc ^ w
            out.append(acc)
        x3, x2, x1, x0 = out
    return x3, x2, x1, x0


def _work_estimate(params: FeistelParams) -> int:
    return (1 << (4 * params.m)) * (1 << (2 * params.m * params.rounds))


DEFAULT_WORK_BOUND = 1 << 30


def diff_distribution(
    delta,
    params: FeistelParams,
    keys: str | int = "all",
    seed: int = 0,
    work_bound: int = DEFAULT_WORK_BOUND,
):
    """Histogram of output differences over inputs and round-key tuples.

    Returns (counts array indexed by packed difference, total pairs,
    exhaustive flag).  keys='all' enumerates every round-key tuple (subject
    to the work bound); an integer samples that many tuples with a seeded RNG.
    """
    _check_block(delta, params.m)
    m = params.m
    size = 1 << m
    n_inputs = size ** 4
    exhaustive = keys == "all"
    if exhaustive and _work_estimate(params) > work_bound:
        raise TooLarge(
            f"exhaustive mode needs {_work_estimate(params)} traces "
            f"(bound {work_bound}); use sampled keys"
        )

    grid = np.arange(n_inputs, dtype=np.int64)
    mask = size - 1
    x0 = grid & mask
    x1 = grid >> m & mask
    x2 = grid >> (2 * m) & mask
    x3 = grid >> (3 * m) & mask
    d3, d2, d1, d0 = delta

    if exhaustive:
        key_iter = _iter_round_keys(params)
        total_keys = (size * size) ** params.rounds
    else:
        rng = random.Random(seed)
        key_iter = [
            tuple(
                (rng.randrange(size), rng.randrange(size))
                for _ in range(params.rounds)
            )
            for _ in range(keys)
        ]
        total_keys = keys

    counts = np.zeros(n_inputs, dtype=np.int64)
    for round_keys in key_iter:
        a3, a2, a1, a0 = _encrypt_vectorized((x3, x2, x1, x0), round_keys, params)
        b3, b2, b1, b0 = _encrypt_vectorized(
            (x3 ^ d3, x2 ^ d2, x1 ^ d1, x0 ^ d0), round_keys, params
        )
        packed = (
            ((a3 ^ b3) << (3 * m))
            | ((a2 ^ b2) << (2 * m))
            | ((a1 ^ b1) << m)
            | (a0 ^ b0)
        )
        counts += np.bincount(packed, minlength=n_inputs)
    return counts, total_keys * n_inputs, exhaustive


@dataclass(frozen=True)
class DiffProbResult:
    probability: Fraction
    exhaustive: bool
    hits: int
    total: int


def diff_probability(
    delta,
    eps,
    params: FeistelParams,
    keys: str | int = "all",
    seed: int = 0,
    work_bound: int = DEFAULT_WORK_BOUND,
) -> DiffProbResult:
    """Keyed-average probability that input difference delta becomes eps."""
    _check_block(eps, params.m)
    counts, total, exhaustive = diff_distribution(delta, params, keys, seed, work_bound)
    m = params.m
    e3, e2, e1, e0 = eps
    packed = (e3 << (3 * m)) | (e2 << (2 * m)) | (e1 << m) | e0
    hits = int(counts[packed])
    return DiffProbResult(Fraction(hits, total), exhaustive, hits, total)


# ---------------------------------------------------------------------------
# invariant verification

@dataclass(frozen=True)
class VerifyReport:
    claim: str
    params_m: int
    rounds: int
    passed: bool
    layers: tuple[str, ...]
    counterexample: dict | None = None
    sbox_info: dict = field(default_factory=dict)


def _structural_closure(diff_set, member_fn, params: FeistelParams):
    """Check that every one-round image of the set satisfies member_fn.

    Enumerates every (difference, u, w) triple; a failure is returned as a
    concrete (input block, round key, input difference, output difference)
    witness with u, w realized by x3 = u, x1 = w and zero key.
    """
    for delta in diff_set:
        imgs = one_round_diff_images(delta, params)
        size = 1 << params.m
        for u in range(size):
            for w in range(size):
                out = tuple(int(v) for v in imgs[u, w])
                if not member_fn(out):
                    block = (u, 0, w, 0)
                    key = (0, 0)
                    mate = tuple(b ^ d for b, d in zip(block, delta))
                    check = tuple(
                        a ^ b
                        for a, b in zip(
                            round_encrypt(block, key, params),
                            round_encrypt(mate, key, params),
                        )
                    )
                    assert check == out
                    return {
                        "input_difference": delta,
                        "round_key": key,
                        "input_block": block,
                        "output_difference": out,
                    }
    return None


def _exhaustive_membership(diff_set, member_fn, params: FeistelParams, work_bound: int):
    """Full multi-round trace of every (input, key tuple) pair per difference."""
    for delta in diff_set:
        counts, total, _ = diff_distribution(delta, params, "all", work_bound=work_bound)
        m = params.m
        for packed in np.nonzero(counts)[0]:
            mask = (1 << m) - 1
            out = (
                int(packed >> (3 * m)) & mask,
                int(packed >> (2 * m)) & mask,
                int(packed >> m) & mask,
                int(packed) & mask,
            )
            if not member_fn(out):
                return {
                    "input_difference": delta,
                    "output_difference": out,
                    "pairs": int(counts[packed]),
                    "of": total,
                }
    return None


def verify_xor_class_invariant(
    params: FeistelParams,
    eps: int,
    cross_check_bound: int = 1 << 22,
) -> VerifyReport:
    """Invariance of the set of differences with word3 xor word1 = eps.

    The structural layer checks one-round closure over every difference and
    S-box offset pair, which is exactly the per-round induction step and
    hence covers every round count; when the full multi-round trace fits in
    the work bound it is run as an independent second layer.
    """
    if not 0 <= eps < (1 << params.m):
        raise ValueError("eps must be an m-bit word")
    wset = w_eps_set(params.m, eps)
    members = set(wset)
    member_fn = members.__contains__
    layers = ["structural"]
    cex = _structural_closure(wset, member_fn, params)
    if cex is None and _work_estimate(params) * len(wset) <= cross_check_bound:
        layers.append("exhaustive")
        cex = _exhaustive_membership(wset, member_fn, params, cross_check_bound)
    return VerifyReport(
        claim=f"diff-set invariance word3^word1={eps}",
        params_m=params.m,
        rounds=params.rounds,
        passed=cex is None,
        layers=tuple(layers),
        counterexample=cex,
        sbox_info=sbox_flags(params.sbox, params.m),
    )


def verify_pair_class_invariant(
    params: FeistelParams,
    cross_check_bound: int = 1 << 22,
) -> VerifyReport:
    """Invariance of the set of differences shaped (0, d, d, t)."""
    wset = w_pair_set(params.m)
    members = set(wset)
    member_fn = members.__contains__
    layers = ["structural"]
    cex = _structural_closure(wset, member_fn, params)
    if cex is None and _work_estimate(params) * len(wset) <= cross_check_bound:
        layers.append("exhaustive")
        cex = _exhaustive_membership(wset, member_fn, params, cross_check_bound)
    return VerifyReport(
        claim="diff-set invariance (0,d,d,t)",
        params_m=params.m,
        rounds=params.rounds,
        passed=cex is None,
        layers=tuple(layers),
        counterexample=cex,
        sbox_info=sbox_flags(params.sbox, params.m),
    )


def verify_impossible(omega, delta_set, params: FeistelParams) -> VerifyReport:
    """Probability-0 check: the reachable closure of omega avoids delta_set."""
    reach = reachable_difference_sets(omega, params)[-1]
    bad = reach & {tuple(d) for d in delta_set}
    return VerifyReport(
        claim="impossible differential sets",
        params_m=params.m,
        rounds=params.rounds,
        passed=not bad,
        layers=("reachability",),
        counterexample={"reached": sorted(bad)[:4]} if bad else None,
        sbox_info=sbox_flags(params.sbox, params.m),
    )
