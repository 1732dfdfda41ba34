"""Essential-dependence analysis of Boolean functions and S-boxes.

A permutation of n-bit words is "super-dependent" when every coordinate
function essentially depends on all n input variables.  This module counts
them exactly for n <= 3, bounds them through an inclusion-exclusion argument
for larger n and estimates the fraction by seeded Monte-Carlo sampling.

Truth tables are indexed by the input word x; variable j (1-based) is bit
j-1 of x.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np


class TooLarge(ValueError):
    """Exhaustive enumeration was requested beyond feasible size."""


@dataclass(frozen=True)
class BooleanFn:
    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if len(self.table) != 1 << self.n:
            raise ValueError(f"truth table must have {1 << self.n} entries")
        if any(v not in (0, 1) for v in self.table):
            raise ValueError("truth table entries must be bits")

    @staticmethod
    def from_int(n: int, bits: int) -> "BooleanFn":
        return BooleanFn(n, tuple(bits >> i & 1 for i in range(1 << n)))

    def anf(self) -> tuple[int, ...]:
        """Algebraic normal form coefficients via the binary Moebius transform."""
        a = list(self.table)
        size = 1 << self.n
        step = 1
        while step < size:
            for x in range(size):
                if x & step:
                    a[x] ^= a[x ^ step]
            step <<= 1
        return tuple(a)


@dataclass(frozen=True)
class VectorBooleanFn:
    n: int
    tables: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.tables) != self.n:
            raise ValueError(f"expected {self.n} coordinate functions")
        for t in self.tables:
            BooleanFn(self.n, t)

    @staticmethod
    def from_mapping(n: int, outputs) -> "VectorBooleanFn":
        """Build from the list of output words F(0), F(1), ..., F(2^n - 1)."""
        outputs = list(outputs)
        if len(outputs) != 1 << n:
            raise ValueError(f"expected {1 << n} outputs")
        tables = tuple(
            tuple(outputs[x] >> k & 1 for x in range(1 << n)) for k in range(n)
        )
        return VectorBooleanFn(n, tables)

    def outputs(self) -> list[int]:
        return [
            sum(self.tables[k][x] << k for k in range(self.n))
            for x in range(1 << self.n)
        ]

    def coordinate(self, k: int) -> BooleanFn:
        """Coordinate function f_k, 1-based."""
        return BooleanFn(self.n, self.tables[k - 1])


def essentially_depends(f: BooleanFn, j: int) -> bool:
    """True iff flipping variable x_j (1-based) changes f somewhere."""
    if not 1 <= j <= f.n:
        raise ValueError(f"variable index {j} out of 1..{f.n}")
    bit = 1 << (j - 1)
    return any(
        f.table[x] != f.table[x | bit] for x in range(1 << f.n) if not x & bit
    )


def depends_on_all(f: BooleanFn) -> bool:
    return all(essentially_depends(f, j) for j in range(1, f.n + 1))


def is_permutation(F: VectorBooleanFn) -> bool:
    out = F.outputs()
    return len(set(out)) == len(out)


def is_balanced(f: BooleanFn) -> bool:
    return sum(f.table) * 2 == len(f.table)


def is_super_dependent(F: VectorBooleanFn) -> bool:
    return is_permutation(F) and all(
        depends_on_all(F.coordinate(k)) for k in range(1, F.n + 1)
    )


# ---------------------------------------------------------------------------
# exact counting

def _dependence_mask_table(n: int) -> list[int]:
    """For every truth table (as an integer), the mask of depended variables."""
    size = 1 << n
    masks = [0] * (1 << size)
    for tt in range(1 << size):
        mask = 0
        for j in range(n):
            bit = 1 << j
            for x in range(size):
                if not x & bit and (tt >> x & 1) != (tt >> (x | bit) & 1):
                    mask |= 1 << j
                    break
        masks[tt] = mask
    return masks


def count_super_dependent_exact(n: int) -> int:
    """Count permutations whose coordinates all depend on every variable,
    by enumerating all (2^n)! permutations in lexicographic order."""
    if n > 3:
        raise TooLarge("exhaustive enumeration is limited to n <= 3 (16! is out of reach)")
    if n < 1:
        raise ValueError("n must be positive")
    size = 1 << n
    masks = _dependence_mask_table(n)
    full = (1 << n) - 1
    count = 0
    for perm in itertools.permutations(range(size)):
        ok = True
        for k in range(n):
            tt = 0
            for x in range(size):
                tt |= (perm[x] >> k & 1) << x
            if masks[tt] != full:
                ok = False
                break
        if ok:
            count += 1
    return count


@lru_cache(maxsize=None)
def h_count(k: int) -> int:
    """Balanced k-variable functions essentially depending on all k variables.

    Recurrence: the balanced functions C(2^k, 2^(k-1)) split by their exact
    support set of essential variables; no 0-variable function is balanced.
    """
    if not 0 <= k <= 20:
        raise ValueError("k must be in 0..20")
    if k == 0:
        return 0
    total = math.comb(1 << k, 1 << (k - 1))
    return total - sum(math.comb(k, i) * h_count(i) for i in range(k))


def h_count_brute_force(k: int) -> int:
    """Oracle for h_count: scan all 2^(2^k) truth tables (k <= 4)."""
    if k > 4:
        raise TooLarge("brute force limited to k <= 4")
    if k == 0:
        return 0
    count = 0
    for tt in range(1 << (1 << k)):
        f = BooleanFn.from_int(k, tt)
        if is_balanced(f) and depends_on_all(f):
            count += 1
    return count


def first_coordinate_defect_count(n: int) -> int:
    """Permutations whose first coordinate misses some variable.

    Every balanced function appears as a fixed coordinate of the same number
    (2^(n-1)!)^2 of permutations, so the count is exact.
    """
    balanced_total = math.comb(1 << n, 1 << (n - 1))
    per_function = math.factorial(1 << (n - 1)) ** 2
    return per_function * (balanced_total - h_count(n))


def s_bounds(n: int) -> tuple[int, int]:
    """Exact integer bounds (2^n! - n*|A1|, 2^n! - |A1|) on the count of
    super-dependent permutations, via one term of inclusion-exclusion."""
    if not 1 <= n <= 8:
        raise ValueError("n must be in 1..8")
    total = math.factorial(1 << n)
    a1 = first_coordinate_defect_count(n)
    return total - n * a1, total - a1


def d_trivial_lower_bound(n: int) -> int:
    """Trivial lower bound C(2^(n-1), 2^(n-2)) on the joint-defect count
    appearing in the exact inclusion-exclusion terms (not computed here)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return math.comb(1 << (n - 1), 1 << (n - 2))


# ---------------------------------------------------------------------------
# Monte-Carlo estimation

def _random_permutations(rng: np.random.Generator, n: int, samples: int) -> np.ndarray:
    size = 1 << n
    return np.argsort(rng.random((samples, size)), axis=1)


def _super_dependent_mask(perms: np.ndarray, n: int) -> np.ndarray:
    """Boolean mask over sampled permutations (rows are output tables)."""
    samples = perms.shape[0]
    ok = np.ones(samples, dtype=bool)
    size = 1 << n
    for k in range(n):
        bits = (perms >> k) & 1
        for j in range(n):
            flipped = np.arange(size) ^ (1 << j)
            ok &= (bits != bits[:, flipped]).any(axis=1)
    return ok


def s_estimate_monte_carlo(
    n: int, samples: int, seed: int
) -> tuple[float, tuple[float, float]]:
    """Sampled fraction of super-dependent permutations with a 95% normal
    confidence interval (sampling by seeded uniform shuffles)."""
    if n > 6:
        raise TooLarge("sampling limited to n <= 6")
    rng = np.random.default_rng(seed)
    hits = 0
    chunk = max(1, min(samples, 1 << 22 >> n))
    remaining = samples
    while remaining > 0:
        batch = min(chunk, remaining)
        perms = _random_permutations(rng, n, batch)
        hits += int(_super_dependent_mask(perms, n).sum())
        remaining -= batch
    frac = hits / samples
    half = 1.96 * math.sqrt(max(frac * (1 - frac), 1e-300) / samples)
    return frac, (frac - half, frac + half)


def transform(F: VectorBooleanFn, output_perm, input_xor: int) -> VectorBooleanFn:
    """x -> pi(F(x xor c)): permute output bits by pi, translate the input."""
    out = F.outputs()
    n = F.n
    new_out = []
    for x in range(1 << n):
        y = out[x ^ input_xor]
        new_out.append(sum((y >> k & 1) << output_perm[k] for k in range(n)))
    return VectorBooleanFn.from_mapping(n, new_out)
