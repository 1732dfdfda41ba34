"""Recovering a rational function y = f(x)/g(x) over Z_2022 from noisy samples.

Both polynomials are monic of degree 16 and the relation only holds on an
unknown subset of the sample points.  The composite modulus splits the job:
2022 = 2 * 3 * 337, the handful of distinct (f, g) behaviours modulo 2 and 3
are enumerated outright and ranked by how many points they satisfy, the
points satisfying the best behaviour modulo 6 define a linear code over
GF(337) whose closest codeword is found by information-set decoding (the
plain pooled-Gauss variant: sample 32 coordinates, hope they are error-free,
solve), and per-coefficient CRT glues the pieces back together.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .numtheory import CrtSystem, crt_solve

MODULUS = 2022
FACTORS = (2, 3, 337)
PRIME = 337
DEGREE = 16
UNKNOWNS = 2 * DEGREE


class ParseError(ValueError):
    pass


class RangeError(ValueError):
    pass


class NoCandidate(RuntimeError):
    pass


@dataclass(frozen=True)
class DataPoint:
    index: int
    x: int
    y: int

    def __post_init__(self):
        if not (0 <= self.x < MODULUS and 0 <= self.y < MODULUS):
            raise RangeError(f"point {self.index}: values must lie in 0..{MODULUS - 1}")


def load_points(path) -> list[DataPoint]:
    """Parse lines "i,x,y" (decimal, optional header line), sorted by i."""
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: expected 3 comma-separated fields")
            try:
                i, x, y = (int(p) for p in parts)
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise ParseError(f"line {lineno}: fields must be integers") from None
            try:
                points.append(DataPoint(i, x, y))
            except RangeError as exc:
                raise RangeError(f"line {lineno}: {exc}") from None
    return sorted(points, key=lambda p: p.index)


def points_to_csv(points) -> str:
    lines = ["i,x,y"]
    lines += [f"{p.index},{p.x},{p.y}" for p in points]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# keys

def _eval_monic(coeffs, x: int, mod: int) -> int:
    acc = 1  # leading monic term
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


@dataclass(frozen=True)
class RationalFnKey:
    """Coefficients below the monic leading term of f and g."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]

    def __post_init__(self):
        if len(self.alpha) != DEGREE or len(self.beta) != DEGREE:
            raise ValueError(f"expected {DEGREE} coefficients each")
        object.__setattr__(self, "alpha", tuple(a % MODULUS for a in self.alpha))
        object.__setattr__(self, "beta", tuple(b % MODULUS for b in self.beta))
        bad = self._denominator_zeros()
        if bad:
            raise ValueError(f"g({bad[0]}) shares a factor with {MODULUS}")

    def _denominator_zeros(self) -> list[int]:
        xs = np.arange(MODULUS, dtype=np.int64)
        vals = _eval_monic_vec(self.beta, xs, MODULUS)
        gcds = np.gcd(vals, MODULUS)
        return xs[gcds != 1].tolist()

    def f_eval(self, x: int, mod: int = MODULUS) -> int:
        return _eval_monic(self.alpha, x % mod, mod)

    def g_eval(self, x: int, mod: int = MODULUS) -> int:
        return _eval_monic(self.beta, x % mod, mod)

    def y_value(self, x: int) -> int:
        g = self.g_eval(x)
        return self.f_eval(x) * pow(g, -1, MODULUS) % MODULUS

    def satisfies(self, point: DataPoint) -> bool:
        return (point.y * self.g_eval(point.x) - self.f_eval(point.x)) % MODULUS == 0

    def satisfied_indices(self, points) -> list[int]:
        """Direct evaluation over Z_2022, independent of any decoder state."""
        return [p.index for p in points if self.satisfies(p)]


def _eval_monic_vec(coeffs, xs: np.ndarray, mod: int) -> np.ndarray:
    acc = np.ones_like(xs)
    for c in reversed(coeffs):
        acc = (acc * xs + c) % mod
    return acc


# ---------------------------------------------------------------------------
# small-modulus enumeration

@dataclass(frozen=True)
class SmallModCandidate:
    """Behaviour of a monic (f, g) pair on the residues modulo m.

    f_table and g_table list the values of f and g on 0..m-1; every table is
    realized by some monic degree-16 polynomial, and g tables avoid 0 because
    the true denominator is everywhere invertible.
    """

    modulus: int
    f_table: tuple[int, ...]
    g_table: tuple[int, ...]
    satisfied: int


def _satisfied_mask(points_x: np.ndarray, points_y: np.ndarray, cand_f, cand_g, m: int) -> np.ndarray:
    f = np.array(cand_f, dtype=np.int64)
    g = np.array(cand_g, dtype=np.int64)
    xm = points_x % m
    return (points_y * g[xm] - f[xm]) % m == 0


def enumerate_small_modulus(points, m: int) -> list[SmallModCandidate]:
    """All distinct (f, g) behaviours modulo m (2 or 3), ranked by the number
    of points satisfying y*g(x) = f(x); scalar multiples collapse to one
    representative since scaling both tables never changes the satisfied set.
    """
    if m not in (2, 3):
        raise ValueError("small-modulus enumeration works modulo 2 or 3")
    xs = np.array([p.x for p in points], dtype=np.int64)
    ys = np.array([p.y for p in points], dtype=np.int64)
    units = [u for u in range(1, m) if math.gcd(u, m) == 1]
    seen = set()
    out = []
    for f_table in itertools.product(range(m), repeat=m):
        for g_table in itertools.product(units, repeat=m):
            scale = pow(g_table[0], -1, m)
            canon = (
                tuple(v * scale % m for v in f_table),
                tuple(v * scale % m for v in g_table),
            )
            if canon in seen:
                continue
            seen.add(canon)
            count = int(_satisfied_mask(xs, ys, f_table, g_table, m).sum())
            out.append(SmallModCandidate(m, f_table, g_table, count))
    out.sort(key=lambda c: (-c.satisfied, c.f_table, c.g_table))
    return out


def expected_best_count(n_points: int, n_correct: int) -> float:
    """Ranking diagnostic: correct points plus a sixth of the wrong ones."""
    return n_correct + (n_points - n_correct) / 6


# ---------------------------------------------------------------------------
# linear code over GF(337)

@dataclass(frozen=True)
class LinearCodeInstance:
    """Columns (-1, -x, ..., -x^15, y, y*x, ..., y*x^15) per retained point,
    plus the target v with entries (y - 1) * x^16, all modulo 337.

    duplicate_class labels coordinates by (x, y) mod 337: same label means a
    byte-identical column, and a coordinate sample containing two of them is
    singular with certainty (x collisions modulo 337 are common when a few
    hundred points are drawn from Z_2022, so the decoder must care).
    """

    columns: np.ndarray  # shape (32, L)
    target: np.ndarray  # shape (L,)
    point_indices: tuple[int, ...]
    duplicate_class: np.ndarray  # shape (L,)

    @property
    def length(self) -> int:
        return self.columns.shape[1]


def build_code(points, retained_positions) -> LinearCodeInstance:
    retained = list(retained_positions)
    if len(retained) < UNKNOWNS:
        raise ValueError(f"need at least {UNKNOWNS} retained points")
    xs = np.array([points[i].x % PRIME for i in retained], dtype=np.int64)
    ys = np.array([points[i].y % PRIME for i in retained], dtype=np.int64)
    powers = np.ones((DEGREE + 1, len(retained)), dtype=np.int64)
    for j in range(1, DEGREE + 1):
        powers[j] = powers[j - 1] * xs % PRIME
    cols = np.vstack([(-powers[:DEGREE]) % PRIME, ys * powers[:DEGREE] % PRIME])
    target = (ys - 1) * powers[DEGREE] % PRIME
    return LinearCodeInstance(
        columns=cols,
        target=target,
        point_indices=tuple(points[i].index for i in retained),
        duplicate_class=xs * PRIME + ys,
    )


def codeword_disagreements(instance: LinearCodeInstance, solution) -> int:
    """Hamming distance between s x G and -v."""
    s = np.array(solution, dtype=np.int64)
    word = s @ instance.columns % PRIME
    return int(np.count_nonzero((word + instance.target) % PRIME))


# ---------------------------------------------------------------------------
# pooled-Gauss information-set decoding

@njit(cache=True)
def _isd_batch(G, v, classes, pinned, draws, inv_table, max_errors):  # pragma: no cover - jitted
    n_unknowns = G.shape[0]
    length = G.shape[1]
    batch = draws.shape[0]
    n_pinned = pinned.shape[0]
    avail = np.empty(length, np.int64)
    chosen = np.empty(n_unknowns, np.int64)
    M = np.empty((n_unknowns, n_unknowns + 1), np.int64)
    sol = np.empty(n_unknowns, np.int64)
    singular = 0
    for b in range(batch):
        # start from the pinned coordinates, then draw the rest uniformly,
        # never taking two coordinates from the same duplicate class (those
        # samples are singular with certainty)
        for j in range(length):
            avail[j] = j
        navail = length
        short = False
        for j in range(n_unknowns):
            if j < n_pinned:
                c = pinned[j]
            else:
                if navail == 0:
                    short = True
                    break
                pos = int(draws[b, j] * navail)
                if pos >= navail:
                    pos = navail - 1
                c = avail[pos]
            chosen[j] = c
            cls = classes[c]
            keep = 0
            for a in range(navail):
                if classes[avail[a]] != cls:
                    avail[keep] = avail[a]
                    keep += 1
            navail = keep
        if short:
            singular += 1
            continue
        for row in range(n_unknowns):
            c = chosen[row]
            for a in range(n_unknowns):
                M[row, a] = G[a, c]
            M[row, n_unknowns] = (337 - v[c]) % 337
        # forward elimination with partial pivoting
        bad = False
        for col in range(n_unknowns):
            piv = -1
            for row in range(col, n_unknowns):
                if M[row, col] != 0:
                    piv = row
                    break
            if piv < 0:
                bad = True
                break
            if piv != col:
                for a in range(col, n_unknowns + 1):
                    t = M[col, a]
                    M[col, a] = M[piv, a]
                    M[piv, a] = t
            inv = inv_table[M[col, col]]
            for a in range(col, n_unknowns + 1):
                M[col, a] = M[col, a] * inv % 337
            for row in range(col + 1, n_unknowns):
                f = M[row, col]
                if f != 0:
                    for a in range(col, n_unknowns + 1):
                        M[row, a] = (M[row, a] - f * M[col, a]) % 337
        if bad:
            singular += 1
            continue
        for row in range(n_unknowns - 1, -1, -1):
            acc = M[row, n_unknowns]
            for a in range(row + 1, n_unknowns):
                acc -= M[row, a] * sol[a]
            sol[row] = acc % 337
        errs = 0
        ok = True
        for c in range(length):
            acc = 0
            for a in range(n_unknowns):
                acc += sol[a] * G[a, c]
            if (acc + v[c]) % 337 != 0:
                errs += 1
                if errs > max_errors:
                    ok = False
                    break
        if ok:
            return b, sol, singular
    return -1, sol, singular


_INV_TABLE = np.array([0] + [pow(a, PRIME - 2, PRIME) for a in range(1, PRIME)], dtype=np.int64)

_BATCH = 8192


@dataclass(frozen=True)
class ISDResult:
    solution: tuple[int, ...]
    iterations: int
    singular_samples: int
    disagreements: int


def isd_decode(
    instance: LinearCodeInstance,
    max_errors: int,
    budget: int = 10**6,
    seed: int = 0,
    pinned: tuple[int, ...] = (),
) -> ISDResult | None:
    """Pooled Gauss: repeatedly sample 32 coordinates, solve assuming they are
    error-free, accept the first solution within max_errors disagreements.

    Sampling is uniform over coordinates except that two members of the same
    duplicate class are never drawn together (their rows are identical, so
    the system could not determine anything); residual singular systems are
    skipped and, like every completed draw, count against the budget.
    `pinned` coordinates are included in every sample; callers pass
    coordinates they have independent reason to trust (a wrong pin cannot
    cause a wrong answer, only a budget-exhausted miss, because every
    accepted solution is checked against the whole code).  Deterministic
    given (instance, seed, budget, pinned); returns None when the budget
    runs out.
    """
    length = instance.length
    if max_errors >= length - UNKNOWNS:
        raise ValueError(f"max_errors must stay below length - {UNKNOWNS}")
    if len(pinned) > UNKNOWNS:
        raise ValueError(f"at most {UNKNOWNS} pinned coordinates")
    classes = np.ascontiguousarray(instance.duplicate_class)
    pinned_arr = np.array(sorted(pinned), dtype=np.int64)
    if len(set(classes[pinned_arr].tolist())) != len(pinned):
        raise ValueError("pinned coordinates must come from distinct duplicate classes")
    rng = np.random.default_rng(seed)
    G = np.ascontiguousarray(instance.columns)
    v = np.ascontiguousarray(instance.target)
    done = 0
    singular = 0
    while done < budget:
        batch = min(_BATCH, budget - done)
        draws = rng.random((batch, UNKNOWNS))
        found, sol, n_sing = _isd_batch(G, v, classes, pinned_arr, draws, _INV_TABLE, max_errors)
        singular += int(n_sing)
        if found >= 0:
            solution = tuple(int(x) for x in sol)
            return ISDResult(
                solution=solution,
                iterations=done + int(found) + 1,
                singular_samples=singular,
                disagreements=codeword_disagreements(instance, solution),
            )
        done += batch
    return None


def gv_distance(n: int, k: int, q: int = PRIME) -> int:
    """Largest d whose punctured Hamming ball still fits the redundancy:
    sum_{i<=d-2} C(n-1,i)(q-1)^i < q^(n-k).  Tracks the expected minimum
    distance of a random [n, k] code over GF(q)."""
    bound = q ** (n - k)
    total = 0
    d = 1
    while True:
        # adding weight d-1 moves us to distance d+1
        total += math.comb(n - 1, d - 1) * (q - 1) ** (d - 1)
        if total >= bound:
            return d
        d += 1


# ---------------------------------------------------------------------------
# coefficient lifting and the full pipeline

def _lift_tables_mod2(table_f, table_g) -> tuple[tuple[int, ...], tuple[int, ...]]:
    def lift(t):
        c = [0] * DEGREE
        c[0] = t[0] % 2
        c[1] = (t[1] - 1 - c[0]) % 2
        return tuple(c)

    return lift(table_f), lift(table_g)


def _lift_tables_mod3(table_f, table_g) -> tuple[tuple[int, ...], tuple[int, ...]]:
    def lift(t):
        c = [0] * DEGREE
        c[0] = t[0] % 3
        odd = 2 * (t[1] - t[2]) % 3
        even = 2 * (t[1] + t[2] - 2) % 3
        c[1] = odd
        c[2] = (even - c[0]) % 3
        return tuple(c)

    return lift(table_f), lift(table_g)


def _crt_coefficients(c2, c3, c337) -> tuple[int, ...]:
    return tuple(
        crt_solve(CrtSystem([(a, 2), (b, 3), (c, PRIME)])).value
        for a, b, c in zip(c2, c3, c337)
    )


@dataclass(frozen=True)
class SolveReport:
    candidates: tuple[RationalFnKey, ...]
    satisfied_counts: tuple[int, ...]
    pool_size: int
    isd_iterations: int
    combos_tried: int


def duplicate_consensus_pins(instance: LinearCodeInstance) -> tuple[int, ...]:
    """One representative per duplicate class with two or more members.

    An agreeing pair is all but certainly error-free: a wrong y matching a
    correct point's (x, y) modulo 337 while also matching modulo 6 would
    satisfy the relation modulo 2022 outright, and two wrong points colliding
    in both coordinates is a 1-in-337^2 accident per pair.
    """
    first: dict[int, int] = {}
    repeated = []
    for pos, cls in enumerate(instance.duplicate_class.tolist()):
        if cls in first:
            if first[cls] >= 0:
                repeated.append(first[cls])
                first[cls] = -1
        else:
            first[cls] = pos
    return tuple(repeated[:UNKNOWNS])


def solve_full(
    points,
    need: int = 90,
    budget: int = 10**6,
    seed: int = 0,
    max_combos: int = 8,
    pin_duplicates: bool = True,
) -> SolveReport:
    """Full pipeline: rank behaviours mod 2 and 3, take the points satisfying
    the best combination modulo 6, decode the [|pool|, 32] code over GF(337),
    CRT the coefficients and keep keys verified to satisfy >= need points
    (recounted by direct evaluation, never decoder bookkeeping).

    pin_duplicates feeds the decoder the coordinates vouched for by duplicate
    agreement (see duplicate_consensus_pins), which cuts the expected
    iteration count by orders of magnitude on instances whose x values
    collide modulo 337; correctness never depends on the pins because every
    candidate is recounted.
    """
    points = list(points)
    if len(points) < need:
        raise ValueError("fewer points than the requested satisfied count")
    xs = np.array([p.x for p in points], dtype=np.int64)
    ys = np.array([p.y for p in points], dtype=np.int64)

    cands2 = enumerate_small_modulus(points, 2)
    cands3 = enumerate_small_modulus(points, 3)
    combos = []
    for c2 in cands2:
        if c2.satisfied < need:
            continue
        mask2 = _satisfied_mask(xs, ys, c2.f_table, c2.g_table, 2)
        for c3 in cands3:
            if c3.satisfied < need:
                continue
            mask3 = _satisfied_mask(xs, ys, c3.f_table, c3.g_table, 3)
            mask = mask2 & mask3
            count = int(mask.sum())
            if count >= max(need, UNKNOWNS + 1):
                combos.append((count, c2, c3, mask))
    combos.sort(key=lambda t: -t[0])
    if not combos:
        raise NoCandidate("no behaviour modulo 6 satisfies enough points")

    remaining = budget
    tried = 0
    for count, c2, c3, mask in combos[:max_combos]:
        if remaining <= 0:
            break
        tried += 1
        positions = np.nonzero(mask)[0].tolist()
        instance = build_code(points, positions)
        pins = duplicate_consensus_pins(instance) if pin_duplicates else ()
        result = isd_decode(
            instance, max_errors=count - need, budget=remaining, seed=seed, pinned=pins
        )
        remaining -= result.iterations if result else remaining
        if result is None:
            continue
        alpha337 = result.solution[:DEGREE]
        beta337 = result.solution[DEGREE:]
        candidates = []
        counts = []
        f2, g2 = _lift_tables_mod2(c2.f_table, c2.g_table)
        for unit in (1, 2):
            tf3 = tuple(v * unit % 3 for v in c3.f_table)
            tg3 = tuple(v * unit % 3 for v in c3.g_table)
            f3, g3 = _lift_tables_mod3(tf3, tg3)
            try:
                key = RationalFnKey(
                    alpha=_crt_coefficients(f2, f3, alpha337),
                    beta=_crt_coefficients(g2, g3, beta337),
                )
            except ValueError:
                continue  # denominator not everywhere invertible: not a valid key
            satisfied = len(key.satisfied_indices(points))
            if satisfied >= need:
                candidates.append(key)
                counts.append(satisfied)
        if candidates:
            return SolveReport(
                candidates=tuple(candidates),
                satisfied_counts=tuple(counts),
                pool_size=count,
                isd_iterations=result.iterations,
                combos_tried=tried,
            )
    raise NoCandidate("no decoded key survived verification within the budget")


# ---------------------------------------------------------------------------
# synthetic instances

def synth_instance(
    seed: int,
    n_points: int = 324,
    n_correct: int = 90,
    pool_errors: int | None = None,
) -> tuple[list[DataPoint], RationalFnKey]:
    """Sample a valid key and noisy points; deterministic per seed.

    Garbage y values never satisfy the relation modulo 2022.  With
    pool_errors set, exactly that many garbage points are arranged to satisfy
    the relation modulo 6 by accident (the unconditioned count is binomial
    with mean (n_points - n_correct)/6, which makes decoding effort vary a
    lot between seeds).
    """
    if n_correct > n_points:
        raise ValueError("n_correct cannot exceed n_points")
    rng = np.random.default_rng(seed)
    alpha = tuple(int(v) for v in rng.integers(0, MODULUS, DEGREE))
    while True:
        beta = tuple(int(v) for v in rng.integers(0, MODULUS, DEGREE))
        try:
            key = RationalFnKey(alpha, beta)
            break
        except ValueError:
            continue

    xs = rng.integers(0, MODULUS, n_points)
    correct = set(rng.choice(n_points, size=n_correct, replace=False).tolist())
    wrong = [i for i in range(n_points) if i not in correct]
    if pool_errors is not None:
        if not 0 <= pool_errors <= len(wrong):
            raise ValueError("pool_errors out of range")
        chosen = rng.choice(len(wrong), size=pool_errors, replace=False)
        accidental = {wrong[int(i)] for i in chosen}
    else:
        accidental = None

    points = []
    for i in range(n_points):
        x = int(xs[i])
        true_y = key.y_value(x)
        if i in correct:
            y = true_y
        elif accidental is None:
            # uniform over Z_2022 minus the exact value
            r = int(rng.integers(0, MODULUS - 1))
            y = r if r < true_y else r + 1
        elif i in accidental:
            # same residue modulo 6 as the true value, but not the value
            r = int(rng.integers(0, MODULUS // 6 - 1))
            slot = true_y // 6
            j = r if r < slot else r + 1
            y = true_y % 6 + 6 * j
        else:
            # any other residue modulo 6
            shift = int(rng.integers(1, 6))
            j = int(rng.integers(0, MODULUS // 6))
            y = (true_y % 6 + shift) % 6 + 6 * j
        points.append(DataPoint(i + 1, x, y))
    return points, key
