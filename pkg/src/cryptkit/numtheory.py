"""Exact integer and modular arithmetic shared by every solver module.

Everything here works on plain Python integers (unbounded), so intermediate
products never overflow before reduction.  All functions are pure.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass


class NonCoprimeModuli(ValueError):
    """CRT moduli share a nontrivial common factor."""


class NotInvertible(ValueError):
    """Requested inverse does not exist (gcd with modulus exceeds 1)."""


class NotPrime(ValueError):
    """A prime modulus was required but the value is composite."""


@dataclass(frozen=True)
class ResidueInt:
    """An integer reduced modulo a fixed modulus >= 2.

    Arithmetic is closed: combining two residues requires equal moduli and
    returns a residue with that modulus.
    """

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other: "ResidueInt") -> None:
        if self.modulus != other.modulus:
            raise ValueError(f"mixed moduli {self.modulus} and {other.modulus}")

    def __add__(self, other: "ResidueInt") -> "ResidueInt":
        self._check(other)
        return ResidueInt(self.value + other.value, self.modulus)

    def __sub__(self, other: "ResidueInt") -> "ResidueInt":
        self._check(other)
        return ResidueInt(self.value - other.value, self.modulus)

    def __mul__(self, other: "ResidueInt") -> "ResidueInt":
        self._check(other)
        return ResidueInt(self.value * other.value, self.modulus)

    def __pow__(self, e: int) -> "ResidueInt":
        if e < 0:
            return mod_inverse(self) ** (-e)
        return ResidueInt(pow(self.value, e, self.modulus), self.modulus)

    def inverse(self) -> "ResidueInt":
        return mod_inverse(self)


@dataclass(frozen=True)
class CrtSystem:
    """A list of (remainder, modulus) pairs with pairwise-coprime moduli."""

    residues: tuple[tuple[int, int], ...]

    def __init__(self, residues):
        pairs = tuple((int(r), int(m)) for r, m in residues)
        for _, m in pairs:
            if m < 2:
                raise ValueError(f"modulus must be >= 2, got {m}")
        for i in range(len(pairs)):
            for j in range(i + 1, len(pairs)):
                g = math.gcd(pairs[i][1], pairs[j][1])
                if g != 1:
                    raise NonCoprimeModuli(
                        f"moduli {pairs[i][1]} and {pairs[j][1]} share factor {g}"
                    )
        object.__setattr__(self, "residues", pairs)


def moebius(n: int) -> int:
    """Moebius function: 0 if n has a squared prime factor, else (-1)^#primes."""
    if n < 1:
        raise ValueError("moebius is defined on positive integers")
    count = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            count += 1
        d += 1
    if n > 1:
        count += 1
    return 1 if count % 2 == 0 else -1


def divisors(n: int) -> list[int]:
    """All positive divisors of n, sorted."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def mod_inverse(a: ResidueInt) -> ResidueInt:
    """Multiplicative inverse of a modulo a.modulus.

    Raises NotInvertible when gcd(a, modulus) != 1; several solvers rely on
    that failure being detectable rather than silent.
    """
    g, x, _ = extended_gcd(a.value, a.modulus)
    if g != 1:
        raise NotInvertible(f"{a.value} is not invertible modulo {a.modulus} (gcd {g})")
    return ResidueInt(x, a.modulus)


def crt_solve(sys: CrtSystem) -> ResidueInt:
    """Unique residue modulo the product agreeing with every (r, m) pair."""
    total = 0
    prod = 1
    for _, m in sys.residues:
        prod *= m
    for r, m in sys.residues:
        q = prod // m
        g, inv, _ = extended_gcd(q, m)
        total += r * q * inv
    return ResidueInt(total, prod)


_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


def _miller_rabin(n: int, bases) -> bool:
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        a %= n
        if a in (0, 1, n - 1):
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Primality test: deterministic below 2**64, Miller-Rabin (40 rounds) above.

    Above 2**64 the answer is probabilistic with error probability < 4**-40;
    the bases are derived deterministically from n so repeated calls agree.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 1 << 32:
        d = 41
        while d * d <= n:
            if n % d == 0:
                return False
            d += 2
        return True
    if n < 1 << 64:
        # this witness set is deterministic for all n < 3.3 * 10**24
        return _miller_rabin(n, _SMALL_PRIMES)
    rng = random.Random(n)
    bases = [rng.randrange(2, n - 1) for _ in range(40)]
    return _miller_rabin(n, bases)


def sqrt_mod_prime(a: ResidueInt, p: int) -> set[ResidueInt]:
    """All x with x*x = a (mod p); empty set when a is a non-residue.

    Brute force below 1000 (the instances here are tiny), Tonelli-Shanks above.
    """
    if a.modulus != p:
        raise ValueError(f"residue modulus {a.modulus} does not match p={p}")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    v = a.value
    if p < 1000:
        return {ResidueInt(x, p) for x in range(p) if x * x % p == v}
    if v == 0:
        return {ResidueInt(0, p)}
    if pow(v, (p - 1) // 2, p) != 1:
        return set()
    if p % 4 == 3:
        r = pow(v, (p + 1) // 4, p)
        return {ResidueInt(r, p), ResidueInt(-r, p)}
    # Tonelli-Shanks
    q = p - 1
    s = 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(v, q, p), pow(v, (q + 1) // 2, p)
    while t != 1:
        t2 = t
        i = 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return {ResidueInt(r, p), ResidueInt(-r, p)}


def integer_cubic_roots(a2: int, a1: int, a0: int) -> list[int]:
    """All integer roots of x^3 + a2*x^2 + a1*x + a0 (sorted, without multiplicity).

    Rational-root search over the divisors of the constant term; when the
    constant term vanishes, x is factored out and the quadratic handled the
    same way.
    """

    def poly(x: int) -> int:
        return ((x + a2) * x + a1) * x + a0

    roots: set[int] = set()
    if a0 == 0:
        roots.add(0)
        # remaining quadratic x^2 + a2*x + a1
        if a1 == 0:
            roots.add(-a2)
        else:
            for d in divisors(abs(a1)):
                for r in (d, -d):
                    if r * r + a2 * r + a1 == 0:
                        roots.add(r)
    else:
        for d in divisors(abs(a0)):
            for r in (d, -d):
                if poly(r) == 0:
                    roots.add(r)
    return sorted(roots)
