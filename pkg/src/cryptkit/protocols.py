"""Three-pass message exchange and key-chain e-coin schemes.

The three-pass part covers the exponentiation protocol, a generic version
driven by caller-supplied commuting ciphers, and the eavesdropper attack that
breaks every translation cipher (XOR and friends).

The e-coin part implements the two accepted key-chain designs: a square-root
chain modulo N = p*q whose public keys come from a seeded hash stream, and a
discrete-log chain in a prime-order subgroup with Schnorr signatures.  The
square-root signature form reveals the coin key; that is fine in-model since
the payee already holds it and coins are single-use.  For the group chain a
single leaked coin key reveals the master key (sk0 = sk_j / H(j)); this is a
documented weakness with an attack demo, not a claimed security property.
"""
from __future__ import annotations

import hashlib
import math
import random
import threading
from dataclasses import dataclass
from functools import lru_cache

from .numtheory import (
    NotPrime,
    ResidueInt,
    crt_solve,
    CrtSystem,
    extended_gcd,
    is_prime,
    mod_inverse,
)


class BadMessageRange(ValueError):
    pass


# ---------------------------------------------------------------------------
# three-pass protocols

@dataclass(frozen=True)
class ShamirParty:
    p: int
    c: int
    d: int

    def __post_init__(self):
        if self.c * self.d % (self.p - 1) != 1:
            raise ValueError("c*d must be 1 modulo p-1")

    def lock(self, x: int) -> int:
        return pow(x, self.c, self.p)

    def unlock(self, x: int) -> int:
        return pow(x, self.d, self.p)


@dataclass(frozen=True)
class Transcript:
    x1: int
    x2: int
    x3: int


def make_shamir_party(p: int, rng: random.Random) -> ShamirParty:
    while True:
        c = rng.randrange(3, p - 1)
        g, inv, _ = extended_gcd(c, p - 1)
        if g == 1:
            return ShamirParty(p, c, inv % (p - 1))


def shamir_roundtrip(p: int, m: int, seed: int = 0) -> tuple[Transcript, int]:
    """Run the three exponentiation passes with seeded key pairs."""
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if not 1 < m < p - 1:
        raise BadMessageRange(f"message must satisfy 1 < m < {p - 1}")
    rng = random.Random(seed)
    alice = make_shamir_party(p, rng)
    bob = make_shamir_party(p, rng)
    x1 = alice.lock(m)
    x2 = bob.lock(x1)
    x3 = alice.unlock(x2)
    recovered = bob.unlock(x3)
    return Transcript(x1, x2, x3), recovered


@dataclass(frozen=True)
class ThreePassResult:
    transcript: Transcript
    recovered: object
    success: bool


def threepass_generic(enc_a, dec_a, enc_b, dec_b, m) -> ThreePassResult:
    """Three passes with caller-supplied ciphers (keys already bound).

    Whether the ciphers commute is the caller's business: a failed recovery
    is reported, not raised, because non-commuting ciphers are a legitimate
    experiment.
    """
    x1 = enc_a(m)
    x2 = enc_b(x1)
    x3 = dec_a(x2)
    recovered = dec_b(x3)
    return ThreePassResult(Transcript(x1, x2, x3), recovered, recovered == m)


def xor_eavesdrop_attack(transcript: Transcript, combine=None, inverse=None):
    """Recover m from the three intercepted messages of a translation cipher.

    With a group operation o and both parties encrypting by translation,
    x1 o x3 o x2^-1 equals the message; the default instantiates o = XOR
    (self-inverse).  Exponentiation ciphers do not have this shape and the
    formula fails on them, which tests assert.
    """
    if combine is None:
        return transcript.x1 ^ transcript.x3 ^ transcript.x2
    return combine(combine(transcript.x1, transcript.x3), inverse(transcript.x2))


# ---------------------------------------------------------------------------
# hashing helpers (SHA-256 / SHAKE-256 based, fully deterministic)

def _hash_stream_int(tag: str, parts, nbytes: int) -> int:
    h = hashlib.shake_256()
    h.update(tag.encode())
    for part in parts:
        h.update(b"|")
        h.update(str(part).encode())
    return int.from_bytes(h.digest(nbytes), "big")


def hash_to_unit(message: bytes, modulus: int, tag: str = "msg") -> int:
    """Hash into the units of Z_modulus (counter bumped past rare gcd hits)."""
    nbytes = (modulus.bit_length() + 7) // 8 + 16
    ctr = 0
    while True:
        v = _hash_stream_int(tag, [message.hex(), ctr], nbytes) % modulus
        if v != 0 and math.gcd(v, modulus) == 1:
            return v
        ctr += 1


def _random_prime(bits: int, rng: random.Random, congruent_3_mod_4: bool = False) -> int:
    while True:
        p = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if congruent_3_mod_4 and p % 4 != 3:
            continue
        if is_prime(p):
            return p


# ---------------------------------------------------------------------------
# scheme A: square-root key chain modulo N = p*q

@dataclass(frozen=True)
class RabinKeyPair:
    index: int
    public_key: int
    secret_key: int
    counter: int


class RabinChain:
    """Issuer side: knows the factors, derives one key pair per coin index.

    Public keys are drawn from the deterministic stream SHAKE(K | i | counter)
    and the first quadratic residue is kept; the accepted counter is published
    with the key so a party holding only (K, i, counter) can recompute it.
    """

    def __init__(self, p: int, q: int, master_key: int):
        if p % 4 != 3 or q % 4 != 3:
            raise ValueError("both primes must be congruent to 3 modulo 4")
        if p == q:
            raise ValueError("primes must differ")
        if not (is_prime(p) and is_prime(q)):
            raise NotPrime("p and q must be prime")
        self.p = p
        self.q = q
        self.n = p * q
        self.master_key = master_key

    @classmethod
    def generate(cls, prime_bits: int = 256, seed: int = 0) -> "RabinChain":
        rng = random.Random(f"rabin-chain-{seed}")
        p = _random_prime(prime_bits, rng, congruent_3_mod_4=True)
        while True:
            q = _random_prime(prime_bits, rng, congruent_3_mod_4=True)
            if q != p:
                break
        master = rng.getrandbits(256)
        return cls(p, q, master)

    def _candidate(self, i: int, counter: int) -> int:
        nbytes = (self.n.bit_length() + 7) // 8 + 16
        return _hash_stream_int("rabin-pk", [self.master_key, i, counter], nbytes) % self.n

    def _is_qr(self, v: int) -> bool:
        if math.gcd(v, self.n) != 1:
            return False
        return (
            pow(v, (self.p - 1) // 2, self.p) == 1
            and pow(v, (self.q - 1) // 2, self.q) == 1
        )

    def square_roots(self, v: int) -> list[int]:
        """All four square roots of a quadratic residue modulo N."""
        rp = pow(v, (self.p + 1) // 4, self.p)
        rq = pow(v, (self.q + 1) // 4, self.q)
        roots = set()
        for sp in (rp, self.p - rp):
            for sq in (rq, self.q - rq):
                roots.add(
                    crt_solve(CrtSystem([(sp, self.p), (sq, self.q)])).value
                )
        return sorted(roots)

    def keys(self, i: int) -> RabinKeyPair:
        if i < 1:
            raise ValueError("coin indices start at 1")
        counter = 0
        while True:
            pk = self._candidate(i, counter)
            if self._is_qr(pk):
                break
            counter += 1
        sk = self.square_roots(pk)[0]
        return RabinKeyPair(i, pk, sk, counter)

    def service(self) -> "RabinService":
        return RabinService(self.n, self.master_key)


class RabinService:
    """Verifier side: holds (N, K) but no factors."""

    def __init__(self, n: int, master_key: int):
        self.n = n
        self.master_key = master_key
        self._counters: dict[int, int] = {}

    def register(self, i: int, counter: int) -> int:
        self._counters[i] = counter
        return self.public_key(i, counter)

    def public_key(self, i: int, counter: int) -> int:
        nbytes = (self.n.bit_length() + 7) // 8 + 16
        return _hash_stream_int("rabin-pk", [self.master_key, i, counter], nbytes) % self.n

    def verify(self, i: int, message: bytes, signature: int) -> bool:
        counter = self._counters.get(i)
        if counter is None:
            return False
        pk = self.public_key(i, counter)
        h = hash_to_unit(message, self.n)
        return signature * signature % self.n == h * h % self.n * pk % self.n


def rabin_sign(message: bytes, key: RabinKeyPair, n: int) -> int:
    """signature = H(message) * sk mod N; squaring both sides lets anyone
    check it against pk = sk^2 without knowing sk (though this particular
    form does reveal sk to a holder of H(message)^-1, see module docstring)."""
    return hash_to_unit(message, n) * key.secret_key % n


def rabin_verify(message: bytes, signature: int, public_key: int, n: int) -> bool:
    h = hash_to_unit(message, n)
    return signature * signature % n == h * h % n * public_key % n


# ---------------------------------------------------------------------------
# scheme B: multiplicative key chain in a prime-order group

@dataclass(frozen=True)
class SchnorrGroup:
    """Order-q subgroup of Z_P* with generator g."""

    p: int
    q: int
    g: int

    def __post_init__(self):
        if pow(self.g, self.q, self.p) != 1 or self.g == 1:
            raise ValueError("g must have exact order q")


@lru_cache(maxsize=None)
def generate_schnorr_group(q_bits: int = 160, p_bits: int = 512, seed: int = 0) -> SchnorrGroup:
    rng = random.Random(f"schnorr-group-{seed}")
    q = _random_prime(q_bits, rng)
    while True:
        r = rng.getrandbits(p_bits - q_bits) | (1 << (p_bits - q_bits - 1))
        r &= ~1  # keep r even so p is odd
        p = q * r + 1
        if p.bit_length() == p_bits and is_prime(p):
            break
    while True:
        h = rng.randrange(2, p - 1)
        g = pow(h, r, p)
        if g != 1:
            return SchnorrGroup(p, q, g)


def _index_hash(i: int, q: int) -> int:
    v = _hash_stream_int("chain-index", [i], (q.bit_length() + 7) // 8 + 16) % q
    return v if v != 0 else 1


@dataclass(frozen=True)
class GroupKeyPair:
    index: int
    public_key: int
    secret_key: int


class GroupChain:
    """sk_i = sk0 * H(i) mod q; pk_i = pk0^H(i), service-derivable."""

    def __init__(self, group: SchnorrGroup, sk0: int):
        if not 0 < sk0 < group.q:
            raise ValueError("sk0 must be in 1..q-1")
        self.group = group
        self.sk0 = sk0
        self.pk0 = pow(group.g, sk0, group.p)

    @classmethod
    def generate(cls, group: SchnorrGroup, seed: int = 0) -> "GroupChain":
        rng = random.Random(f"group-chain-{seed}")
        return cls(group, rng.randrange(1, group.q))

    def keys(self, i: int) -> GroupKeyPair:
        if i < 1:
            raise ValueError("coin indices start at 1")
        hi = _index_hash(i, self.group.q)
        sk = self.sk0 * hi % self.group.q
        return GroupKeyPair(i, pow(self.group.g, sk, self.group.p), sk)

    def service(self) -> "GroupService":
        return GroupService(self.group, self.pk0)


class GroupService:
    """Verifier side: derives pk_i from (pk0, i) alone."""

    def __init__(self, group: SchnorrGroup, pk0: int):
        self.group = group
        self.pk0 = pk0

    def public_key(self, i: int) -> int:
        return pow(self.pk0, _index_hash(i, self.group.q), self.group.p)

    def verify(self, i: int, message: bytes, signature: tuple[int, int]) -> bool:
        return schnorr_verify(message, signature, self.public_key(i), self.group)


def schnorr_sign(message: bytes, secret_key: int, group: SchnorrGroup) -> tuple[int, int]:
    """(challenge, response) with a deterministic per-(key, message) nonce."""
    q = group.q
    k = _hash_stream_int("nonce", [secret_key, message.hex()], (q.bit_length() + 7) // 8 + 16) % q
    k = k if k != 0 else 1
    r = pow(group.g, k, group.p)
    e = _hash_stream_int("chal", [r, message.hex()], (q.bit_length() + 7) // 8 + 16) % q
    s = (k + e * secret_key) % q
    return e, s


def schnorr_verify(message: bytes, signature: tuple[int, int], public_key: int, group: SchnorrGroup) -> bool:
    e, s = signature
    if not (0 <= e < group.q and 0 <= s < group.q):
        return False
    # r' = g^s * pk^-e
    r = pow(group.g, s, group.p) * pow(public_key, group.q - e, group.p) % group.p
    e2 = _hash_stream_int("chal", [r, message.hex()], (group.q.bit_length() + 7) // 8 + 16) % group.q
    return e2 == e


def master_key_from_leak(i: int, sk_i: int, group: SchnorrGroup) -> int:
    """The documented weakness: any single coin key reveals the master key."""
    inv = mod_inverse(ResidueInt(_index_hash(i, group.q), group.q)).value
    return sk_i * inv % group.q


# ---------------------------------------------------------------------------
# coin ledger

UNSPENT = "unspent"
SPENT = "spent"


@dataclass(frozen=True)
class SpendResult:
    accepted: bool
    reason: str  # "ok" | "BadSignature" | "AlreadySpent" | "UnknownCoin"


class CoinLedger:
    """Coin index -> state map; the only mutable object in this module.

    spend() is linearized by a per-ledger lock; states only ever move from
    unspent to spent.
    """

    def __init__(self, n_coins: int):
        self._states = {i: UNSPENT for i in range(1, n_coins + 1)}
        self._lock = threading.Lock()

    def state(self, i: int) -> str | None:
        return self._states.get(i)

    def spend(self, verifier, i: int, message: bytes, signature) -> SpendResult:
        with self._lock:
            state = self._states.get(i)
            if state is None:
                return SpendResult(False, "UnknownCoin")
            if state == SPENT:
                return SpendResult(False, "AlreadySpent")
            if not verifier.verify(i, message, signature):
                return SpendResult(False, "BadSignature")
            self._states[i] = SPENT
            return SpendResult(True, "ok")
