"""Slow, independent reference implementations used to check the fast paths.

Nothing here imports the arithmetic or cipher internals it is meant to
check: the GF(2^64) oracle rebuilds the modulus from its exponent list and
multiplies bit by bit, and AES is a from-scratch FIPS-197 block encryptor
whose S-box is generated rather than tabulated.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable

from scipy import stats

CONWAY_EXPONENTS = (64, 33, 30, 26, 25, 24, 23, 22, 21, 20, 18, 13, 12, 11, 10, 7, 5, 4, 2, 1, 0)
MODULUS = sum(1 << e for e in CONWAY_EXPONENTS)


# -- GF(2^64) -------------------------------------------------------------------------

def schoolbook_mul(a: int, b: int) -> int:
    """Shift-and-XOR product over 128 bits, then long division by the modulus."""
    prod = 0
    for i in range(64):
        if (b >> i) & 1:
            prod ^= a << i
    for deg in range(126, 63, -1):
        if (prod >> deg) & 1:
            prod ^= MODULUS << (deg - 64)
    return prod


def schoolbook_inv(a: int) -> int:
    """Inverse by the binary extended Euclidean algorithm."""
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    r0, r1, s0, s1 = MODULUS, a, 0, 1
    while r1:
        while r0.bit_length() >= r1.bit_length():
            shift = r0.bit_length() - r1.bit_length()
            r0 ^= r1 << shift
            s0 ^= s1 << shift
        r0, r1, s0, s1 = r1, r0, s1, s0
    assert r0 == 1
    return s0


def gauss_secret(points: list[tuple[int, int]]) -> int:
    """f(0) of the polynomial through ``points`` in GF(2^64), by Gauss-Jordan on raw ints."""
    t = len(points)
    rows = []
    for x, y in points:
        row, xp = [], 1
        for _ in range(t):
            row.append(xp)
            xp = schoolbook_mul(xp, x)
        rows.append(row + [y])
    for c in range(t):
        p = next(r for r in range(c, t) if rows[r][c])
        rows[c], rows[p] = rows[p], rows[c]
        iv = schoolbook_inv(rows[c][c])
        rows[c] = [schoolbook_mul(v, iv) for v in rows[c]]
        for r in range(t):
            if r != c and rows[r][c]:
                f = rows[r][c]
                rows[r] = [a ^ schoolbook_mul(f, b) for a, b in zip(rows[r], rows[c])]
    return rows[0][t]


# -- the worked integer example -----------------------------------------------------------

EXAMPLE_COEFFS = (1234, 166, 94)
EXAMPLE_SHARES = ((1, 1494), (3, 2578), (4, 3402), (6, 5614), (8, 8578), (11, 14434))


def integer_lagrange_at_zero(points) -> Fraction:
    """Exact rational Lagrange interpolation at 0 (plain integers, no field)."""
    total = Fraction(0)
    for i, (xi, yi) in enumerate(points):
        term = Fraction(yi)
        for k, (xk, _) in enumerate(points):
            if k != i:
                term *= Fraction(-xk, xi - xk)
        total += term
    return total


# -- AES-128 (FIPS 197) -------------------------------------------------------------------

def _xtime(b: int) -> int:
    b <<= 1
    return (b ^ 0x11B) if b & 0x100 else b


def _gmul8(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a = _xtime(a)
        b >>= 1
    return r


def _make_sbox() -> list[int]:
    sbox = []
    for x in range(256):
        inv = 0 if x == 0 else next(y for y in range(1, 256) if _gmul8(x, y) == 1)
        s = inv
        for shift in range(1, 5):
            s ^= ((inv << shift) | (inv >> (8 - shift))) & 0xFF
        sbox.append(s ^ 0x63)
    return sbox


_SBOX = _make_sbox()


def _expand_key(key: bytes) -> list[list[int]]:
    words = [list(key[4 * i : 4 * i + 4]) for i in range(4)]
    rcon = 1
    for i in range(4, 44):
        w = list(words[i - 1])
        if i % 4 == 0:
            w = [_SBOX[b] for b in w[1:] + w[:1]]
            w[0] ^= rcon
            rcon = _xtime(rcon)
        words.append([a ^ b for a, b in zip(words[i - 4], w)])
    return [sum(words[4 * r : 4 * r + 4], []) for r in range(11)]


def reference_aes_encrypt_block(key: bytes, block: bytes) -> bytes:
    """One AES-128 block, column-major state as in FIPS 197."""
    assert len(key) == 16 and len(block) == 16
    rk = _expand_key(key)
    s = [b ^ k for b, k in zip(block, rk[0])]
    for rnd in range(1, 11):
        s = [_SBOX[b] for b in s]
        # ShiftRows: byte (row r, col c) sits at index 4c + r
        s = [s[4 * ((c + r) % 4) + r] for c in range(4) for r in range(4)]
        if rnd != 10:
            mixed = []
            for c in range(4):
                a = s[4 * c : 4 * c + 4]
                mixed += [
                    _gmul8(a[0], 2) ^ _gmul8(a[1], 3) ^ a[2] ^ a[3],
                    a[0] ^ _gmul8(a[1], 2) ^ _gmul8(a[2], 3) ^ a[3],
                    a[0] ^ a[1] ^ _gmul8(a[2], 2) ^ _gmul8(a[3], 3),
                    _gmul8(a[0], 3) ^ a[1] ^ a[2] ^ _gmul8(a[3], 2),
                ]
            s = mixed
        s = [b ^ k for b, k in zip(s, rk[rnd])]
    return bytes(s)


def reference_cbc_encrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    out, prev = [], iv
    for i in range(0, len(data), 16):
        prev = reference_aes_encrypt_block(key, bytes(a ^ b for a, b in zip(data[i : i + 16], prev)))
        out.append(prev)
    return b"".join(out)


def reference_ofb_encrypt(key: bytes, iv: bytes, data: bytes) -> bytes:
    out, stream = [], iv
    for i in range(0, len(data), 16):
        stream = reference_aes_encrypt_block(key, stream)
        out.append(bytes(a ^ b for a, b in zip(data[i : i + 16], stream)))
    return b"".join(out)


FIPS197_KEY = bytes(range(16))
FIPS197_PLAINTEXT = bytes.fromhex("00112233445566778899aabbccddeeff")
FIPS197_CIPHERTEXT = bytes.fromhex("69c4e0d86a7b0430d8cdb78070b4c55a")
# first 16 bytes of SHA-256 over eight zero bytes (checked with openssl dgst)
SHA256_ZERO_ID_PREFIX = bytes.fromhex("af5570f5a1810b7af78caf4bc70a660f")


# -- statistics -----------------------------------------------------------------------------

def byte_entropy(data: bytes) -> float:
    """Shannon entropy in bits per byte."""
    n = len(data)
    return -sum(c / n * math.log2(c / n) for c in Counter(data).values())


def chi_square_uniform_pvalue(data: bytes) -> float:
    counts = [0] * 256
    for b, c in Counter(data).items():
        counts[b] = c
    return float(stats.chisquare(counts).pvalue)


# -- runner ---------------------------------------------------------------------------------

@dataclass
class OracleReport:
    name: str
    cases: int = 0
    mismatches: int = 0
    first_failure: Any = None

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def check(self, passed: bool, case: Any) -> None:
        self.cases += 1
        if not passed:
            self.mismatches += 1
            if self.first_failure is None:
                self.first_failure = case


def _run(name: str, body: Callable[[OracleReport], None]) -> OracleReport:
    report = OracleReport(name)
    try:
        body(report)
    except Exception as exc:  # a crashing oracle is a failure, not an abort
        report.check(False, f"{type(exc).__name__}: {exc}")
    return report


def run_all(seed: int = 0, cases: int = 10_000) -> list[OracleReport]:
    """Check every fast path against its oracle; never raises."""
    from . import cipher, gf64, shamir
    from .gf64 import FieldElement, PrimeFieldElement

    rng = random.Random(seed)
    reports = []

    def gf_mul(r: OracleReport):
        r.check(gf64.mul(2, 2) == 4, (2, 2))
        for _ in range(cases):
            a, b = rng.getrandbits(64), rng.getrandbits(64)
            r.check(gf64.mul(a, b) == schoolbook_mul(a, b), (a, b))

    def gf_inv(r: OracleReport):
        for _ in range(max(1, cases // 10)):
            a = rng.getrandbits(64) or 1
            r.check(gf64.inv(a) == schoolbook_inv(a), a)

    def example(r: OracleReport):
        poly = shamir.ShamirPolynomial(tuple(PrimeFieldElement(c) for c in EXAMPLE_COEFFS))
        got = poly.shares([PrimeFieldElement(x) for x, _ in EXAMPLE_SHARES])
        r.check([(int(s.identifier), int(s.value)) for s in got] == list(EXAMPLE_SHARES), "shares")
        pts = [EXAMPLE_SHARES[i] for i in (1, 4, 5)]
        sh = [shamir.ShamirShare(PrimeFieldElement(x), PrimeFieldElement(y)) for x, y in pts]
        r.check(int(shamir.reconstruct(sh, 3)) == 1234, "lagrange")
        r.check(integer_lagrange_at_zero(pts) == 1234, "rational")

    def interpolation(r: OracleReport):
        for _ in range(max(1, cases // 100)):
            n = rng.randint(1, 6)
            t = rng.randint(1, n)
            secret = FieldElement.random(rng)
            ids = shamir.random_identifiers(n, rng)
            shares = shamir.split(secret, t, n, ids, rng)
            for subset in combinations(shares, t):
                pts = [(s.identifier.bits, s.value.bits) for s in subset]
                r.check(gauss_secret(pts) == secret.bits == shamir.reconstruct(subset, t).bits, pts)

    def aes(r: OracleReport):
        r.check(reference_aes_encrypt_block(FIPS197_KEY, FIPS197_PLAINTEXT) == FIPS197_CIPHERTEXT, "ref kat")
        r.check(
            cipher.encrypt(FIPS197_PLAINTEXT, FIPS197_KEY, bytes(16), "cbc") == FIPS197_CIPHERTEXT, "lib kat"
        )
        for _ in range(20):
            key, iv = rng.randbytes(16), rng.randbytes(16)
            msg = rng.randbytes(16 * rng.randint(0, 6))
            r.check(cipher.encrypt(msg, key, iv, "cbc") == reference_cbc_encrypt(key, iv, msg), ("cbc", msg))
            r.check(cipher.encrypt(msg, key, iv, "ofb") == reference_ofb_encrypt(key, iv, msg), ("ofb", msg))

    def iv(r: OracleReport):
        r.check(cipher.derive_iv(FieldElement(0), "sha") == SHA256_ZERO_ID_PREFIX, "sha zero")
        r.check(
            cipher.derive_iv(FieldElement(0x0102030405060708), "concat")
            == bytes.fromhex("01020304050607080102030405060708"),
            "concat",
        )

    for name, body in [
        ("gf64-mul-schoolbook", gf_mul),
        ("gf64-inv-euclid", gf_inv),
        ("shamir-integer-example", example),
        ("shamir-gauss-jordan", interpolation),
        ("aes-reference", aes),
        ("iv-derivation", iv),
    ]:
        reports.append(_run(name, body))
    return reports
