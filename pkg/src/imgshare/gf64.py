"""Arithmetic in GF(2^64) and a small prime field used for cross-checks.

Elements of GF(2^64) are binary polynomials of degree < 64 packed into a
64-bit integer (bit k is the coefficient of X^k).  The field is defined by
the degree-64 Conway polynomial

    X^64 + X^33 + X^30 + X^26 + X^25 + X^24 + X^23 + X^22 + X^21 + X^20
         + X^18 + X^13 + X^12 + X^11 + X^10 + X^7 + X^5 + X^4 + X^2 + X + 1

Both element classes expose the same small surface (``zero``, ``one``,
``from_int``, ``random``, ``+``, ``-``, ``*``, ``inverse``, ``**``) so the
Shamir code can run over either of them.
"""

from __future__ import annotations

import random as _random

MASK64 = (1 << 64) - 1

#: Full reduction polynomial, 65 bits.
CONWAY_POLY = 0x10000000247F43CB7
#: Exponents of the low terms of CONWAY_POLY (everything except X^64).
_LOW_TERMS = tuple(k for k in range(64) if (CONWAY_POLY >> k) & 1)

ORDER = 1 << 64


class FieldError(ArithmeticError):
    """Raised for undefined field operations (division by zero)."""


def clmul(a: int, b: int) -> int:
    """Carry-less product of two 64-bit polynomials (up to 127 bits)."""
    # 4-bit window over ``a``: 16 table lookups instead of 64 shifts.
    table = [0] * 16
    for i in range(1, 16):
        table[i] = table[i >> 1] << 1 if not i & 1 else table[i - 1] ^ b
    r = 0
    for shift in range(60, -1, -4):
        r = (r << 4) ^ table[(a >> shift) & 0xF]
    return r


def reduce(x: int) -> int:
    """Reduce a polynomial of degree < 128 modulo the Conway polynomial."""
    # X^64 == sum(X^k for k in _LOW_TERMS); at most three folds are needed.
    high = x >> 64
    while high:
        x &= MASK64
        for k in _LOW_TERMS:
            x ^= high << k
        high = x >> 64
    return x


def add(a: int, b: int) -> int:
    return a ^ b


def mul(a: int, b: int) -> int:
    return reduce(clmul(a, b))


def power(a: int, e: int) -> int:
    if e < 0:
        raise ValueError("exponent must be non-negative")
    result = 1
    while e:
        if e & 1:
            result = mul(result, a)
        a = mul(a, a)
        e >>= 1
    return result


def inv(a: int) -> int:
    """Inverse via a^(2^64 - 2)."""
    if a == 0:
        raise FieldError("division by zero in field")
    return power(a, ORDER - 2)


class FieldElement:
    """An element of GF(2^64)."""

    __slots__ = ("bits",)

    def __init__(self, bits: int) -> None:
        if not 0 <= bits <= MASK64:
            raise ValueError(f"{bits:#x} does not fit in 64 bits")
        self.bits = bits

    @classmethod
    def zero(cls) -> FieldElement:
        return cls(0)

    @classmethod
    def one(cls) -> FieldElement:
        return cls(1)

    @classmethod
    def from_int(cls, value: int) -> FieldElement:
        return cls(value)

    @classmethod
    def from_bytes(cls, data: bytes) -> FieldElement:
        if len(data) != 8:
            raise ValueError("a field element is serialized as exactly 8 bytes")
        return cls(int.from_bytes(data, "big"))

    @classmethod
    def random(cls, rng: _random.Random) -> FieldElement:
        return cls(int.from_bytes(rng.randbytes(8), "big"))

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes(8, "big")

    def __int__(self) -> int:
        return self.bits

    def __add__(self, other: FieldElement) -> FieldElement:
        return FieldElement(self.bits ^ other.bits)

    # characteristic 2: subtraction is addition
    __sub__ = __add__

    def __neg__(self) -> FieldElement:
        return self

    def __mul__(self, other: FieldElement) -> FieldElement:
        return FieldElement(mul(self.bits, other.bits))

    def __truediv__(self, other: FieldElement) -> FieldElement:
        return self * other.inverse()

    def __pow__(self, e: int) -> FieldElement:
        return FieldElement(power(self.bits, e))

    def inverse(self) -> FieldElement:
        return FieldElement(inv(self.bits))

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.bits == other.bits
        if isinstance(other, int):
            return self.bits == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("gf64", self.bits))

    def __repr__(self) -> str:
        return f"FieldElement({self.bits:#018x})"


class PrimeFieldElement:
    """Element of GF(p) for p = 2^31 - 1.

    Only used to replay small integer examples through the Shamir code.
    """

    __slots__ = ("value",)
    MODULUS = (1 << 31) - 1

    def __init__(self, value: int) -> None:
        self.value = value % self.MODULUS

    @classmethod
    def zero(cls) -> PrimeFieldElement:
        return cls(0)

    @classmethod
    def one(cls) -> PrimeFieldElement:
        return cls(1)

    @classmethod
    def from_int(cls, value: int) -> PrimeFieldElement:
        return cls(value)

    @classmethod
    def random(cls, rng: _random.Random) -> PrimeFieldElement:
        return cls(rng.randrange(cls.MODULUS))

    def __int__(self) -> int:
        return self.value

    def __add__(self, other: PrimeFieldElement) -> PrimeFieldElement:
        return PrimeFieldElement(self.value + other.value)

    def __sub__(self, other: PrimeFieldElement) -> PrimeFieldElement:
        return PrimeFieldElement(self.value - other.value)

    def __neg__(self) -> PrimeFieldElement:
        return PrimeFieldElement(-self.value)

    def __mul__(self, other: PrimeFieldElement) -> PrimeFieldElement:
        return PrimeFieldElement(self.value * other.value)

    def __truediv__(self, other: PrimeFieldElement) -> PrimeFieldElement:
        return self * other.inverse()

    def __pow__(self, e: int) -> PrimeFieldElement:
        return PrimeFieldElement(pow(self.value, e, self.MODULUS))

    def inverse(self) -> PrimeFieldElement:
        if self.value == 0:
            raise FieldError("division by zero in field")
        return PrimeFieldElement(pow(self.value, self.MODULUS - 2, self.MODULUS))

    def __bool__(self) -> bool:
        return self.value != 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, PrimeFieldElement):
            return self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("gfp", self.value))

    def __repr__(self) -> str:
        return f"PrimeFieldElement({self.value})"
