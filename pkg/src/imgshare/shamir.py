"""Threshold secret sharing of a single field element.

The secret is the constant term of a random polynomial of degree ``t - 1``;
participant shares are evaluations at their identifiers.  Everything here is
generic over the element classes in :mod:`imgshare.gf64`.
"""

from __future__ import annotations

import secrets
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from random import Random
from typing import Any

from .gf64 import FieldElement

_MAX_ID_DRAWS = 64


class ShamirError(ValueError):
    pass


class InsufficientShares(ShamirError):
    pass


class InconsistentShareWarning(UserWarning):
    """Surplus shares do not lie on the interpolated polynomial."""


@dataclass(frozen=True)
class ShamirShare:
    identifier: Any
    value: Any


@dataclass(frozen=True)
class ShamirPolynomial:
    """Coefficients ``[a_0, ..., a_{t-1}]``, ``a_0`` being the secret."""

    coefficients: tuple

    @classmethod
    def random(cls, secret, t: int, rng: Random | None = None) -> ShamirPolynomial:
        rng = rng or secrets.SystemRandom()
        field = type(secret)
        return cls((secret,) + tuple(field.random(rng) for _ in range(t - 1)))

    @property
    def secret(self):
        return self.coefficients[0]

    @property
    def threshold(self) -> int:
        return len(self.coefficients)

    def __call__(self, x):
        # Horner
        acc = self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            acc = acc * x + c
        return acc

    def shares(self, identifiers: Sequence) -> list[ShamirShare]:
        _check_identifiers(identifiers)
        return [ShamirShare(i, self(i)) for i in identifiers]


def _check_identifiers(identifiers: Sequence) -> None:
    for i in identifiers:
        if not i:
            raise ShamirError("identifier must be nonzero")
    if len(set(identifiers)) != len(identifiers):
        raise ShamirError("identifiers must be distinct")


def random_identifiers(n: int, rng: Random | None = None, field=FieldElement) -> list:
    """Draw ``n`` distinct nonzero identifiers by rejection sampling."""
    rng = rng or secrets.SystemRandom()
    ids: list = []
    seen = set()
    draws = 0
    while len(ids) < n:
        draws += 1
        if draws > n + _MAX_ID_DRAWS:
            raise ShamirError("could not draw distinct nonzero identifiers")
        candidate = field.random(rng)
        if candidate and candidate not in seen:
            seen.add(candidate)
            ids.append(candidate)
    return ids


def split(secret, t: int, n: int, identifiers: Sequence, rng: Random | None = None) -> list[ShamirShare]:
    """Split ``secret`` into ``n`` shares, any ``t`` of which recover it."""
    if not 1 <= t <= n:
        raise ShamirError(f"need 1 <= t <= n, got t={t}, n={n}")
    if len(identifiers) != n:
        raise ShamirError(f"expected {n} identifiers, got {len(identifiers)}")
    return ShamirPolynomial.random(secret, t, rng).shares(identifiers)


def _select(shares: Sequence[ShamirShare], t: int) -> list[ShamirShare]:
    if t < 1:
        raise ShamirError("threshold must be at least 1")
    if len(shares) < t:
        raise InsufficientShares(f"insufficient shares: have {len(shares)}, need {t}")
    _check_identifiers([s.identifier for s in shares])
    return list(shares[:t])


def lagrange_at(points: Sequence[ShamirShare], x):
    """Value at ``x`` of the unique polynomial through ``points``."""
    total = None
    for i, pi in enumerate(points):
        num = den = None
        for k, pk in enumerate(points):
            if k == i:
                continue
            a, b = x - pk.identifier, pi.identifier - pk.identifier
            num = a if num is None else num * a
            den = b if den is None else den * b
        term = pi.value if num is None else pi.value * num / den
        total = term if total is None else total + term
    return total


def reconstruct(shares: Sequence[ShamirShare], t: int, check_surplus: bool = True):
    """Recover the secret from the first ``t`` shares by Lagrange interpolation at 0.

    Shares beyond the first ``t`` are checked against the interpolated
    polynomial; a mismatch emits :class:`InconsistentShareWarning`.
    """
    used = _select(shares, t)
    zero = type(used[0].identifier).zero()
    secret = lagrange_at(used, zero)
    if check_surplus and len(shares) > t:
        for extra in shares[t:]:
            if lagrange_at(used, extra.identifier) != extra.value:
                warnings.warn(
                    "surplus share does not match the interpolated polynomial",
                    InconsistentShareWarning,
                    stacklevel=2,
                )
                break
    return secret


def solve_vandermonde(points: Sequence[ShamirShare]) -> ShamirPolynomial:
    """Coefficients of the polynomial through ``points`` by Gaussian elimination."""
    t = len(points)
    if t == 0:
        raise InsufficientShares("insufficient shares: need at least one point")
    field = type(points[0].identifier)
    rows = []
    for p in points:
        row, xp = [], field.one()
        for _ in range(t):
            row.append(xp)
            xp = xp * p.identifier
        rows.append(row + [p.value])

    for col in range(t):
        pivot = next((r for r in range(col, t) if rows[r][col]), None)
        if pivot is None:
            raise ShamirError("singular Vandermonde system")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        scale = rows[col][col].inverse()
        rows[col] = [v * scale for v in rows[col]]
        for r in range(t):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return ShamirPolynomial(tuple(row[t] for row in rows))


def reconstruct_via_linear_system(shares: Sequence[ShamirShare], t: int):
    """Same contract as :func:`reconstruct`, solved as a Vandermonde system."""
    return solve_vandermonde(_select(shares, t)).secret


def consistent_polynomial(shares: Sequence[ShamirShare], candidate) -> ShamirPolynomial:
    """A polynomial of degree <= len(shares) through ``shares`` with f(0) = candidate.

    With ``t - 1`` shares this exists for every candidate, which is why fewer
    than ``t`` shares say nothing about the secret.
    """
    zero = type(candidate).zero()
    return solve_vandermonde([ShamirShare(zero, candidate), *shares])
