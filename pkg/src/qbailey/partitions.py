"""Brute-force partition statistics.

Everything here enumerates partitions explicitly, so it serves as an oracle
independent of the series arithmetic.  Intended for n up to about 40.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Union

from .series import QSeries, from_coeffs

MAX_ENUMERATION = 40


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("parts must be nonincreasing")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def largest(self) -> int:
        return self.parts[0] if self.parts else 0

    @property
    def smallest(self) -> int:
        return self.parts[-1] if self.parts else 0

    @property
    def rank(self) -> int:
        return self.largest - len(self.parts)

    @property
    def smallest_multiplicity(self) -> int:
        if not self.parts:
            return 0
        s = self.parts[-1]
        return sum(1 for p in self.parts if p == s)


@dataclass(frozen=True)
class RankTable:
    n: int
    counts: dict = field(default_factory=dict)

    def moment(self, k: int) -> int:
        return sum(m**k * c for m, c in self.counts.items())


def _partitions_max(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions_max(n - first, first):
            yield (first,) + rest


def partitions(n: int) -> Iterator[Partition]:
    """All partitions of n in lexicographically decreasing order."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    for parts in _partitions_max(n, n):
        yield Partition(parts)


@lru_cache(maxsize=None)
def _all(n: int) -> tuple[Partition, ...]:
    return tuple(partitions(n))


def p(n: int) -> int:
    return len(_all(n))


def spt(n: int) -> int:
    if n < 1:
        raise ValueError("spt is defined for n >= 1")
    return sum(lam.smallest_multiplicity for lam in _all(n))


def spt_star(M: int, n: int) -> int:
    """Smallest-part count over partitions with no part above smallest + M."""
    if M < 0 or n < 1:
        raise ValueError("spt_star needs M >= 0 and n >= 1")
    return sum(
        lam.smallest_multiplicity
        for lam in _all(n)
        if lam.largest <= lam.smallest + M
    )


def rank_counts(n: int) -> RankTable:
    if n < 1:
        raise ValueError("rank_counts needs n >= 1")
    return RankTable(n, dict(sorted(Counter(lam.rank for lam in _all(n)).items())))


def raw_second_moment(n: int) -> int:
    """Sum of m^2 N(m, n) over all ranks m."""
    return rank_counts(n).moment(2)


def second_moment(n: int) -> int:
    """N_2(n) in the normalization for which spt(n) = n p(n) - N_2(n).

    This is half the raw moment sum m^2 N(m, n); rank symmetry makes it an
    integer.
    """
    raw = raw_second_moment(n)
    if raw % 2:
        raise ArithmeticError(f"odd raw second moment at n={n}; rank table is not symmetric")
    return raw // 2


def sigma(n: int) -> int:
    """Sum of the divisors of n, by trial division."""
    return sum(d for d in range(1, n + 1) if n % d == 0)


Stat = Union[str, tuple, Callable[[int], int]]


def _stat_fn(stat: Stat) -> Callable[[int], int]:
    if callable(stat):
        return stat
    if stat == "p":
        return p
    if stat == "spt":
        return lambda n: spt(n) if n >= 1 else 0
    if isinstance(stat, tuple) and len(stat) == 2 and stat[0] in ("spt_star", "spt-star"):
        M = stat[1]
        return lambda n: spt_star(M, n) if n >= 1 else 0
    if stat == "sigma":
        return lambda n: sigma(n) if n >= 1 else 0
    raise ValueError(f"unknown statistic {stat!r}")


def gf_from_stat(stat: Stat, T: int) -> QSeries:
    """sum_{n <= T} stat(n) q^n as a series of order T."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    fn = _stat_fn(stat)
    return from_coeffs([fn(n) for n in range(T + 1)], order=T)
