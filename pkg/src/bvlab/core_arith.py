"""Exact integer arithmetic substrate.

Everything downstream (characters, multiplicative functions, discrepancy
sums) factors integers through a PrimeTable built here: a flat
smallest-prime-factor array, chosen because factorization is the dominant
operation at desk scale (limits up to ~1e8 are assumed to fit in memory).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import OutOfRangeError, ParameterError

# Smallest-prime-factor slot reported for n = 1: larger than any prime in
# range, so "P_minus(n) > y" style comparisons behave at n = 1.
PRIME_INF = 2**62

_CACHE_MAGIC = b"BVLAB1"


@dataclass(frozen=True)
class PrimeTable:
    """Smallest-prime-factor table covering 2..limit.

    spf[n] is the smallest prime factor of n; spf[n] == n iff n is prime.
    Entries 0 and 1 are padding. Immutable after construction, so it is
    safe to share across worker threads.
    """

    limit: int
    spf: np.ndarray

    @cached_property
    def primes(self) -> np.ndarray:
        idx = np.arange(self.limit + 1, dtype=self.spf.dtype)
        return np.flatnonzero(self.spf == idx)[2:]  # drop the n=0,1 artifacts

    def is_prime(self, n: int) -> bool:
        self._check(n)
        return n >= 2 and int(self.spf[n]) == n

    def primes_in(self, lo: float, hi: float) -> np.ndarray:
        """Primes p with lo < p <= hi."""
        ps = self.primes
        return ps[(ps > lo) & (ps <= hi)]

    def _check(self, n: int) -> None:
        if n < 1:
            raise ParameterError(f"n must be a positive integer, got {n}")
        if n > self.limit:
            raise OutOfRangeError(f"n={n} exceeds table limit {self.limit}")


@dataclass(frozen=True)
class FactoredInteger:
    """n together with its canonical factorization (primes ascending)."""

    n: int
    factors: tuple[tuple[int, int], ...]


def build_prime_table(limit: int) -> PrimeTable:
    """Sieve smallest prime factors for 2..limit.

    Ascending-prime sweep: the first prime that marks an index is its
    smallest prime factor, so each entry is written at most once.
    """
    if limit < 2:
        raise ParameterError(f"sieve limit must be >= 2, got {limit}")
    spf = np.arange(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            seg = spf[p * p :: p]
            unset = seg == np.arange(p * p, limit + 1, p, dtype=np.uint32)
            seg[unset] = p
    return PrimeTable(limit=limit, spf=spf)


def factorize(n: int, table: PrimeTable) -> FactoredInteger:
    """Canonical factorization of n via the spf table; factorize(1) is empty."""
    table._check(n)
    spf = table.spf
    factors: list[tuple[int, int]] = []
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        factors.append((p, e))
    return FactoredInteger(n=n, factors=tuple(factors))


def euler_phi(n: int, table: PrimeTable) -> int:
    """phi(n) = #{1 <= a <= n : gcd(a, n) = 1}, exact."""
    phi = 1
    for p, e in factorize(n, table).factors:
        phi *= (p - 1) * p ** (e - 1)
    return phi


def von_mangoldt(n: int, table: PrimeTable) -> float:
    """log p if n = p^k, else 0."""
    fs = factorize(n, table).factors
    if len(fs) == 1:
        return math.log(fs[0][0])
    return 0.0


def smoothness(n: int, table: PrimeTable) -> tuple[int, int]:
    """(P_plus, P_minus): largest and smallest prime factor of n.

    n = 1 returns (1, PRIME_INF) by convention, so "n is y-smooth" is
    exactly P_plus <= y for every n >= 1.
    """
    fs = factorize(n, table).factors
    if not fs:
        return (1, PRIME_INF)
    return (fs[-1][0], fs[0][0])


def p_plus_array(limit: int, table: PrimeTable) -> np.ndarray:
    """Vector of largest prime factors for 0..limit (entries 0,1 are 1).

    Ascending sweep over primes: the last prime to mark an index is its
    largest prime factor.
    """
    if limit > table.limit:
        raise OutOfRangeError(f"limit={limit} exceeds table limit {table.limit}")
    out = np.ones(limit + 1, dtype=np.int64)
    for p in table.primes[table.primes <= limit]:
        out[p::p] = p
    return out


def save_prime_table(table: PrimeTable, path) -> None:
    """Write the sieve cache: magic, little-endian u64 limit, u32 spf[2..limit]."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<Q", table.limit))
        fh.write(table.spf[2:].astype("<u4").tobytes())


def load_prime_table(path) -> PrimeTable:
    """Load a sieve cache, validating magic bytes and payload length."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:6] != _CACHE_MAGIC:
        raise ParameterError(f"{path}: not a sieve cache (bad magic)")
    if len(blob) < 14:
        raise ParameterError(f"{path}: truncated sieve cache header")
    (limit,) = struct.unpack("<Q", blob[6:14])
    if limit < 2:
        raise ParameterError(f"{path}: invalid cached limit {limit}")
    body = blob[14:]
    expected = 4 * (limit - 1)
    if len(body) != expected:
        raise ParameterError(
            f"{path}: payload is {len(body)} bytes, expected {expected} for limit {limit}"
        )
    spf = np.empty(limit + 1, dtype=np.uint32)
    spf[0] = 0
    spf[1] = 1
    spf[2:] = np.frombuffer(body, dtype="<u4")
    return PrimeTable(limit=int(limit), spf=spf)
