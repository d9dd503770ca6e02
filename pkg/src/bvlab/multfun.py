"""The class-C function algebra.

A MultFn is a multiplicative function given by a prime-power rule
(p, k) -> f(p^k); values at arbitrary n come from the factorization. An
ArithFn is a dense complex value array for non-multiplicative objects
(restrictions to primes, log twists, convolutions) and for feeding the
discrepancy machinery, which wants whole arrays anyway.

The log-derivative coefficients lambda_f live on prime powers and satisfy
the triangular recursion  k*log(p)*f(p^k) = sum_{j=1..k} lambda_f(p^j)
f(p^{k-j}); class C means |lambda_f| is dominated by the classical von
Mangoldt function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core_arith import PrimeTable
from .errors import ClassViolationError, OutOfRangeError, ParameterError

_TOL = 1e-12  # slack on the unit-disc check for prime-power values


class MultFn:
    """Multiplicative function from a prime-power rule, memoized per instance.

    The memo is write-once per prime power (idempotent overwrites of
    identical values), so concurrent evaluation is safe.
    """

    def __init__(
        self,
        rule: Callable[[int, int], complex],
        limit: int,
        label: str = "",
        validate: bool = True,
        completely_multiplicative: bool = False,
    ):
        if limit < 1:
            raise ParameterError(f"limit must be >= 1, got {limit}")
        self.rule = rule
        self.limit = limit
        self.label = label
        self.validate = validate
        self.completely_multiplicative = completely_multiplicative
        self._pp: dict[int, complex] = {}

    def pp_value(self, p: int, k: int) -> complex:
        """f(p^k), memoized; checks the unit-disc bound when validating."""
        key = p**k
        v = self._pp.get(key)
        if v is None:
            v = complex(self.rule(p, k))
            if self.validate and abs(v) > 1 + _TOL:
                raise ClassViolationError(
                    f"|f({p}^{k})| = {abs(v)} exceeds 1 (label={self.label!r})"
                )
            self._pp[key] = v
        return v


def make_multfn(
    rule: Callable[[int, int], complex],
    limit: int,
    label: str = "",
    completely_multiplicative: bool = False,
) -> MultFn:
    return MultFn(
        rule,
        limit,
        label=label,
        validate=True,
        completely_multiplicative=completely_multiplicative,
    )


def one(limit: int) -> MultFn:
    return make_multfn(lambda p, k: 1.0, limit, label="one", completely_multiplicative=True)


def moebius(limit: int) -> MultFn:
    return make_multfn(lambda p, k: -1.0 if k == 1 else 0.0, limit, label="moebius")


def liouville(limit: int) -> MultFn:
    return make_multfn(
        lambda p, k: float((-1) ** k), limit, label="liouville", completely_multiplicative=True
    )


def character_fn(chi, limit: int) -> MultFn:
    """A Dirichlet character wrapped as a completely multiplicative MultFn."""
    return make_multfn(
        lambda p, k: chi.value(p) ** k,
        limit,
        label=chi.serialize(),
        completely_multiplicative=True,
    )


def cm_multfn(prime_value: Callable[[int], complex], limit: int, label: str = "") -> MultFn:
    """Completely multiplicative function from a value-at-primes rule."""
    return make_multfn(
        lambda p, k: complex(prime_value(p)) ** k,
        limit,
        label=label,
        completely_multiplicative=True,
    )


def evaluate(f: MultFn, n: int, table: PrimeTable) -> complex:
    """f(n) as the product of rule(p^k) over the factorization of n."""
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    if n > f.limit:
        raise OutOfRangeError(f"n={n} exceeds function limit {f.limit}")
    if n > table.limit:
        raise OutOfRangeError(f"n={n} exceeds table limit {table.limit}")
    spf = table.spf
    out = 1 + 0j
    m = n
    while m > 1:
        p = int(spf[m])
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        out *= f.pp_value(p, k)
    return out


@dataclass
class ArithFn:
    """Dense complex values for 0..limit (index 0 unused, kept at 0).

    The array is treated as immutable after construction. `bounded` is
    metadata only: whether |values| <= 1 is known to hold.
    """

    values: np.ndarray
    limit: int
    label: str = ""
    bounded: Optional[bool] = None

    def __post_init__(self):
        if self.values.shape != (self.limit + 1,):
            raise ParameterError(
                f"values must have length limit+1={self.limit + 1}, got {self.values.shape}"
            )
        if self.values.dtype != np.complex128:
            self.values = self.values.astype(np.complex128)
        self.values[0] = 0
        self._is_real: Optional[bool] = None

    @property
    def is_real(self) -> bool:
        if self._is_real is None:
            self._is_real = bool(np.all(self.values.imag == 0))
        return self._is_real


def to_arith(f: MultFn, limit: int, table: PrimeTable) -> ArithFn:
    """Materialize f(1..limit) densely with one multiplicative sweep."""
    if limit > f.limit:
        raise OutOfRangeError(f"limit={limit} exceeds function limit {f.limit}")
    if limit > table.limit:
        raise OutOfRangeError(f"limit={limit} exceeds table limit {table.limit}")
    spf = table.spf[: limit + 1].tolist()
    vals = [0j] * (limit + 1)
    ppow = [0] * (limit + 1)  # spf-power part of n
    pexp = [0] * (limit + 1)  # its exponent
    if limit >= 1:
        vals[1] = 1 + 0j
    pp_cache: dict[int, complex] = {}
    pp_value = f.pp_value
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        if m % p == 0:
            pk = ppow[m] * p
            e = pexp[m] + 1
        else:
            pk = p
            e = 1
        ppow[n] = pk
        pexp[n] = e
        v = pp_cache.get(pk)
        if v is None:
            v = pp_value(p, e)
            pp_cache[pk] = v
        vals[n] = vals[n // pk] * v
    return ArithFn(
        values=np.array(vals, dtype=np.complex128),
        limit=limit,
        label=f.label,
        bounded=f.validate or None,
    )


def dirichlet_convolve(f: ArithFn, g: ArithFn, limit: int) -> ArithFn:
    """h(n) = sum_{d|n} f(d) g(n/d) for all n <= limit (divisor sweep)."""
    if f.limit < limit or g.limit < limit:
        raise ParameterError(
            f"operands defined to {f.limit} and {g.limit}; need {limit}"
        )
    fv, gv = f.values, g.values
    h = np.zeros(limit + 1, dtype=np.complex128)
    for d in range(1, limit + 1):
        fd = fv[d]
        if fd != 0:
            h[d::d] += fd * gv[1 : limit // d + 1]
    return ArithFn(values=h, limit=limit, label=f"({f.label}*{g.label})")


def delta_fn(limit: int) -> ArithFn:
    """The convolution identity: 1 at n=1, else 0."""
    v = np.zeros(limit + 1, dtype=np.complex128)
    v[1] = 1
    return ArithFn(values=v, limit=limit, label="delta")


def inverse(f: MultFn, limit: int) -> MultFn:
    """Convolution inverse g: (f*g)(n) = [n=1], via the prime-power recursion.

    g(p^k) = -sum_{j=1..k} f(p^j) g(p^{k-j}). No unit-disc validation: the
    inverse of a class-C function is class-C, but other inputs may blow up.
    """
    cache: dict[tuple[int, int], complex] = {}

    def grule(p: int, k: int) -> complex:
        for kk in range(1, k + 1):
            if (p, kk) in cache:
                continue
            acc = 0j
            for j in range(1, kk + 1):
                gprev = 1 + 0j if kk == j else cache[(p, kk - j)]
                acc += f.pp_value(p, j) * gprev
            cache[(p, kk)] = -acc
        return cache[(p, k)]

    return MultFn(grule, limit, label=f"inv({f.label})", validate=False)


@dataclass
class LambdaSeq:
    """lambda_f(n) for n <= limit: supported on prime powers.

    is_class_c records whether |lambda_f(p^k)| <= log p + 1e-9 everywhere in
    range; first_violation is the least offending prime power, if any.
    """

    values: np.ndarray
    limit: int
    is_class_c: bool
    first_violation: Optional[int] = None


def _lambda_rows(f: MultFn, limit: int, table: PrimeTable):
    """Yield (p, k, p^k, lambda_f(p^k)) for all prime powers <= limit."""
    for p in table.primes[table.primes <= limit]:
        p = int(p)
        logp = math.log(p)
        fs = [1 + 0j]  # f(p^j)
        lams: list[complex] = []  # lambda_f(p^j), j >= 1
        pk = p
        k = 1
        while pk <= limit:
            fs.append(f.pp_value(p, k))
            acc = fs[k] * k * logp
            for j in range(1, k):
                acc -= lams[j - 1] * fs[k - j]
            lams.append(acc)
            yield p, k, pk, acc
            pk *= p
            k += 1


def lambda_seq(f: MultFn, limit: int, table: PrimeTable) -> LambdaSeq:
    vals = np.zeros(limit + 1, dtype=np.complex128)
    worst: Optional[int] = None
    for p, _k, pk, lam in _lambda_rows(f, limit, table):
        vals[pk] = lam
        if abs(lam) > math.log(p) + 1e-9 and (worst is None or pk < worst):
            worst = pk
    return LambdaSeq(values=vals, limit=limit, is_class_c=worst is None, first_violation=worst)


def class_c_check(f: MultFn, limit: int, table: PrimeTable) -> tuple[bool, Optional[int]]:
    """True iff |lambda_f(p^k)| <= log p + 1e-9 for all p^k <= limit.

    On failure, returns the smallest violating prime power as witness.
    """
    worst: Optional[int] = None
    for p, _k, pk, lam in _lambda_rows(f, limit, table):
        if abs(lam) > math.log(p) + 1e-9 and (worst is None or pk < worst):
            worst = pk
    return (worst is None, worst)


def smooth_truncation(f: MultFn, y: float) -> MultFn:
    """f_y: agrees with f on prime powers with p <= y, zero above."""
    if y < 2:
        raise ParameterError(f"smoothness bound must be >= 2, got {y}")

    def rule(p: int, k: int) -> complex:
        return f.pp_value(p, k) if p <= y else 0j

    return MultFn(
        rule,
        f.limit,
        label=f"{f.label}|smooth<={y:g}",
        validate=False,  # inner values were already checked lazily
        completely_multiplicative=False,
    )


def restrict_to_primes(f: MultFn, table: PrimeTable, limit: Optional[int] = None) -> ArithFn:
    """f * 1_P: the values of f at primes, zero elsewhere."""
    lim = f.limit if limit is None else limit
    if lim > table.limit:
        raise OutOfRangeError(f"limit={lim} exceeds table limit {table.limit}")
    vals = np.zeros(lim + 1, dtype=np.complex128)
    for p in table.primes[table.primes <= lim]:
        vals[p] = f.pp_value(int(p), 1)
    return ArithFn(values=vals, limit=lim, label=f"{f.label}|primes")


def log_twist(f: ArithFn, normalize_by: float) -> ArithFn:
    """n -> f(n) log(n) / normalize_by."""
    if normalize_by <= 0:
        raise ParameterError(f"normalize_by must be positive, got {normalize_by}")
    logs = np.zeros(f.limit + 1)
    if f.limit >= 1:
        logs[1:] = np.log(np.arange(1, f.limit + 1))
    return ArithFn(
        values=f.values * logs / normalize_by,
        limit=f.limit,
        label=f"{f.label}*log/{normalize_by:g}",
    )


def truncated_convolution(f: ArithFn, g: ArithFn, cutoff: float, limit: int) -> ArithFn:
    """h(r) = sum over r = m*n with both m <= cutoff and n <= cutoff."""
    if f.limit < limit or g.limit < limit:
        raise ParameterError(
            f"operands defined to {f.limit} and {g.limit}; need {limit}"
        )
    cut = min(int(math.floor(cutoff)), limit)
    fv, gv = f.values, g.values
    h = np.zeros(limit + 1, dtype=np.complex128)
    for d in range(1, cut + 1):
        fd = fv[d]
        if fd != 0:
            ln = min(cut, limit // d)
            h[d : d * ln + 1 : d] += fd * gv[1 : ln + 1]
    return ArithFn(values=h, limit=limit, label=f"({f.label}*{g.label})|cut{cutoff:g}")


def companion_split(f: MultFn, limit: int) -> tuple[MultFn, MultFn]:
    """Split f = g_powerful * f_star.

    f_star is completely multiplicative with f_star(p) = f(p); the
    correction g has g(p) = 0 and g(p^k) = f(p^k) - f(p) f(p^{k-1}) for
    k >= 2, so it is supported on powerful numbers and |g(p^k)| <= 2.
    """
    f_star = MultFn(
        lambda p, k: f.pp_value(p, 1) ** k,
        limit,
        label=f"{f.label}*cm",
        validate=False,
        completely_multiplicative=True,
    )

    def grule(p: int, k: int) -> complex:
        if k == 1:
            return 0j
        return f.pp_value(p, k) - f.pp_value(p, 1) * f.pp_value(p, k - 1)

    g_powerful = MultFn(grule, limit, label=f"{f.label}|powerful", validate=False)
    return f_star, g_powerful
