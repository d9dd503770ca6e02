"""The explicit function that is well-distributed in every fixed progression
yet fails on average over moduli.

Construction, at scale x with tuning exponent gamma and modulus size Q:
take y = x/(log x)^gamma and z = 2(log x)^gamma, and let script_P be the
primes p in (y/2, y] such that some prime q in (Q, 2Q] divides p - 1. The
completely multiplicative f has f(p) = 0 for p <= z or p > y, f(p) = -1 on
script_P, and f(p) = 1 on the remaining primes in (z, y].

Because z * (y/2) = x, no n <= x can contain a script_P prime together
with another nonzero-valued factor, which gives the exact pointwise
identity f(n) = |f(n)| - 2*[n in script_P] on [1, x]. The bias of script_P
in the progressions 1 mod q is then measured exactly through the plain
discrepancy of the indicator function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core_arith import PrimeTable, euler_phi, factorize
from .discrepancy import delta
from .errors import InvariantViolationError, OutOfRangeError, ParameterError
from .multfun import ArithFn, MultFn, evaluate, to_arith

DEFAULT_GAMMA = 2.0


@dataclass(frozen=True)
class CounterexampleSpec:
    x: int
    gamma: float
    Q: int
    y: float
    z: float
    script_P: frozenset[int]


def default_Q(x: int) -> int:
    """round(x^0.35), inside the (x^(1/3), x^(2/5)] window the lower bound needs."""
    return round(x**0.35)


def primes_with_divisor_in(
    y_lo: float, y_hi: float, q_lo: float, q_hi: float, table: PrimeTable
) -> frozenset[int]:
    """Primes p in (y_lo, y_hi] such that p-1 has a prime factor in (q_lo, q_hi]."""
    if y_hi > table.limit:
        raise OutOfRangeError(f"y={y_hi} exceeds table limit {table.limit}")
    out = []
    for p in table.primes_in(y_lo, y_hi):
        p = int(p)
        for r, _e in factorize(p - 1, table).factors:
            if q_lo < r <= q_hi:
                out.append(p)
                break
    return frozenset(out)


def plan_counterexample(
    x: int, gamma: float, Q: int | None, table: PrimeTable
) -> CounterexampleSpec:
    if Q is None:
        Q = default_Q(x)
    logx = math.log(x)
    y = x / logx**gamma
    z = 2 * logx**gamma
    if y / 2 < 2:
        raise ParameterError(f"y/2={y / 2:g} < 2: x too small for gamma={gamma}")
    if y > table.limit or 2 * Q > table.limit:
        raise OutOfRangeError(
            f"need table limit >= max(y={y:g}, 2Q={2 * Q}); have {table.limit}"
        )
    script_P = primes_with_divisor_in(y / 2, y, Q, 2 * Q, table)
    return CounterexampleSpec(x=x, gamma=gamma, Q=Q, y=y, z=z, script_P=script_P)


def build_script_P(x: int, gamma: float, Q: int, table: PrimeTable) -> frozenset[int]:
    return plan_counterexample(x, gamma, Q, table).script_P


def counterexample_multfn(spec: CounterexampleSpec, table: PrimeTable) -> MultFn:
    """The completely multiplicative f with values in {-1, 0, 1} at primes."""
    script_P = spec.script_P
    z, y = spec.z, spec.y

    def at_prime(p: int) -> float:
        if p <= z or p > y:
            return 0.0
        if p in script_P:
            return -1.0
        return 1.0

    return MultFn(
        lambda p, k: at_prime(p) ** k,
        spec.x,
        label=f"counterexample(x={spec.x},gamma={spec.gamma:g},Q={spec.Q})",
        completely_multiplicative=True,
    )


def build_counterexample(x: int, gamma: float, Q: int, table: PrimeTable) -> MultFn:
    return counterexample_multfn(plan_counterexample(x, gamma, Q, table), table)


def identity_validity_bound(spec: CounterexampleSpec) -> int:
    """Largest n up to which f(n) = |f(n)| - 2*[n in script_P] is asserted."""
    return int(min(spec.x, (spec.y / 2) ** 2))


def pointwise_identity_check(
    spec: CounterexampleSpec, n_range, table: PrimeTable
) -> float:
    """max |f(n) - (|f(n)| - 2*[n in script_P])| over the given n; expected 0."""
    f = counterexample_multfn(spec, table)
    bound = identity_validity_bound(spec)
    if isinstance(n_range, range) and n_range.step == 1 and len(n_range) > 0:
        lo, hi = n_range.start, n_range.stop - 1
        if lo < 1 or hi > bound:
            raise ParameterError(
                f"range [{lo}, {hi}] outside the validity range [1, {bound}]"
            )
        fd = to_arith(f, hi, table).values
        ind = np.zeros(hi + 1)
        for p in spec.script_P:
            if p <= hi:
                ind[p] = 1.0
        resid = np.abs(fd - (np.abs(fd) - 2 * ind))
        return float(np.max(resid[lo : hi + 1]))
    worst = 0.0
    for n in n_range:
        if not 1 <= n <= bound:
            raise ParameterError(f"n={n} outside the validity range [1, {bound}]")
        fn = evaluate(f, n, table)
        rhs = abs(fn) - 2 * (n in spec.script_P)
        worst = max(worst, abs(fn - rhs))
    return worst


def range_extension_check(spec: CounterexampleSpec, table: PrimeTable) -> dict[int, bool]:
    """Per prime q in (Q, 2Q]: counting p = 1 (mod q) over script_P equals
    counting over all primes in (y/2, y]."""
    out = {}
    ps = [int(p) for p in table.primes_in(spec.y / 2, spec.y)]
    for q in table.primes_in(spec.Q, 2 * spec.Q):
        q = int(q)
        in_script = sum(1 for p in spec.script_P if p % q == 1)
        in_all = sum(1 for p in ps if p % q == 1)
        out[q] = in_script == in_all
    return out


def script_P_indicator(spec: CounterexampleSpec, table: PrimeTable) -> ArithFn:
    vals = np.zeros(spec.x + 1, dtype=np.complex128)
    for p in spec.script_P:
        vals[p] = 1.0
    return ArithFn(values=vals, limit=spec.x, label="1_scriptP")


@dataclass
class LowerBoundReport:
    """Measured mass of sum_{Q < q <= 2Q prime} |Delta(1_P, x; q, 1)|.

    rows: (q, |delta|, phi(q), pi-difference count, #P/phi(q)) per prime q.
    ratio = S / (y / (log x)^2) tracks the implied constant of the lower
    bound; scriptP_density = #P (log x)^2 / y tracks Brun-Titchmarsh.
    """

    bv_partial_sum: float
    normalizer: float
    ratio: float
    scriptP_density: float
    rows: list[tuple[int, float, int, int, float]]


def lower_bound_report(spec: CounterexampleSpec, table: PrimeTable) -> LowerBoundReport:
    ind = script_P_indicator(spec, table)
    logx = math.log(spec.x)
    rows = []
    S = 0.0
    for q in table.primes_in(spec.Q, 2 * spec.Q):
        q = int(q)
        rep = delta(ind, spec.x, q, 1, table)
        phi_q = euler_phi(q, table)
        pi_diff = sum(1 for p in table.primes_in(spec.y / 2, spec.y) if p % q == 1)
        script_term = len(spec.script_P) / phi_q
        d = abs(rep.delta)
        # the two expressions for the discrepancy must agree exactly
        alt = abs(pi_diff - script_term)
        if d != alt:
            raise InvariantViolationError(
                f"delta mismatch at q={q}: bucket path {d} vs pi-difference {alt}"
            )
        rows.append((q, d, phi_q, pi_diff, script_term))
        S += d
    normalizer = spec.y / logx**2
    density = len(spec.script_P) * logx**2 / spec.y
    return LowerBoundReport(
        bv_partial_sum=S,
        normalizer=normalizer,
        ratio=S / normalizer,
        scriptP_density=density,
        rows=rows,
    )
