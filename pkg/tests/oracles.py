"""Brute-force reference implementations used to freeze expected values.

Everything here is deliberately naive (trial division, full divisor
enumeration, direct double sums) and independent of the library code paths
it is used to check.
"""

import math


def trial_division(n):
    """Factorization by trial division: list of (p, e), primes ascending."""
    out = []
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


def is_prime_naive(n):
    return n >= 2 and trial_division(n) == [(n, 1)]


def phi_naive(n):
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def divisors(n):
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out


def brute_convolve(f_vals, g_vals, n):
    """(f*g)(n) by full divisor enumeration; values given as n-indexed maps."""
    return sum(f_vals[d] * g_vals[n // d] for d in divisors(n))


def brute_delta(values, x, q, a):
    """Delta(f,x;q,a) straight from the definition; values is 1-indexed."""
    m = int(math.floor(x))
    prog = sum(values[n] for n in range(1, m + 1) if n % q == a % q)
    cop = sum(values[n] for n in range(1, m + 1) if math.gcd(n, q) == 1)
    return prog - cop / phi_naive(q)


def smooth_numbers(limit, y):
    """All y-smooth n in [1, limit]."""
    out = []
    for n in range(1, limit + 1):
        fs = trial_division(n)
        if all(p <= y for p, _ in fs):
            out.append(n)
    return out
