"""Exact integer/rational helpers: factorization, valuations, symbols, roots.

Integers are plain Python ints and rationals are :class:`fractions.Fraction`;
everything here is exact.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class _Infinity:
    """Valuation of zero.  Compares greater than every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __hash__(self):
        return hash("tatebound.INF")


INF = _Infinity()

TRIAL_BOUND = 10**6


@lru_cache(maxsize=None)
def primes_below(n: int) -> tuple[int, ...]:
    sieve = bytearray([1]) * n
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n - 1) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n, i)))
    return tuple(i for i in range(n) if sieve[i])


# Deterministic Miller-Rabin witnesses, valid for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
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


def _pollard_rho(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        c = rng.randrange(1, n)
        y = rng.randrange(0, n)
        m, g, r, q = 128, 1, 1, 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def value(self) -> int:
        out = self.sign
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def exponent(self, p: int) -> int:
        return dict(self.factors).get(p, 0)

    def __str__(self):
        parts = [f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors]
        body = "*".join(parts) if parts else "1"
        return ("-" if self.sign < 0 else "") + body


def factor(n: int) -> Factorization:
    """Factor a nonzero integer: trial division, then Pollard rho."""
    if n == 0:
        raise DomainError("cannot factor 0")
    sign = -1 if n < 0 else 1
    n = abs(n)
    counts: dict[int, int] = {}
    for p in primes_below(TRIAL_BOUND):
        if p * p > n:
            break
        while n % p == 0:
            n //= p
            counts[p] = counts.get(p, 0) + 1
    if n > 1:
        rng = random.Random(n)  # seeded by n: output must be deterministic
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if is_prime(m):
                counts[m] = counts.get(m, 0) + 1
                continue
            d = _pollard_rho(m, rng)
            stack.extend((d, m // d))
    return Factorization(sign, tuple(sorted(counts.items())))


def divisors(n: int) -> list[int]:
    """Positive divisors of a nonzero integer, ascending."""
    divs = [1]
    for p, e in factor(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def valuation(x, p: int):
    """p-adic valuation of an int or Fraction; ``INF`` for zero."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    x = Fraction(x)
    if x == 0:
        return INF
    return _vint(x.numerator, p) - _vint(x.denominator, p)


def _vint(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^valuation(x)."""
    x = Fraction(x)
    return x / Fraction(p) ** valuation(x, p)


def kronecker_symbol(a: int, n: int) -> int:
    if n == 0:
        raise DomainError("kronecker symbol with n = 0")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _sqrt_mod_p(a: int, p: int) -> int | None:
    """Tonelli-Shanks.  p an odd prime."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def _sqrt_unit_2adic(a: int, k: int) -> int | None:
    a %= 2**k
    if k == 1:
        return 1
    if k == 2:
        return 1 if a % 4 == 1 else None
    if a % 8 != 1:
        return None
    # r^2 = a mod 2^j lifts to a root mod 2^(j+1) after a correction by 2^(j-1)
    r = 1
    for j in range(3, k):
        if (r * r - a) % 2 ** (j + 1):
            r += 2 ** (j - 1)
    return r % 2**k


def sqrt_mod_prime_power(a: int, p: int, k: int) -> int | None:
    """Some r with r^2 = a (mod p^k), or None when a is not a square."""
    if k < 1:
        raise DomainError("precision must be >= 1")
    mod = p**k
    a %= mod
    if a == 0:
        return 0
    v = _vint(a, p)
    if v % 2:
        return None
    a1 = a // p**v
    kk = k - v
    if p == 2:
        r = _sqrt_unit_2adic(a1, kk)
    else:
        r = _sqrt_mod_p(a1, p)
        if r is not None:
            # Newton lift; derivative 2r is a unit for odd p
            m = p
            while m < p**kk:
                m = min(m * m, p**kk)
                r = (r - (r * r - a1) * pow(2 * r, -1, m)) % m
    if r is None:
        return None
    return r * p ** (v // 2) % mod


def _poly_eval(coeffs: Sequence, x):
    """Horner; coefficients low degree first."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def rational_roots(coeffs: Sequence) -> list[Fraction]:
    """Distinct rational roots of sum(coeffs[i] * t^i), ascending."""
    cs = [Fraction(c) for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if not cs:
        raise DomainError("zero polynomial")
    roots: set[Fraction] = set()
    if cs[0] == 0:
        roots.add(Fraction(0))
        while cs[0] == 0:
            cs.pop(0)
    if len(cs) == 1:
        return sorted(roots)
    den = math.lcm(*(c.denominator for c in cs))
    ints = [int(c * den) for c in cs]
    g = math.gcd(*ints)
    ints = [c // g for c in ints]
    lead, const = ints[-1], ints[0]
    for d in divisors(const):
        for e in divisors(lead):
            if math.gcd(d, e) != 1:
                continue
            for cand in (Fraction(d, e), Fraction(-d, e)):
                if _poly_eval(ints, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def poly_mul(a: Sequence, b: Sequence) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        raise DomainError("incompatible congruences")
    lcm = m1 // g * m2
    t = (r2 - r1) // g * pow(m1 // g, -1, m2 // g) % (m2 // g)
    return (r1 + m1 * t) % lcm, lcm


def prod(xs: Iterable[int]) -> int:
    return math.prod(xs)
