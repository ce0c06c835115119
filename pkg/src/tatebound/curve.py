"""Weierstrass models over Q, their invariants and rational points."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import DomainError, divisors, factor, primes_below, rational_roots

ZERO = Fraction(0)


class CapabilityError(RuntimeError):
    """The request is well-posed but past a deliberate size limit."""


@dataclass(frozen=True)
class CurveInvariants:
    b2: Fraction
    b4: Fraction
    b6: Fraction
    b8: Fraction
    c4: Fraction
    c6: Fraction
    disc: Fraction
    j: Fraction


@dataclass(frozen=True)
class WeierstrassModel:
    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def from_list(cls, coeffs: Sequence) -> "WeierstrassModel":
        if len(coeffs) != 5:
            raise DomainError("need exactly five coefficients a1,a2,a3,a4,a6")
        return cls(*coeffs)

    @property
    def ainvs(self) -> tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for a in self.ainvs)

    def __str__(self):
        return ",".join(_fmt(a) for a in self.ainvs)

    def contains(self, P) -> bool:
        if P is None:
            return True
        x, y = P
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y == x**3 + a2 * x * x + a4 * x + a6


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def b_invariants(E: WeierstrassModel) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    a1, a2, a3, a4, a6 = E.ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def invariants(E: WeierstrassModel) -> CurveInvariants:
    b2, b4, b6, b8 = b_invariants(E)
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    if disc == 0:
        raise DomainError(f"singular model [{E}]")
    return CurveInvariants(b2, b4, b6, b8, c4, c6, disc, c4**3 / disc)


def transform(E: WeierstrassModel, r=0, s=0, t=0, u=1) -> WeierstrassModel:
    """Model in coordinates x = u^2 x' + r, y = u^3 y' + u^2 s x' + t."""
    r, s, t, u = map(Fraction, (r, s, t, u))
    a1, a2, a3, a4, a6 = E.ainvs
    return WeierstrassModel(
        (a1 + 2 * s) / u,
        (a2 - s * a1 + 3 * r - s * s) / u**2,
        (a3 + r * a1 + 2 * t) / u**3,
        (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4,
        (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6,
    )


def integral_model(E: WeierstrassModel) -> tuple[WeierstrassModel, int]:
    """An integral model and the scale d with a_i' = d^i a_i."""
    need: dict[int, int] = {}
    for i, a in zip((1, 2, 3, 4, 6), E.ainvs):
        if a.denominator > 1:
            for p, k in factor(a.denominator).factors:
                need[p] = max(need.get(p, 0), -(-k // i))
    d = math.prod(p**e for p, e in need.items())
    return transform(E, u=Fraction(1, d)), d


# Points are (x, y) tuples of Fractions; None is the point at infinity.
Point = tuple[Fraction, Fraction] | None


def parse_points(text: str) -> list[tuple[Fraction, Fraction]]:
    """Parse "(x1,y1);(x2,y2)" with rational entries."""
    pts = []
    text = text.strip()
    if not text:
        return pts
    for pos, chunk in _split_points(text):
        m = re.fullmatch(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)", chunk)
        if not m:
            raise ValueError(f"cannot parse point {chunk!r} at position {pos}")
        try:
            pts.append((Fraction(m.group(1)), Fraction(m.group(2))))
        except ValueError as exc:
            raise ValueError(f"bad rational in point {chunk!r} at position {pos}") from exc
    return pts


def _split_points(text: str):
    pos = 0
    for chunk in text.split(";"):
        stripped = chunk.strip()
        yield pos + (len(chunk) - len(chunk.lstrip())), stripped
        pos += len(chunk) + 1


def parse_curve(text: str) -> WeierstrassModel:
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != 5:
        raise ValueError(f"curve needs five comma-separated rationals, got {len(parts)}")
    coeffs = []
    for i, s in enumerate(parts):
        try:
            coeffs.append(Fraction(s))
        except ValueError as exc:
            raise ValueError(f"bad coefficient a{(1, 2, 3, 4, 6)[i]} = {s!r}") from exc
    return WeierstrassModel(*coeffs)


def format_point(P: Point) -> str:
    if P is None:
        return "O"
    return f"({_fmt(P[0])},{_fmt(P[1])})"


def negate(E: WeierstrassModel, P: Point) -> Point:
    if P is None:
        return None
    x, y = P
    return (x, -y - E.a1 * x - E.a3)


def add(E: WeierstrassModel, P: Point, Q: Point) -> Point:
    for R in (P, Q):
        if not E.contains(R):
            raise DomainError(f"point {format_point(R)} is not on the curve")
    return _add(E, P, Q)


def _add(E: WeierstrassModel, P: Point, Q: Point) -> Point:
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = E.ainvs
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if y1 + y2 + a1 * x2 + a3 == 0:
            return None
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
        nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
        nu = (y1 * x2 - y2 * x1) / (x2 - x1)
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def _size(P: Point) -> int:
    if P is None:
        return 0
    return max(
        abs(P[0].numerator).bit_length(), P[0].denominator.bit_length(),
        abs(P[1].numerator).bit_length(), P[1].denominator.bit_length(),
    )


def multiply(E: WeierstrassModel, m: int, P: Point, max_bits: int = 2_000_000) -> Point:
    """[m]P by double-and-add.  Refuses to build coordinates past max_bits."""
    if not E.contains(P):
        raise DomainError(f"point {format_point(P)} is not on the curve")
    if m < 0:
        return multiply(E, -m, negate(E, P), max_bits)
    result: Point = None
    base = P
    while m:
        if m & 1:
            result = _add(E, result, base)
        m >>= 1
        if m:
            base = _add(E, base, base)
        if _size(result) > max_bits or _size(base) > max_bits:
            raise CapabilityError("point coordinates exceed the size budget")
    return result


def point_order(E: WeierstrassModel, P: Point, bound: int = 12) -> int | None:
    """Exact order of P if it is at most `bound`, else None."""
    Q = P
    for k in range(1, bound + 1):
        if Q is None:
            return k
        Q = _add(E, Q, P)
    return None


def torsion_points(E: WeierstrassModel) -> list[Point]:
    """All rational torsion points (identity first), via Lutz-Nagell.

    Works on Y^2 = X^3 - 27 c4 X - 54 c6, which is integral after clearing
    denominators; candidates are confirmed by explicit multiples.
    """
    Eint, d = integral_model(E)
    ii = invariants(Eint)
    if _torsion_order_bound(Eint) == 1:
        return [None]
    A = -27 * ii.c4
    B = -54 * ii.c6
    A, B = int(A), int(B)
    D = abs(4 * A**3 + 27 * B * B)
    found: list[Point] = [None]
    ys = [0] + [y for y in divisors(D) if D % (y * y) == 0]
    for y in ys:
        for yy in ({y, -y} if y else {0}):
            for X in rational_roots([B - yy * yy, A, 0, 1]):
                if X.denominator != 1:
                    continue
                # back to Eint: X = 36x + 3b2, Y = 108(2y + a1 x + a3)
                x = (X - 3 * ii.b2) / 36
                y_ = (Fraction(yy) / 108 - Eint.a1 * x - Eint.a3) / 2
                P = (x / d**2, y_ / d**3)
                if not E.contains(P):
                    continue
                if point_order(E, P) is not None and P not in found:
                    found.append(P)
    return found


def _torsion_order_bound(E: WeierstrassModel, primes: int = 12) -> int:
    """gcd of #E(F_ell) over odd good primes; torsion injects into each E(F_ell)."""
    disc = int(invariants(E).disc)
    g = 0
    used = 0
    for ell in primes_below(1000):
        if ell < 3 or disc % ell == 0:
            continue
        g = math.gcd(g, ell + 1 - count_points_mod(E, ell))
        used += 1
        if g == 1 or used == primes:
            break
    return g


def torsion_subgroup(E: WeierstrassModel) -> tuple[int, list[Point]]:
    """Order of E(Q)_tors and a minimal list of generators."""
    pts = torsion_points(E)
    order = len(pts)
    if order == 1:
        return 1, []
    by_order = sorted(pts[1:], key=lambda P: -point_order(E, P))
    gens = [by_order[0]]
    span = _span(E, gens)
    for P in by_order[1:]:
        if P not in span:
            gens.append(P)
            span = _span(E, gens)
        if len(span) == order:
            break
    return order, gens


def _span(E: WeierstrassModel, gens: list[Point]) -> list[Point]:
    span: list[Point] = [None]
    for G in gens:
        new = list(span)
        for S in span:
            Q = _add(E, S, G)
            while Q not in new:
                new.append(Q)
                Q = _add(E, Q, G)
        span = new
    return span


@dataclass(frozen=True)
class MordellWeilInput:
    rank: int
    generators: tuple[tuple[Fraction, Fraction], ...]
    torsion_order: int | None = None

    @classmethod
    def build(cls, E: WeierstrassModel, gens, torsion_order: int | None = None) -> "MordellWeilInput":
        gens = tuple((Fraction(x), Fraction(y)) for x, y in gens)
        for P in gens:
            if not E.contains(P):
                raise DomainError(f"generator {format_point(P)} is not on the curve")
            if point_order(E, P) is not None:
                raise DomainError(f"generator {format_point(P)} is a torsion point")
        return cls(len(gens), gens, torsion_order)


def _reduce_mod(x: Fraction, ell: int) -> int:
    return x.numerator * pow(x.denominator, -1, ell) % ell


POINT_COUNT_BOUND = 10**5


def count_points_mod(E: WeierstrassModel, ell: int) -> int:
    """Trace of Frobenius a_ell = ell + 1 - #E(F_ell) at a good prime ell >= 3."""
    if ell < 3:
        raise DomainError("point counting is implemented for ell >= 3")
    if ell > POINT_COUNT_BOUND:
        raise CapabilityError(f"ell = {ell} is past the enumeration bound")
    b2, b4, b6, _ = b_invariants(E)
    disc = invariants(E).disc
    if any(c.denominator % ell == 0 for c in E.ainvs) or disc.numerator % ell == 0:
        raise DomainError(f"{ell} is not a prime of good reduction for this model")
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    cb2, cb4, cb6 = (_reduce_mod(c, ell) for c in (b2, b4, b6))
    x = np.arange(ell, dtype=np.int64)
    f = (((4 * x + cb2) % ell * x + 2 * cb4) % ell * x + cb6) % ell
    is_sq = np.zeros(ell, dtype=np.int64)
    is_sq[(x * x) % ell] = 1
    chi = np.where(f == 0, 0, 2 * is_sq[f] - 1)
    a = -int(chi.sum())
    if a * a > 4 * ell:
        raise AssertionError(f"Hasse bound violated at {ell}: a = {a}")
    return a
