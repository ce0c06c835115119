"""Truncated p-adic numbers and the unramified quadratic extension of Q_p.

Elements carry their own precision.  A nonzero :class:`Padic` is
``p**val * unit`` with the unit known modulo ``p**relprec``; a zero is only
known to be divisible by ``p**val``.  Arithmetic propagates precision the
usual way, so a result never claims more digits than its inputs justify.
"""

from __future__ import annotations

from fractions import Fraction

from .arith import DomainError, kronecker_symbol, sqrt_mod_prime_power


class PrecisionError(ArithmeticError):
    """Not enough p-adic digits to finish; retry with more precision."""


def _strip(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


class Padic:
    __slots__ = ("p", "val", "unit", "relprec")

    def __init__(self, p: int, val: int, unit: int, relprec: int):
        self.p = p
        self.val = val
        self.relprec = relprec
        self.unit = unit % p**relprec if relprec > 0 else 0

    # construction -----------------------------------------------------
    @classmethod
    def from_rational(cls, p: int, x, relprec: int) -> "Padic":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, relprec)
        vn, num = _strip(x.numerator, p)
        vd, den = _strip(x.denominator, p)
        mod = p**relprec
        return cls(p, vn - vd, num * pow(den, -1, mod), relprec)

    @classmethod
    def zero(cls, p: int, absprec: int) -> "Padic":
        return cls(p, absprec, 0, 0)

    def _coerce(self, other) -> "Padic":
        if isinstance(other, Padic):
            return other
        if isinstance(other, (int, Fraction)):
            # exact constants: give them far more digits than anything else
            return Padic.from_rational(self.p, other, max(self.relprec, 1) + 64)
        return NotImplemented

    # basic queries ----------------------------------------------------
    @property
    def absprec(self) -> int:
        return self.val + self.relprec

    def is_zero(self) -> bool:
        return self.relprec == 0

    def valuation(self) -> int:
        if self.is_zero():
            raise PrecisionError("valuation of an indistinguishable-from-zero element")
        return self.val

    def lift(self) -> Fraction:
        """A rational representative (integer when val >= 0)."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, k: int) -> int:
        """Reduction modulo p**k; requires integrality and enough precision."""
        if self.absprec < k:
            raise PrecisionError(f"need absolute precision {k}, have {self.absprec}")
        if self.is_zero():
            return 0
        if self.val < 0:
            raise DomainError("element is not integral")
        return self.unit * self.p**self.val % self.p**k

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.val})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.absprec})"

    # arithmetic -------------------------------------------------------
    def __neg__(self):
        return Padic(self.p, self.val, -self.unit, self.relprec)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        absprec = min(self.absprec, other.absprec)
        if self.is_zero() and other.is_zero():
            return Padic.zero(p, absprec)
        base = min(
            self.val if not self.is_zero() else absprec,
            other.val if not other.is_zero() else absprec,
        )
        if base >= absprec:
            return Padic.zero(p, absprec)
        mod = p ** (absprec - base)
        total = 0
        for x in (self, other):
            if not x.is_zero():
                total += x.unit * p ** (x.val - base)
        total %= mod
        if total == 0:
            return Padic.zero(p, absprec)
        v, u = _strip(total, p)
        return Padic(p, base + v, u, absprec - base - v)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            # O(p^A) * y lies in p^(A + v(y))
            return Padic.zero(self.p, self.val + other.val)
        r = min(self.relprec, other.relprec)
        return Padic(self.p, self.val + other.val, self.unit * other.unit, r)

    __rmul__ = __mul__

    def inverse(self) -> "Padic":
        if self.is_zero():
            raise PrecisionError("division by an element indistinguishable from zero")
        mod = self.p**self.relprec
        return Padic(self.p, -self.val, pow(self.unit, -1, mod), self.relprec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return Padic.from_rational(self.p, 1, self.relprec if not self.is_zero() else 1)
        if self.is_zero():
            return Padic.zero(self.p, self.absprec + (e - 1) * self.val)
        mod = self.p**self.relprec
        return Padic(self.p, self.val * e, pow(self.unit, e, mod), self.relprec)

    def equals(self, other, absprec: int | None = None) -> bool:
        """Equality to the common precision (optionally capped)."""
        diff = self - other
        target = diff.absprec if absprec is None else min(absprec, diff.absprec)
        return diff.is_zero() or diff.val >= target

    def sqrt(self) -> "Padic":
        """A square root in Q_p; DomainError if none exists."""
        if self.is_zero():
            return Padic.zero(self.p, self.val // 2)
        if self.val % 2:
            raise DomainError("odd valuation: not a square")
        p = self.p
        k = self.relprec
        r = sqrt_mod_prime_power(self.unit, p, k)
        if r is None:
            raise DomainError("unit is not a square")
        # for p = 2 the root is only determined modulo 2^(k-1)
        rel = k - 1 if p == 2 else k
        if rel < 1:
            raise PrecisionError("too few digits to take a 2-adic square root")
        return Padic(p, self.val // 2, r, rel)

    def reduced(self, relprec: int) -> "Padic":
        if self.is_zero():
            return self
        return Padic(self.p, self.val, self.unit, min(relprec, self.relprec))


def nonresidue(p: int) -> int:
    """Canonical D with Q_p(sqrt D) the unramified quadratic extension."""
    if p == 2:
        return 5
    d = 2
    while kronecker_symbol(d, p) != -1:
        d += 1
    return d


class QuadPadic:
    """a + b*theta in the unramified quadratic extension M of Q_p.

    theta = sqrt(D) for odd p.  For p = 2, M = Q_2(sqrt 5) and theta is
    (1 + sqrt 5)/2 with theta^2 = theta + 1, so that {1, theta} is an integral
    basis and no digits are lost to the denominator 2.
    """

    __slots__ = ("a", "b", "D")

    def __init__(self, a: Padic, b: Padic, D: int):
        self.a = a
        self.b = b
        self.D = D

    @property
    def p(self) -> int:
        return self.a.p

    @classmethod
    def from_rationals(cls, p: int, a, b, D: int, relprec: int) -> "QuadPadic":
        """a + b*sqrt(D) with rational a, b."""
        a, b = Fraction(a), Fraction(b)
        if p == 2:
            a, b = a - b, 2 * b
        return cls(_exact(p, a, relprec), _exact(p, b, relprec), D)

    @classmethod
    def sqrt_d(cls, t: Padic, D: int) -> "QuadPadic":
        """t*sqrt(D) for t in Q_p."""
        if t.p == 2:
            return cls(-t, t * 2, D)
        return cls(Padic.zero(t.p, t.absprec + 64), t, D)

    def sqrt_d_coordinates(self) -> tuple[Padic, Padic]:
        """(a', b') with self = a' + b' sqrt(D)."""
        if self.p == 2:
            half = self.b / 2
            return self.a + half, half
        return self.a, self.b

    def _coerce(self, other):
        if isinstance(other, QuadPadic):
            return other
        if isinstance(other, (Padic, int, Fraction)):
            a = other if isinstance(other, Padic) else self.a._coerce(other)
            return QuadPadic(a, Padic.zero(self.p, a.absprec + 64 if not a.is_zero() else a.absprec), self.D)
        return NotImplemented

    def __repr__(self):
        theta = "w" if self.p == 2 else f"sqrt({self.D})"
        return f"({self.a!r}) + ({self.b!r})*{theta}"

    def conjugate(self) -> "QuadPadic":
        if self.p == 2:  # w -> 1 - w
            return QuadPadic(self.a + self.b, -self.b, self.D)
        return QuadPadic(self.a, -self.b, self.D)

    def norm(self) -> Padic:
        if self.p == 2:
            return self.a * self.a + self.a * self.b - self.b * self.b
        return self.a * self.a - self.b * self.b * self.D

    def trace(self) -> Padic:
        if self.p == 2:
            return self.a * 2 + self.b
        return self.a * 2

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def valuation(self) -> int:
        # {1, theta} is an integral basis and M/Q_p is unramified
        if self.is_zero():
            raise PrecisionError("valuation of an indistinguishable-from-zero element")
        coords = (self.a, self.b)
        v = min(c.val for c in coords if not c.is_zero())
        if any(c.is_zero() and c.absprec < v for c in coords):
            raise PrecisionError("valuation not determined at this precision")
        return v

    @property
    def absprec(self) -> int:
        return min(self.a.absprec, self.b.absprec)

    def residue(self, k: int) -> tuple[int, int]:
        return (self.a.residue(k), self.b.residue(k))

    def __neg__(self):
        return QuadPadic(-self.a, -self.b, self.D)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadPadic(self.a + other.a, self.b + other.b, self.D)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadPadic(self.a - other.a, self.b - other.b, self.D)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        bd = b * d
        if self.p == 2:
            return QuadPadic(a * c + bd, a * d + b * c + bd, self.D)
        return QuadPadic(a * c + bd * self.D, a * d + b * c, self.D)

    __rmul__ = __mul__

    def inverse(self) -> "QuadPadic":
        n = self.norm()
        ninv = n.inverse()
        conj = self.conjugate()
        return QuadPadic(conj.a * ninv, conj.b * ninv, self.D)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self._coerce(1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def equals(self, other, absprec: int | None = None) -> bool:
        diff = self - other
        return diff.a.equals(0, absprec) and diff.b.equals(0, absprec)

    def in_base(self) -> bool:
        """True when the theta coordinate vanishes to working precision."""
        return self.b.is_zero()


def _exact(p: int, x, relprec: int) -> Padic:
    x = Fraction(x)
    if x == 0:
        return Padic.zero(p, relprec + 64)
    return Padic.from_rational(p, x, relprec)


def valuation_of(x) -> int:
    return x.valuation()
