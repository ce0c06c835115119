"""Tate-curve machinery at a prime of multiplicative reduction.

Covers the Tate parameter q of j, the isomorphism between E and E_q over the
field M (Q_p when split, the unramified quadratic extension otherwise), the
uniformization u <-> (x, y) in both directions, and the finite quotients
H / <H^(p^n), q> together with their discrete logarithms.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .arith import DomainError, valuation
from .curve import WeierstrassModel, invariants
from .padic import Padic, PrecisionError, QuadPadic, nonresidue
from .reduction import ContractError, LocalReductionData, Reduction

SPLIT_FIELD = "Q_p"
NONSPLIT_FIELD = "unramified-quadratic"


class HypothesisError(ValueError):
    """A hypothesis of the local theory (such as p not dividing ord_p(q)) fails."""


# ---------------------------------------------------------------------------
# q-series with integer coefficients


@lru_cache(maxsize=None)
def _sigma(k: int, nmax: int) -> tuple[int, ...]:
    out = [0] * (nmax + 1)
    for d in range(1, nmax + 1):
        dk = d**k
        for m in range(d, nmax + 1, d):
            out[m] += dk
    return tuple(out)


def _mul(a, b, nmax):
    out = [0] * (nmax + 1)
    for i, x in enumerate(a[: nmax + 1]):
        if x:
            for j, y in enumerate(b[: nmax + 1 - i]):
                out[i + j] += x * y
    return out


def _inv(a, nmax):
    # a[0] must be +-1
    out = [0] * (nmax + 1)
    out[0] = a[0]
    for k in range(1, nmax + 1):
        s = sum(a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1))
        out[k] = -s * a[0]
    return out


@lru_cache(maxsize=None)
def tate_coefficients(nmax: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Coefficient lists (index = power of q) of a4(q) and a6(q)."""
    s3, s5 = _sigma(3, nmax), _sigma(5, nmax)
    a4 = tuple(-5 * c for c in s3)
    a6 = tuple(-(5 * c3 + 7 * c5) // 12 for c3, c5 in zip(s3, s5))
    return a4, a6


@lru_cache(maxsize=None)
def _e4(nmax: int) -> list[int]:
    s3 = _sigma(3, nmax)
    return [1] + [240 * c for c in s3[1:]]


@lru_cache(maxsize=None)
def _eta24(nmax: int) -> tuple[int, ...]:
    # prod_{n>=1} (1 - q^n)^24, truncated
    out = [1] + [0] * nmax
    for m in range(1, nmax + 1):
        for _ in range(24):
            for i in range(nmax, m - 1, -1):
                out[i] -= out[i - m]
    return tuple(out)


@lru_cache(maxsize=None)
def inverse_j_coefficients(nmax: int) -> tuple[int, ...]:
    """1/j(q) = q * prod(1-q^n)^24 / E4^3 as a power series (index = power of q)."""
    e4 = _e4(nmax)
    e4c = _mul(_mul(e4, e4, nmax), e4, nmax)
    ratio = _mul(list(_eta24(nmax)), _inv(e4c, nmax), nmax)
    return tuple([0] + ratio[:nmax])


@lru_cache(maxsize=None)
def j_laurent_coefficients(nmax: int) -> tuple[int, ...]:
    """j(q) * q as a power series: 1, 744, 196884, ..."""
    e4 = _e4(nmax)
    e4c = _mul(_mul(e4, e4, nmax), e4, nmax)
    return tuple(_mul(e4c, _inv(list(_eta24(nmax)), nmax), nmax))


@lru_cache(maxsize=None)
def q_of_inverse_j(nmax: int) -> tuple[int, ...]:
    """Reversion of 1/j(q): q = t + 744 t^2 + 750420 t^3 + ... with t = 1/j."""
    # Lagrange inversion: b_k = [q^(k-1)] h^k / k with h = q / (1/j(q))
    h = list(j_laurent_coefficients(nmax))
    out = [0] * (nmax + 1)
    power = [1] + [0] * nmax
    for k in range(1, nmax + 1):
        power = _mul(power, h, nmax)
        c = power[k - 1]
        assert c % k == 0
        out[k] = c // k
    return tuple(out)


def _horner(coeffs, x, one):
    acc = one * 0 + coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _cap(x, absprec: int):
    """Forget digits at or beyond p^absprec (truncation error of a series)."""
    if isinstance(x, QuadPadic):
        return QuadPadic(_cap(x.a, absprec), _cap(x.b, absprec), x.D)
    return x + Padic.zero(x.p, absprec)


def _exact(p: int, x, prec: int) -> Padic:
    x = Fraction(x)
    if x == 0:
        return Padic.zero(p, prec + 64)
    return Padic.from_rational(p, x, prec)


# ---------------------------------------------------------------------------
# Tate parameter


@dataclass(frozen=True)
class TateParameter:
    p: int
    q: Padic
    field: str  # SPLIT_FIELD or NONSPLIT_FIELD
    D: int | None = None  # nonresidue defining M when non-split

    @property
    def ord_q(self) -> int:
        return self.q.valuation()

    @property
    def split(self) -> bool:
        return self.field == SPLIT_FIELD


def q_from_j(j, p: int, prec: int) -> Padic:
    """The q with j(q) = j, to relative precision prec."""
    j = Fraction(j)
    if j == 0 or valuation(j, p) >= 0:
        raise DomainError(f"j is integral at {p}: reduction is not multiplicative")
    v = -valuation(j, p)
    t = Padic.from_rational(p, 1 / j, prec)
    nterms = -(-(v + prec) // v) + 1
    coeffs = q_of_inverse_j(nterms)
    q = _horner(list(coeffs), t, t)
    return _cap(q, v + prec)


def j_of_q(q: Padic) -> Padic:
    """Evaluate j(q) from the q-expansion (independent of the reversion)."""
    v = q.valuation()
    nterms = -(-q.relprec // v) + 2
    inv = inverse_j_coefficients(nterms)
    t = _cap(_horner(list(inv), q, q), v + q.relprec)
    return t.inverse()


def base_field(data: LocalReductionData) -> str:
    if not data.multiplicative:
        raise ContractError(f"reduction at {data.prime} is not multiplicative")
    return SPLIT_FIELD if data.reduction is Reduction.SPLIT else NONSPLIT_FIELD


def tate_parameter(j, p: int, prec: int, field_tag: str = SPLIT_FIELD) -> TateParameter:
    q = q_from_j(j, p, prec)
    # forward check against the q-expansion of j
    back = j_of_q(q)
    target = Padic.from_rational(p, j, prec)
    if not back.equals(target):
        raise PrecisionError("j(q) does not reproduce j at this precision")
    D = None if field_tag == SPLIT_FIELD else nonresidue(p)
    return TateParameter(p, q, field_tag, D)


# ---------------------------------------------------------------------------
# The Tate curve E_q : y^2 + xy = x^3 + a4(q) x + a6(q)


def tate_curve_coefficients(q: Padic) -> tuple[Padic, Padic]:
    v = q.valuation()
    nterms = -(-(q.relprec + v) // v) + 1
    a4c, a6c = tate_coefficients(nterms)
    T = q.relprec + v
    return _cap(_horner(list(a4c), q, q), T), _cap(_horner(list(a6c), q, q), T)


def _leading_valuation(u, vq: int) -> int:
    vu = u.valuation()
    if vu == 0:
        return -2 * (1 - u).valuation()
    return min(vu, vq - vu)


def _sum_terms(u, q: Padic, T: int, one, deriv: bool = False):
    """(X, Y), and (dX/du, dY/du) if asked, truncated at absolute precision T."""
    vq = q.valuation()
    s1 = _sigma(1, max(1, T // vq + 2))
    d = 1 - u
    X = u / d**2
    Y = u * u / d**3
    if deriv:
        dX = (1 + u) / d**3
        dY = u * (2 + u) / d**4
    qm = one * 0 + 1
    uinv = u.inverse()
    m = 0
    while True:
        m += 1
        qm = qm * q
        if m * vq - u.valuation() >= T and m * vq >= T:
            break
        z = qm * u
        w = qm * uinv
        iz = (1 - z).inverse()
        iw = (1 - w).inverse()
        iz2, iw2 = iz * iz, iw * iw
        iz3, iw3 = iz2 * iz, iw2 * iw
        X = X + z * iz2 + w * iw2 - 2 * s1[m] * qm
        Y = Y + z * z * iz3 - w * iw3 + s1[m] * qm
        if deriv:
            wu = w * uinv
            dX = dX + qm * (1 + z) * iz3 - wu * (1 + w) * iw3
            dY = dY + qm * z * (2 + z) * iz3 * iz + wu * (1 + 2 * w) * iw3 * iw
    if deriv:
        return _cap(X, T), _cap(Y, T), dX, dY
    return _cap(X, T), _cap(Y, T)


def tate_forward(u, q: Padic, prec: int):
    """(X(u,q), Y(u,q)): the point of E_q attached to u, to relative precision ~prec."""
    if u.is_zero():
        raise DomainError("u = 0 is not in M*")
    vq = q.valuation()
    k = u.valuation() // vq
    if k:
        u = u * q ** (-k)
    if u.valuation() == 0 and (1 - u).is_zero():
        raise DomainError("u lies in q^Z: that is the identity of E_q")
    lead = _leading_valuation(u, vq)
    return _sum_terms(u, q, lead + prec, u)


def _on_tate_curve(x, y, q: Padic) -> bool:
    a4, a6 = tate_curve_coefficients(q)
    lhs = y * y + x * y
    rhs = x * x * x + a4 * x + a6
    return lhs.equals(rhs)


def tate_inverse(x, y, q: Padic, prec: int):
    """u with (X(u,q), Y(u,q)) = (x, y), normalized to 0 <= ord(u) < ord(q)."""
    both_positive = (not x.is_zero() and x.valuation() > 0 or x.is_zero()) and (
        not y.is_zero() and y.valuation() > 0 or y.is_zero()
    )
    if not both_positive:
        s = x + y
        if s.is_zero():
            # x + y = 0: work with -P = (x, -x-y) = (x, 0) and invert at the end
            return _normalize(1 / _inverse_identity_component(x, -x - y, q, prec), q)
        return _normalize(_inverse_identity_component(x, y, q, prec), q)
    s = x + y
    if not s.is_zero() and (y.is_zero() or s.valuation() <= y.valuation()):
        return _normalize(_inverse_positive(x, y, q, prec), q)
    u_neg = _inverse_positive(x, -x - y, q, prec)
    return _normalize(q / u_neg, q)


def _normalize(u, q: Padic):
    vq = q.valuation()
    k = u.valuation() // vq
    return u * q ** (-k) if k else u


def _max_iterations(prec: int) -> int:
    return 2 * prec.bit_length() + 12


def _forward_with_derivative(u, q: Padic, prec: int):
    vq = q.valuation()
    return _sum_terms(u, q, _leading_valuation(u, vq) + prec, u, deriv=True)


def _inverse_identity_component(x, y, q: Padic, prec: int):
    # Newton on rho(u) = Y/(X+Y) = rho; rho(u) = u + O(q), so rho' is close to 1
    rho = y / (x + y)
    u = rho
    for _ in range(_max_iterations(prec)):
        X, Y, dX, dY = _forward_with_derivative(u, q, prec)
        S = X + Y
        drho = (dY * S - Y * (dX + dY)) / (S * S)
        new = u - (Y / S - rho) / drho
        if _converged(new, u, prec):
            return _check(new, x, y, q, prec)
        u = new
    raise PrecisionError("Tate inverse did not converge (identity component)")


def _inverse_positive(x, y, q: Padic, prec: int):
    # 0 < ord(u) <= ord(q)/2: Newton on sigma(u) = X + Y = u/(1-u)^3 + ...
    sigma = x + y
    u = sigma
    for _ in range(_max_iterations(prec)):
        X, Y, dX, dY = _forward_with_derivative(u, q, prec)
        new = u - (X + Y - sigma) / (dX + dY)
        if _converged(new, u, prec):
            return _check(new, x, y, q, prec)
        u = new
    raise PrecisionError("Tate inverse did not converge (positive valuation)")


def _converged(new, old, prec: int) -> bool:
    d = new - old
    if d.is_zero():
        return True
    return d.valuation() - new.valuation() >= prec


def _check(u, x, y, q, prec):
    X, Y = tate_forward(u, q, prec)
    if not (X.equals(x) and Y.equals(y)):
        raise PrecisionError("Tate inverse failed its forward check")
    return u


# ---------------------------------------------------------------------------
# Isomorphism between a model of E and E_q over M


class TateUniformization:
    """E over Q_p, its Tate parameter, and the maps E(Q_p) <-> H / q^Z."""

    def __init__(self, model: WeierstrassModel, data: LocalReductionData, prec: int):
        p = data.prime
        self.p = p
        self.model = model
        self.prec = prec
        self.field = base_field(data)
        inv = invariants(model)
        self.inv = inv
        self.param = tate_parameter(inv.j, p, prec + 8, self.field)
        q = self.param.q
        self.q = q
        if q.valuation() != data.ord_disc:
            raise PrecisionError("ord(q) disagrees with ord(Delta_min)")
        a4, a6 = tate_curve_coefficients(q)
        self.a4q, self.a6q = a4, a6
        c4q = 1 - 48 * a4  # b2 = 1, b4 = 2 a4
        c6q = -1 + 72 * a4 - 864 * a6
        c4 = _exact(p, inv.c4, prec + 8)
        c6 = _exact(p, inv.c6, prec + 8)
        lam2 = c6 * c4q / (c6q * c4)
        self.lam2 = lam2
        if self.field == SPLIT_FIELD:
            try:
                self.lam = lam2.sqrt()
            except DomainError as exc:
                raise ContractError("split reduction but lambda^2 is not a square in Q_p") from exc
            self.lam3 = lam2 * self.lam
            self.D = None
        else:
            D = self.param.D
            self.D = D
            try:
                t = (lam2 / D).sqrt()
            except DomainError as exc:
                raise ContractError("non-split reduction but lambda^2 / D is not a square") from exc
            self.lam = QuadPadic.sqrt_d(t, D)
            self.lam3 = QuadPadic.sqrt_d(lam2 * t, D)

    # coordinates ----------------------------------------------------------
    def to_tate(self, P):
        """A point of E (rational or p-adic coordinates) -> point of E_q over M."""
        x, y = P
        p, prec = self.p, self.prec + 8
        x = x if isinstance(x, Padic) else _exact(p, x, prec)
        y = y if isinstance(y, Padic) else _exact(p, y, prec)
        a1, _, a3, _, _ = self.model.ainvs
        X = 36 * x + 3 * self.inv.b2
        Y = 108 * (2 * y + a1 * x + a3)
        xq = (X / self.lam2 - 3) / 36
        Yq = Y / self.lam3
        yq = (Yq / 108 - xq) / 2
        return xq, yq

    def from_tate(self, xq, yq):
        a1, _, a3, _, _ = self.model.ainvs
        Xq = 36 * xq + 3
        Yq = 108 * (2 * yq + xq)
        X = self.lam2 * Xq
        Y = self.lam3 * Yq
        x = (X - 3 * self.inv.b2) / 36
        y = (Y / 108 - a1 * x - a3) / 2
        if isinstance(x, QuadPadic):
            x = x.a
        if isinstance(y, QuadPadic):
            if not y.b.is_zero() and y.b.valuation() < y.absprec:
                raise DomainError("u does not correspond to a Q_p-rational point")
            y = y.a
        return x, y

    def point_to_u(self, P):
        """The Tate unit of a point of E(Q_p), with precision retry."""
        if P is None:
            raise DomainError("the identity has no Tate unit in M* \\ q^Z")
        xq, yq = self.to_tate(P)
        return tate_inverse(xq, yq, self.q, self.prec)

    def u_to_point(self, u):
        xq, yq = tate_forward(u, self.q, self.prec)
        return self.from_tate(xq, yq)

    def norm_exponent(self, u) -> int:
        """s with N(u) = q^s (non-split); validates u in H."""
        if self.field == SPLIT_FIELD:
            raise ContractError("norm exponent only defined for non-split M")
        n = u.norm()
        vq = self.q.valuation()
        if n.valuation() % vq:
            raise DomainError("N(u) is not in q^Z")
        s = n.valuation() // vq
        if not (n / self.q**s).equals(Padic.from_rational(self.p, 1, self.prec)):
            raise DomainError("N(u) is not in q^Z")
        return s


def with_precision_retry(fn, prec: int, cap: int):
    """Call fn(prec), doubling prec on PrecisionError up to cap."""
    while True:
        try:
            return fn(prec)
        except PrecisionError:
            if prec >= cap:
                raise
            prec = min(2 * prec, cap)


# ---------------------------------------------------------------------------
# Quotients H / <H^(p^n), q> at the level of residues


def _mul_pair(x, y, D: int, p: int, mod: int):
    a, b = x
    c, d = y
    if p == 2:  # basis {1, w}, w^2 = w + 1
        return ((a * c + b * d) % mod, (a * d + b * c + b * d) % mod)
    return ((a * c + D * b * d) % mod, (a * d + b * c) % mod)


def _pow_pair(x, e: int, D: int, p: int, mod: int):
    out = (1, 0)
    while e:
        if e & 1:
            out = _mul_pair(out, x, D, p, mod)
        x = _mul_pair(x, x, D, p, mod)
        e >>= 1
    return out


def exp_series(x, terms: int):
    """Truncated exponential series sum x^i / i! (for x in pO, or 4O at p = 2)."""
    acc = x * 0 + 1
    term = x * 0 + 1
    for i in range(1, terms):
        term = term * x / i
        acc = acc + term
    return acc


def log_series(x, terms: int):
    """log(1 + y) = sum (-1)^(i+1) y^i / i with y = x - 1."""
    y = x - 1
    acc = y * 0
    power = y * 0 + 1
    for i in range(1, terms):
        power = power * y
        acc = acc + power * (Fraction((-1) ** (i + 1), i))
    return acc


@dataclass(frozen=True)
class QuotientStructure:
    """H / <H^(p^n), q> with an explicit discrete logarithm.

    Classes are pairs (t, e): t in Z/2 (always 0 for odd p), e in Z/p^n.
    """

    p: int
    n: int
    split: bool
    D: int | None
    modulus_exp: int  # residues of units are taken mod p^modulus_exp
    generator_labels: tuple[str, ...]
    table: dict = field(repr=False, compare=False)

    @property
    def order(self) -> int:
        return (2 if self.p == 2 else 1) * self.p**self.n

    @property
    def group_type(self) -> tuple[int, ...]:
        return (2, 2**self.n) if self.p == 2 else (self.p**self.n,)

    def unit_class(self, r) -> tuple[int, int]:
        """Class of a unit given by its residue (int, or coordinate pair for M != Q_p)."""
        p, n, k = self.p, self.n, self.modulus_exp
        mod = p**k
        pn = p**n
        if self.split:
            if p == 2:
                key = r % mod
                if key not in self.table:
                    raise DomainError("not a unit")
                return self.table[key]
            e = self.table.get(pow(r, p - 1, mod))
            if e is None:
                raise DomainError("not a unit")
            return (0, e[1] * pow(p - 1, -1, pn) % pn)
        a, b = r[0] % mod, r[1] % mod
        if p == 2:
            cube = _pow_pair((a, b), 3, 0, 2, mod)
            cls = self.table.get(cube)
            if cls is None:
                raise DomainError("not a norm-one unit")
            return cls
        w = _pow_pair((a, b), p + 1, self.D, p, mod)
        cls = self.table.get(w)
        if cls is None:
            raise DomainError("not a norm-one unit")
        return (0, cls[1] * pow(p + 1, -1, pn) % pn)

    def add(self, x, y):
        return ((x[0] + y[0]) % 2, (x[1] + y[1]) % self.p**self.n)

    def scale(self, c: int, x):
        return ((c * x[0]) % 2, (c * x[1]) % self.p**self.n)

    # p-adic entry point -------------------------------------------------
    def element_class(self, x, q: Padic) -> tuple[int, int]:
        p, n = self.p, self.n
        pn = p**n
        vq = q.valuation()
        k = self.modulus_exp
        if self.split:
            c = x.valuation() * pow(vq, -1, pn) % pn
            ux = x / Padic(p, x.valuation(), 1, x.relprec + 64)
            uq = q / Padic(p, vq, 1, q.relprec + 64)
            cx = self.unit_class(ux.residue(k))
            cq = self.unit_class(uq.residue(k))
            return self.add(cx, self.scale(-c, cq))
        nrm = x.norm()
        if nrm.valuation() % vq:
            raise DomainError("N(x) is not in q^Z")
        s = nrm.valuation() // vq
        if p == 2:
            if s % 2:
                raise HypothesisError("ord_2(q) must be odd")
            w = x * q ** (-(s // 2))
            return self.unit_class(w.residue(k))
        w = x * x * q ** (-s)
        half = pow(2, -1, pn)
        cls = self.unit_class(w.residue(k))
        return self.scale(half, cls)


@lru_cache(maxsize=None)
def quotient_structure(p: int, n: int, split: bool) -> QuotientStructure:
    """H / <H^(p^n), q> for p not dividing ord_p(q): its type and a dlog table."""
    if n < 1:
        raise DomainError("n must be >= 1")
    pn = p**n
    if p == 2:
        k = n + 2
        mod = 2**k
        table: dict = {}
        if split:
            for t in (0, 1):
                for e in range(pn):
                    table[(-1) ** t * pow(5, e, mod) % mod] = (t, e)
            labels = ("-1", "5")
        else:
            eps6 = (13, (-8) % mod)  # eps^6 = 13 - 8w, eps = w - 1
            g = (1, 0)
            for e in range(pn):
                table[g] = (0, e)
                table[((-g[0]) % mod, (-g[1]) % mod)] = (1, e)
                g = _mul_pair(g, eps6, 0, 2, mod)
            labels = ("-1", "eps^2")
        assert len(table) == 2 * pn
        return QuotientStructure(p, n, split, None if split else 5, k, labels, table)
    k = n + 1
    mod = p**k
    table = {}
    if split:
        g = 1
        for e in range(pn):
            table[g] = (0, e)
            g = g * (1 + p) % mod
        assert len(table) == pn
        return QuotientStructure(p, n, True, None, k, (str(1 + p),), table)
    D = nonresidue(p)
    gen = exp_generator(p, D, k)
    g = (1, 0)
    for e in range(pn):
        table[g] = (0, e)
        g = _mul_pair(g, gen, D, p, mod)
    assert len(table) == pn and g == (1, 0)
    return QuotientStructure(p, n, False, D, k, (f"exp({p}*sqrt({D}))",), table)


@lru_cache(maxsize=None)
def exp_generator(p: int, D: int, k: int) -> tuple[int, int]:
    """exp(p sqrt D) mod p^k as a coordinate pair (odd p)."""
    x = QuadPadic.from_rationals(p, 0, p, D, k + 8)
    terms = 2 * k + 8
    val = exp_series(x, terms)
    return (val.a.residue(k), val.b.residue(k))


# ---------------------------------------------------------------------------
# Images of Mordell-Weil generators


def _ord_p(e: int, p: int, n: int) -> int:
    e %= p**n
    if e == 0:
        return n
    v = 0
    while e % p == 0:
        e //= p
        v += 1
    return v


def subgroup_closure(classes, p: int, n: int) -> set:
    pn = p**n
    seen = {(0, 0)}
    frontier = [(0, 0)]
    gens = [(c[0] % 2, c[1] % pn) for c in classes]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = ((x[0] + g[0]) % 2, (x[1] + g[1]) % pn)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return seen


def _element_order(c, p: int, n: int) -> int:
    pn = p**n
    o1 = 1 if c[0] % 2 == 0 else 2
    o2 = pn // math.gcd(c[1] % pn, pn) if c[1] % pn else 1
    return o1 * o2 // math.gcd(o1, o2)


def is_cyclic(sub: set, p: int, n: int) -> bool:
    return any(_element_order(c, p, n) == len(sub) for c in sub)


@dataclass(frozen=True)
class LocalImageData:
    p: int
    n: int
    classes: tuple[tuple[int, int], ...]
    order: tuple[int, ...]  # generator indices, p_1 first
    nu: int
    r2n: int | None
    delta2: int | None
    stable: bool  # nu < n: the value no longer changes with n
    units: tuple = field(default=(), repr=False, compare=False)

    @property
    def image_size(self) -> int:
        return len(subgroup_closure(self.classes, self.p, self.n))


def image_from_classes(classes, p: int, n: int, units=(), torsion_classes=()) -> LocalImageData:
    """nu, r_{2,n}, delta_2 from the quotient classes of the generators.

    Torsion classes enter the cyclicity test for r_{2,n} but not nu.
    """
    classes = tuple((c[0] % 2, c[1] % p**n) for c in classes)
    vals = [_ord_p(c[1], p, n) for c in classes]
    # renumber: largest cyclic image first, ties by input order
    order = tuple(sorted(range(len(classes)), key=lambda i: (vals[i], i)))
    nu = min(vals) if vals else n
    r2n = delta2 = None
    if p == 2:
        sub = subgroup_closure(classes + tuple(torsion_classes), p, n)
        r2n = 1 if is_cyclic(sub, p, n) else 2
        delta2 = 2 if (n == 1 and r2n == 1) else 0
    return LocalImageData(p, n, classes, order, nu, r2n, delta2, nu < n, tuple(units))


def local_image(unif: TateUniformization, generators, n: int, torsion=()) -> LocalImageData:
    """Project each generator's Tate unit to H / <H^(p^n), q>."""
    p = unif.p
    vq = unif.q.valuation()
    if vq % p == 0:
        raise HypothesisError(f"{p} divides ord_p(q) = {vq}")
    qs = quotient_structure(p, n, unif.field == SPLIT_FIELD)
    units = [unif.point_to_u(P) for P in generators]
    classes = [qs.element_class(u, unif.q) for u in units]
    tors = [qs.element_class(unif.point_to_u(T), unif.q) for T in torsion] if p == 2 else []
    return image_from_classes(classes, p, n, units, tors)


# ---------------------------------------------------------------------------
# Square classes and the 2-adic field labels

_Q2_LABELS = {  # (ord mod 2, unit mod 8) -> d with Q_2(sqrt d)
    (0, 1): 1,
    (0, 3): 3,
    (0, 5): -3,
    (0, 7): -1,
    (1, 1): 2,
    (1, 3): 6,
    (1, 5): -6,
    (1, 7): -2,
}


def q2_square_class(x: Padic) -> tuple[int, int]:
    v = x.valuation()
    unit = (x / Padic(2, v, 1, x.relprec + 64)).residue(3)
    return (v % 2, unit)


def q2_label(x: Padic) -> int:
    """d in {1, 3, -3, -1, 2, 6, -6, -2} with x in d * Q_2*^2."""
    return _Q2_LABELS[q2_square_class(x)]


def _q2_class_of_label(d: int) -> tuple[int, int]:
    for k, v in _Q2_LABELS.items():
        if v == d:
            return k
    raise KeyError(d)


def _q2_mul_class(a, b):
    return ((a[0] + b[0]) % 2, a[1] * b[1] % 8)


def m_is_square(x: QuadPadic) -> bool:
    """Square test in M = Q_2(sqrt 5): even valuation and unit square mod 8."""
    v = x.valuation()
    if v % 2:
        return False
    unit = x * Padic(2, -v, 1, 200)
    return unit.residue(3) in _m_unit_squares_mod8()


@lru_cache(maxsize=None)
def _m_unit_squares_mod8() -> frozenset:
    out = set()
    for a in range(8):
        for b in range(8):
            if (a * a + a * b - b * b) % 2:
                out.add(_mul_pair((a, b), (a, b), 0, 2, 8))
    return frozenset(out)


def m_sqrt(x: QuadPadic) -> QuadPadic:
    """A square root in M = Q_2(sqrt 5); DomainError if none."""
    if not m_is_square(x):
        raise DomainError("not a square in Q_2(sqrt 5)")
    v = x.valuation()
    unit = x * Padic(2, -v, 1, 200)
    r8 = unit.residue(3)
    for a in range(8):
        for b in range(8):
            if (a * a + a * b - b * b) % 2 and _mul_pair((a, b), (a, b), 0, 2, 8) == r8:
                break
        else:
            continue
        break
    prec = unit.absprec + 2
    r = QuadPadic(Padic.from_rational(2, a, prec) if a else Padic.zero(2, prec),
                  Padic.from_rational(2, b, prec) if b else Padic.zero(2, prec), 5)
    for _ in range(2 * prec.bit_length() + 4):
        r = (r + unit / r) * Fraction(1, 2)
    if not (r * r).equals(unit):
        raise PrecisionError("square root in M did not converge")
    return r * Padic(2, v // 2, 1, 200)


@dataclass(frozen=True)
class FieldLabels:
    sqrt_q: int  # Q_2(sqrt q) = Q_2(sqrt d)
    kummer_classes: tuple[int, ...] | None  # split case: square classes generated by q, u_j
    zeta4_in_L1: bool | None
    m_in_L1: bool | None
    note: str = ""


def local_field_labels(unif: TateUniformization, units, n: int = 1) -> FieldLabels:
    """Q_2(sqrt q) and whether zeta_4 lies in the completion of L_1."""
    if unif.p != 2 or n not in (1, 2):
        from .curve import CapabilityError

        raise CapabilityError("field labels are implemented for p = 2 and n in {1, 2}")
    q = unif.q
    d = q2_label(q)
    if unif.field == SPLIT_FIELD:
        gens = [q2_square_class(q)] + [q2_square_class(u) for u in units]
        group = {(0, 1)}
        for g in gens:
            group |= {_q2_mul_class(g, h) for h in group}
        labels = tuple(sorted(_Q2_LABELS[c] for c in group))
        return FieldLabels(d, labels, (0, 7) in group, False, "L_1 = Q_2(sqrt d : d in classes)")
    # non-split: ML_1 = M(sqrt q, sqrt u_j).  A lift tau of Frobenius fixing L_1
    # must send sqrt q -> sqrt q and sqrt u_j -> q^(s_j/2) / sqrt u_j.  It exists
    # iff every square relation c = m^2 (c = q^a prod u_j^b) has N(m) = q^k,
    # k = a + sum b_j s_j / 2; sqrt(-1) then lies in L_1 iff -1 = c m^2 with
    # N(m) = -q^(-k).
    s = [unif.norm_exponent(u) for u in units]
    gens = [QuadPadic(q, Padic.zero(2, q.absprec + 64), 5)] + list(units)
    consistent = True
    zeta = None
    minus_one_in_ml1 = False
    for bits in itertools.product((0, 1), repeat=len(gens)):
        if not any(bits):
            continue
        c = QuadPadic(Padic.from_rational(2, 1, unif.prec + 8), Padic.zero(2, unif.prec + 72), 5)
        for b, g in zip(bits, gens):
            if b:
                c = c * g
        k = bits[0] + sum(b * sj for b, sj in zip(bits[1:], s)) // 2
        if m_is_square(c):
            m = m_sqrt(c)
            if _norm_sign(m.norm() * q ** (-k)) != 1:
                consistent = False
        neg = -c
        # -1 = c * m^2  <=>  m^2 = -1/c
        target = neg.inverse()
        if m_is_square(target):
            minus_one_in_ml1 = True
            m = m_sqrt(target)
            sign = _norm_sign(m.norm() * q**k)
            zeta = (sign == -1) if zeta is None else (zeta or sign == -1)
    if not consistent:
        return FieldLabels(d, None, minus_one_in_ml1, True, "M is contained in L_1")
    return FieldLabels(d, None, bool(zeta), False, "decided via the Frobenius lift fixing L_1")


def _norm_sign(x: Padic) -> int:
    r = x.residue(2)
    if r == 1:
        return 1
    if r == 3:
        return -1
    raise PrecisionError("expected +-1 to 2-adic precision")


# ---------------------------------------------------------------------------
# mu at a split multiplicative prime ell != p


def ell_adic_mu(unif: TateUniformization, P, p: int, n: int) -> int:
    """min(n, ord_p(ord_ell(u(P)) mod ord_ell(q))) at a split prime ell = unif.p."""
    if unif.field != SPLIT_FIELD:
        raise ContractError("mu is defined at split multiplicative primes")
    if unif.p == p:
        raise ContractError("ell must differ from p")
    u = unif.point_to_u(P)
    k = u.valuation() % unif.q.valuation()
    if k == 0:
        return n
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return min(n, v)


# ---------------------------------------------------------------------------
# Exhaustive realization of the quotient, independent of the dlog tables


@dataclass(frozen=True)
class QuotientRealization:
    p: int
    n: int
    split: bool
    level: int  # residues mod p^level
    units: int  # |U_level|, U = Z_p* (split) or the norm-one units of M
    powers: int  # |U_level^(p^n)|
    invariants: tuple[int, ...]  # cyclic factor orders of U / U^(p^n), descending
    stable: bool  # the same quotient order one level higher
    dlog_ok: bool  # the table dlog is a surjective homomorphism with kernel U^(p^n)

    @property
    def order(self) -> int:
        return self.units // self.powers


def _unit_residues(p: int, k: int, split: bool, D: int):
    """All of U mod p^k as ints (split) or coordinate pairs (norm one in M)."""
    import numpy as np

    mod = p**k
    if split:
        return [a for a in range(mod) if a % p]
    a = np.arange(mod, dtype=np.int64)[:, None]
    b = np.arange(mod, dtype=np.int64)[None, :]
    if p == 2:
        nrm = (a * a + a * b - b * b) % mod
    else:
        nrm = (a * a - D * (b * b % mod)) % mod
    ia, ib = np.nonzero(nrm == 1)
    return [(int(x), int(y)) for x, y in zip(ia, ib)]


def _invariants_from_counts(p: int, counts: list[int]) -> tuple[int, ...]:
    """Cyclic factor orders of an abelian p-group from |G[p^i]|, i = 0, 1, ..."""
    ranks = []
    for lo, hi in zip(counts, counts[1:]):
        r = round(math.log(hi // lo, p))
        if r == 0:
            break
        ranks.append(r)
    if not ranks:
        return ()
    return tuple(p ** sum(1 for r in ranks if r > j) for j in range(ranks[0]))


def realize_quotient(p: int, n: int, split: bool, level: int | None = None) -> QuotientRealization:
    """Enumerate U mod p^level, form U / U^(p^n) and compare with quotient_structure."""
    qs = quotient_structure(p, n, split)
    k = level if level is not None else qs.modulus_exp
    mod = p**k
    D = 5 if p == 2 else nonresidue(p)
    pn = p**n
    elems = _unit_residues(p, k, split, D)

    def mul(x, y):
        return x * y % mod if split else _mul_pair(x, y, D, p, mod)

    def power(x, e):
        return pow(x, e, mod) if split else _pow_pair(x, e, D, p, mod)

    powers = {power(x, pn) for x in elems}
    # |G[p^i]| in the quotient: cosets whose p^i-th power lands in U^(p^n)
    counts = []
    i = 0
    while True:
        killed = sum(1 for x in elems if power(x, p**i) in powers) // len(powers)
        counts.append(killed)
        if killed == len(elems) // len(powers):
            break
        i += 1
    inv = _invariants_from_counts(p, counts)

    dlog_ok = True
    if k >= qs.modulus_exp:
        def cls(x):
            r = x % p**qs.modulus_exp if split else (x[0] % p**qs.modulus_exp, x[1] % p**qs.modulus_exp)
            return qs.unit_class(r)

        image = set()
        gens = [elems[1], elems[len(elems) // 3], elems[-1]]
        for x in elems:
            c = cls(x)
            image.add(c)
            if (c == (0, 0)) != (x in powers):
                dlog_ok = False
                break
            for g in gens:
                if cls(mul(x, g)) != qs.add(c, cls(g)):
                    dlog_ok = False
        dlog_ok = dlog_ok and len(image) == qs.order
    else:
        dlog_ok = False

    stable = True
    if level is None:
        higher = realize_quotient_order(p, n, split, k + 1)
        stable = higher == len(elems) // len(powers)
    return QuotientRealization(p, n, split, k, len(elems), len(powers), inv, stable, dlog_ok)


def realize_quotient_order(p: int, n: int, split: bool, k: int) -> int:
    D = 5 if p == 2 else nonresidue(p)
    mod = p**k
    elems = _unit_residues(p, k, split, D)
    if split:
        powers = {pow(x, p**n, mod) for x in elems}
    else:
        powers = {_pow_pair(x, p**n, D, p, mod) for x in elems}
    return len(elems) // len(powers)
