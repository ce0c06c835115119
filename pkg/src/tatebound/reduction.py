"""Local reduction data via Tate's algorithm, and the global conductor."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import factor, kronecker_symbol, valuation
from .curve import WeierstrassModel, b_invariants, integral_model, invariants, transform


class ContractError(RuntimeError):
    """An operation was called on data it is not defined for."""


class Reduction(str, enum.Enum):
    GOOD = "good"
    SPLIT = "split-mult"
    NONSPLIT = "nonsplit-mult"
    ADDITIVE = "additive"

    @property
    def multiplicative(self) -> bool:
        return self in (Reduction.SPLIT, Reduction.NONSPLIT)


@dataclass(frozen=True)
class LocalReductionData:
    prime: int
    minimal_model: WeierstrassModel
    ord_disc: int
    kodaira: str
    conductor_exponent: int
    reduction: Reduction
    potentially_good: bool
    ord_j: int | None  # None when j = 0
    # (r, s, t, u) applied in order, input integral model -> minimal model
    transforms: tuple[tuple[Fraction, Fraction, Fraction, Fraction], ...] = field(default=(), repr=False)

    @property
    def multiplicative(self) -> bool:
        return self.reduction.multiplicative

    @property
    def components(self) -> int:
        return kodaira_components(self.kodaira)


def kodaira_components(symbol: str) -> int:
    fixed = {"I0": 1, "II": 1, "III": 2, "IV": 3, "I0*": 5, "IV*": 7, "III*": 8, "II*": 9}
    if symbol in fixed:
        return fixed[symbol]
    if symbol.endswith("*"):
        return 5 + int(symbol[1:-1])
    return int(symbol[1:])


def _roots_mod_p(coeffs: list[int], p: int) -> list[int]:
    """Roots in F_p of a small-degree polynomial (coefficients low first)."""
    cs = [c % p for c in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    if len(cs) <= 1:
        return [] if cs else list(range(p))
    if p < 5000:
        return [x for x in range(p) if sum(c * pow(x, i, p) for i, c in enumerate(cs)) % p == 0]
    return _roots_mod_large_p(cs, p)


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _ppowmod(base: list[int], e: int, m: list[int], p: int) -> list[int]:
    out = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            out = _pmulmod(out, base, m, p)
        base = _pmulmod(base, base, m, p)
        e >>= 1
    return out


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def _roots_mod_large_p(f: list[int], p: int) -> list[int]:
    # restrict to the split part gcd(f, x^p - x), then split it with
    # gcd(g, (x + c)^((p-1)/2) - 1) for c = 0, 1, 2, ...
    g = _pgcd(f, _psub(_ppowmod([0, 1], p, f, p), [0, 1], p), p)
    roots: list[int] = []
    stack = [g]
    c = 0
    while stack:
        h = stack.pop()
        if len(h) == 1:
            continue
        if len(h) == 2:
            roots.append((-h[0]) % p)
            continue
        while True:
            w = _psub(_ppowmod([c, 1], (p - 1) // 2, h, p), [1], p)
            c += 1
            d = _pgcd(h, w, p) if w else h
            if 1 < len(d) < len(h):
                break
        q = _pdiv_exact(h, d, p)
        stack.extend((d, q))
    return sorted(roots)


def _pdiv_exact(a: list[int], b: list[int], p: int) -> list[int]:
    a = a[:]
    inv = pow(b[-1], -1, p)
    q = [0] * (len(a) - len(b) + 1)
    for k in range(len(q) - 1, -1, -1):
        c = a[k + len(b) - 1] * inv % p
        q[k] = c
        for i, bc in enumerate(b):
            a[k + i] = (a[k + i] - c * bc) % p
    return q


def _quadratic_splits(a: int, b: int, c: int, p: int) -> bool:
    """Whether a X^2 + b X + c (nonzero mod p) has a root in F_p."""
    return bool(_roots_mod_p([c, b, a], p))


def tate_algorithm(model: WeierstrassModel, p: int) -> LocalReductionData:
    """Tate's algorithm at p on any model (made integral first)."""
    E, _ = integral_model(model)
    j = invariants(model).j
    ord_j = None if j == 0 else valuation(j, p)
    transforms: list[tuple] = []

    def move(r=0, s=0, t=0, u=1):
        nonlocal E
        E = transform(E, r, s, t, u)
        transforms.append(tuple(map(Fraction, (r, s, t, u))))

    while True:
        inv = invariants(E)
        vD = valuation(inv.disc, p)
        if vD == 0:
            return LocalReductionData(p, E, 0, "I0", 0, Reduction.GOOD, False, ord_j, tuple(transforms))
        b2, b4, b6, b8 = inv.b2, inv.b4, inv.b6, inv.b8
        c4, c6 = inv.c4, inv.c6
        a1, a2, a3, a4, a6 = (int(a) for a in E.ainvs)

        # move the singular point of the reduction to (0, 0)
        if p == 2:
            if b2 % 2 == 0:
                r = a4 % 2
                t = (r * (1 + a2 + a4) + a6) % 2
            else:
                r = a3 % 2
                t = (r + a4) % 2
        elif p == 3:
            r = (-b6) % 3 if b2 % 3 == 0 else (-b2 * b4) % 3
            t = (a1 * r + a3) % 3
        else:
            if c4 % p == 0:
                r = (-pow(12, -1, p) * b2) % p
            else:
                r = (-pow(12 * int(c4), -1, p) * (c6 + b2 * c4)) % p
            t = (-pow(2, -1, p) * (a1 * r + a3)) % p
        r, t = int(r), int(t)
        move(r, 0, t)
        a1, a2, a3, a4, a6 = (int(a) for a in E.ainvs)
        assert a3 % p == 0 and a4 % p == 0 and a6 % p == 0, "singular point not at origin"
        b2, b4, b6, b8 = (int(b) for b in b_invariants(E))

        if b2 % p != 0:
            # multiplicative: tangent directions are roots of T^2 + a1 T - a2
            split = _quadratic_splits(1, a1, -a2, p)
            red = Reduction.SPLIT if split else Reduction.NONSPLIT
            return LocalReductionData(p, E, vD, f"I{vD}", 1, red, False, ord_j, tuple(transforms))

        pot = ord_j is None or ord_j >= 0

        def additive(kod: str, f: int) -> LocalReductionData:
            return LocalReductionData(p, E, vD, kod, f, Reduction.ADDITIVE, pot, ord_j, tuple(transforms))

        if a6 % p**2:
            return additive("II", vD)
        if b8 % p**3:
            return additive("III", vD - 1)
        if b6 % p**3:
            return additive("IV", vD - 2)

        # make p | a1, a2; p^2 | a3, a4; p^3 | a6
        if p == 2:
            s = a2 % 2
            t = 2 * ((a6 // 4) % 2)
        else:
            s = (-a1 * pow(2, -1, p)) % p
            t = (-a3 * pow(2, -1, p)) % p**2
        move(0, s, t)
        a1, a2, a3, a4, a6 = (int(a) for a in E.ainvs)
        assert a1 % p == 0 and a2 % p == 0 and a3 % p**2 == 0 and a4 % p**2 == 0 and a6 % p**3 == 0

        # P(T) = T^3 + a2/p T^2 + a4/p^2 T + a6/p^3
        b, c, d = a2 // p, a4 // p**2, a6 // p**3
        cubic = [d, c, b, 1]
        roots = _roots_mod_p(cubic, p)
        deriv_roots = [x for x in roots if (3 * x * x + 2 * b * x + c) % p == 0]
        if not deriv_roots:
            return additive("I0*", vD - 4)
        x0 = deriv_roots[0]
        if _cubic_has_other_root(cubic, x0, p):
            # double root: I_m^*
            move(p * x0, 0, 0)
            ix = iy = 3
            mx = my = p**2
            while True:
                a1, a2, a3, a4, a6 = (int(a) for a in E.ainvs)
                xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
                # Y^2 + xa3 Y - xa6
                if (xa3 * xa3 + 4 * xa6) % p:
                    break
                yroot = _roots_mod_p([-xa6, xa3, 1], p)[0]
                move(0, 0, my * yroot)
                my *= p
                iy += 1
                a1, a2, a3, a4, a6 = (int(a) for a in E.ainvs)
                xa2, xa3, xa4, xa6 = a2 // p, a3 // my, a4 // (p * mx), a6 // (mx * my)
                # xa2 X^2 + xa4 X + xa6
                if (xa4 * xa4 - 4 * xa2 * xa6) % p:
                    break
                xroot = _roots_mod_p([xa6, xa4, xa2], p)[0]
                move(mx * xroot, 0, 0)
                mx *= p
                ix += 1
            m = ix + iy - 5
            return additive(f"I{m}*", vD - 4 - m)

        # triple root
        move(p * x0, 0, 0)
        a1, a2, a3, a4, a6 = (int(a) for a in E.ainvs)
        x3, x6 = a3 // p**2, a6 // p**4
        if (x3 * x3 + 4 * x6) % p:
            return additive("IV*", vD - 6)
        yroot = _roots_mod_p([-x6, x3, 1], p)[0]
        move(0, 0, p**2 * yroot)
        a1, a2, a3, a4, a6 = (int(a) for a in E.ainvs)
        if a4 % p**4:
            return additive("III*", vD - 7)
        if a6 % p**6:
            return additive("II*", vD - 8)
        # not minimal: scale down and start over
        move(0, 0, 0, p)


def _cubic_has_other_root(cubic: list[int], x0: int, p: int) -> bool:
    # a double root leaves a simple root elsewhere; a triple root does not
    return any(x != x0 for x in _roots_mod_p(cubic, p))


def split_or_nonsplit(data: LocalReductionData) -> Reduction:
    """Split/non-split flag, recomputed from the minimal model."""
    if not data.multiplicative:
        raise ContractError(f"reduction at {data.prime} is not multiplicative")
    p = data.prime
    inv = invariants(data.minimal_model)
    if p >= 5:
        c6 = inv.c6
        k = kronecker_symbol(int(-c6.numerator * c6.denominator), p)
        return Reduction.SPLIT if k == 1 else Reduction.NONSPLIT
    # small primes: tangent cone of the node, already at the origin
    a1, a2 = int(data.minimal_model.a1), int(data.minimal_model.a2)
    return Reduction.SPLIT if _quadratic_splits(1, a1, -a2, p) else Reduction.NONSPLIT


@dataclass(frozen=True)
class GlobalReductionProfile:
    conductor: int
    minimal_disc: int
    local: dict[int, LocalReductionData]

    @property
    def bad_primes(self) -> list[int]:
        return sorted(self.local)


def conductor(model: WeierstrassModel) -> GlobalReductionProfile:
    E, _ = integral_model(model)
    disc = invariants(E).disc
    sign = 1 if disc > 0 else -1
    local: dict[int, LocalReductionData] = {}
    N = 1
    dmin = sign
    for p in factor(int(disc)).primes():
        data = tate_algorithm(E, p)
        if data.reduction is Reduction.GOOD:
            continue
        local[p] = data
        N *= p**data.conductor_exponent
        dmin *= p**data.ord_disc
    return GlobalReductionProfile(N, dmin, local)


@dataclass
class Diagnostic:
    name: str
    ok: bool
    reason: str


def hypothesis_check(profile: GlobalReductionProfile, p: int) -> list[Diagnostic]:
    """Reduction-type hypotheses of the class-number bound, as diagnostics."""
    out = []
    data = profile.local.get(p)
    mult = data is not None and data.multiplicative
    out.append(
        Diagnostic(
            "multiplicative_at_p",
            mult,
            f"{data.reduction.value} ({data.kodaira}) at {p}" if data else f"good reduction at {p}",
        )
    )
    if not mult:
        out[-1].reason = "not multiplicative at p: " + out[-1].reason
    others_ok = True
    bad = []
    for ell, d in sorted(profile.local.items()):
        if ell == p:
            continue
        if not (d.multiplicative or d.potentially_good):
            others_ok = False
            bad.append(f"{ell} ({d.kodaira}, j not integral)")
    out.append(
        Diagnostic(
            "other_primes_mult_or_potgood",
            others_ok,
            "all other bad primes multiplicative or potentially good"
            if others_ok
            else "potentially multiplicative additive reduction at " + ", ".join(bad),
        )
    )
    if mult:
        ok = data.ord_disc % p != 0
        out.append(Diagnostic("p_not_dividing_ord_p_disc", ok, f"ord_{p}(Delta_min) = {data.ord_disc}"))
    else:
        out.append(Diagnostic("p_not_dividing_ord_p_disc", False, "undefined: not multiplicative at p"))
    return out


def hypotheses_met(diags: list[Diagnostic]) -> bool:
    return all(d.ok for d in diags)

