"""Lower bounds for kappa_n, the exact rank formula for prime conductor, and claims.

kappa_n is the exponent with [L_n cap K_n^ur : K_n] = p^kappa_n, where
K_n = Q(E[p^n]); p^kappa_n divides the class number of K_n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import valuation
from .reduction import ContractError, LocalReductionData, Reduction


def _ord_p(m: int, p: int) -> int:
    return valuation(m, p)


def nu_ell(data: LocalReductionData, p: int, n: int) -> int:
    """The per-prime deduction nu_ell from the reduction type at ell != p."""
    ell = data.prime
    if ell == p:
        raise ContractError("nu_ell is defined for ell != p")
    if n < 1:
        raise ContractError("n must be >= 1")
    red = data.reduction
    if red == Reduction.SPLIT:
        return min(_ord_p(data.ord_disc, p), n)
    if p != 2:
        return 0
    if red == Reduction.ADDITIVE and data.potentially_good and n == 1:
        return 1
    if red == Reduction.NONSPLIT and data.ord_disc % 2 == 0:
        return 1
    return 0


def nu_ell_held(data: LocalReductionData, p: int, n: int) -> int:
    """Variant keeping nu_ell = 1 at potentially good primes for every n (p = 2)."""
    if p == 2 and data.reduction == Reduction.ADDITIVE and data.potentially_good:
        return 1
    return nu_ell(data, p, n)


@dataclass(frozen=True)
class NuTable:
    p: int
    n: int
    entries: tuple[tuple[int, int], ...]  # (ell, nu_ell), ell ascending

    @property
    def s(self) -> int:
        return sum(v for _, v in self.entries)

    def as_dict(self) -> dict[int, int]:
        return dict(self.entries)


def nu_table(local: dict[int, LocalReductionData], p: int, n: int, rule=nu_ell) -> NuTable:
    rows = tuple((ell, rule(d, p, n)) for ell, d in sorted(local.items()) if ell != p)
    return NuTable(p, n, rows)


def inertia_bound_p(p: int, n: int, nu: int, r2n: int | None = None, delta2: int | None = None) -> int:
    """Exponent e with |I_p| = p^e (odd p) or |I_p| <= 2^e (p = 2)."""
    if p == 2:
        if r2n is None or delta2 is None:
            raise ContractError("p = 2 needs r_{2,n} and delta_2")
        return 2 * (n + r2n - 2) + delta2
    return 2 * (n - nu) if n > nu else 0


def inertia_bound_ell(nu: int) -> int:
    return 2 * nu


@dataclass(frozen=True)
class BoundReport:
    p: int
    n: int
    r: int
    nu_table: NuTable
    r2n: int | None
    delta2: int | None
    nu: int | None
    headline: int  # the unrefined bound, raw
    refined: int | None  # odd p only, raw
    trail: tuple[tuple[str, int], ...]  # signed terms of the reported bound
    inertia_p: int
    inertia_ell: tuple[tuple[int, int], ...]
    exact: bool = False
    exact_value: int | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def raw_bound(self) -> int:
        return max(self.headline, self.refined) if self.refined is not None else self.headline

    @property
    def kappa_lower_bound(self) -> int:
        return max(self.raw_bound, 0)

    @property
    def claim_exponent(self) -> int:
        return self.kappa_lower_bound

    def audit(self) -> bool:
        return sum(v for _, v in self.trail) == self.raw_bound


def kappa_lower_bound(
    p: int,
    n: int,
    r: int,
    table: NuTable,
    r2n: int | None = None,
    delta2: int | None = None,
    nu: int | None = None,
    conductor: int | None = None,
) -> BoundReport:
    s = table.s
    base = 2 * n * (r - 1)
    notes = []
    if p == 2:
        if r2n is None or delta2 is None:
            raise ContractError("p = 2 needs r_{2,n} and delta_2")
        trail = (("2n(r-1)", base), ("-2(r2n-2)", -2 * (r2n - 2)), ("-delta2", -delta2), ("-2s", -2 * s))
        headline = sum(v for _, v in trail)
        refined = None
    else:
        headline = base - 2 * s
        refined = None
        trail = (("2n(r-1)", base), ("-2s", -2 * s))
        if nu is not None:
            if n > nu:
                refined = base + 2 * nu - 2 * s
                if refined > headline:
                    trail = (("2n(r-1)", base), ("+2nu", 2 * nu), ("-2s", -2 * s))
            else:
                refined = 2 * n * r - 2 * s
                if refined > headline:
                    trail = (("2nr", 2 * n * r), ("-2s", -2 * s))
    exact = False
    exact_value = None
    if conductor is not None and conductor == p and nu is not None:
        exact = True
        exact_value = corollary_exact(p, n, r, nu, conductor)
    raw = max(headline, refined) if refined is not None else headline
    if raw < 0:
        notes.append(f"raw bound {raw} is negative; the claim is vacuous")
    inertia_p = inertia_bound_p(p, n, nu if nu is not None else 0, r2n, delta2)
    inertia_ell = tuple((ell, inertia_bound_ell(v)) for ell, v in table.entries)
    return BoundReport(
        p, n, r, table, r2n, delta2, nu, headline, refined, trail, inertia_p, inertia_ell, exact, exact_value, tuple(notes)
    )


def corollary_exact(p: int, n: int, r: int, nu: int, conductor: int | None = None) -> int:
    """kappa_n exactly, valid when the conductor equals p."""
    if conductor is not None and conductor != p:
        raise ContractError(f"exact formula needs conductor {p}, got {conductor}")
    if n > nu:
        return 2 * n * (r - 1) + 2 * nu
    return 2 * n * r


@dataclass(frozen=True)
class Claim:
    p: int
    k: int
    vacuous: bool

    def __str__(self):
        return f"{self.p}^{self.k} | h(K_n)" + (" (vacuous)" if self.vacuous else "")


def divisibility_claim(report: BoundReport) -> Claim:
    k = report.claim_exponent
    return Claim(report.p, k, report.raw_bound <= 0)


__all__ = [
    "BoundReport",
    "Claim",
    "NuTable",
    "corollary_exact",
    "divisibility_claim",
    "inertia_bound_ell",
    "inertia_bound_p",
    "kappa_lower_bound",
    "nu_ell",
    "nu_ell_held",
    "nu_table",
]
