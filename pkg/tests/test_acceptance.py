"""The eight acceptance criteria, one test each, with a PASS/FAIL line per criterion."""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from tatebound.bounds import NuTable, corollary_exact, kappa_lower_bound
from tatebound.cli import RunConfig, run
from tatebound.curve import WeierstrassModel, invariants
from tatebound.galois import verify_H_structure, verify_inertia_matrices, verify_submodule_lattice
from tatebound.padic import Padic, QuadPadic
from tatebound.reduction import Reduction, conductor, tate_algorithm
from tatebound.tate import (
    SPLIT_FIELD,
    TateUniformization,
    j_of_q,
    realize_quotient,
    tate_forward,
    tate_inverse,
    tate_parameter,
)

from conftest import ACCEPTANCE_LINES, AUX_91, CORPUS, gens


@contextmanager
def criterion(number, title, limit=None):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        secs = time.perf_counter() - t0
        if ok and limit is not None and secs >= limit:
            ok = False
        budget = f" (limit {limit:g}s)" if limit is not None else ""
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} [{secs:.2f}s{budget}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
    assert limit is None or secs < limit, f"criterion {number} took {secs:.2f}s"


def run_label(label, n_max=5):
    coeffs, pts, p = CORPUS[label]
    return run(RunConfig(tuple(map(Fraction, coeffs)), gens(pts), p, 1, n_max))


def by_n(report, key):
    return {row["n"]: row[key] for row in report["theorem1"]}


def primes(report):
    return {r["prime"]: r for r in report["local"]["primes"]}


def assert_monotone(report):
    ks = [row["claim_exponent"] for row in report["theorem1"]]
    assert ks == sorted(ks)


def test_criterion_1_curve_10082():
    with criterion(1, "10082 at p = 2 reproduces the printed invariants and table-derived bounds", 5):
        r = run_label("10082")
        loc = r["local"]
        assert r["status"] == "ok"
        assert loc["discriminant_factorization"] == [1, [2, 3], [71, 3]]
        assert loc["conductor"] == 10082 and loc["conductor_factorization"] == [1, [2, 1], [71, 2]]
        assert loc["j_factorization"] == [1, [2, -3], [5, 3], [19, 3]]
        pr = primes(r)
        assert pr[2]["reduction"] == "nonsplit-mult"
        assert pr[71]["reduction"] == "additive" and pr[71]["potentially_good"]
        assert by_n(r, "nu_table")[1] == {"71": 1}
        assert loc["field_labels"]["zeta4_in_L1"] is True
        assert by_n(r, "kappa_lower_bound") == {1: 0, 2: 4, 3: 6, 4: 8, 5: 10}
        assert_monotone(r)


def test_criterion_2_curve_15650():
    with criterion(2, "15650 at p = 2 reproduces the printed invariants and 2^(2n+2) | h for n = 2..5", 10):
        r = run_label("15650")
        loc = r["local"]
        assert r["status"] == "ok"
        assert loc["discriminant"] == -(2**19) * 5**6 * 313
        assert loc["discriminant_factorization"] == [-1, [2, 19], [5, 6], [313, 1]]
        assert loc["conductor"] == 15650
        pr = primes(r)
        assert pr[2]["reduction"] == "split-mult" and pr[313]["reduction"] == "nonsplit-mult"
        assert pr[5]["reduction"] == "additive" and pr[5]["potentially_good"]
        nus = by_n(r, "nu_table")
        assert nus[1] == {"5": 1, "313": 0}
        assert all(nus[n] == {"5": 0, "313": 0} for n in range(2, 6))
        assert loc["field_labels"]["sqrt_q"] == -2  # K_1 completion is Q_2(sqrt -2)
        assert set(by_n(r, "r2n").values()) == {1}
        claims = by_n(r, "claim")
        for n in range(2, 6):
            assert by_n(r, "kappa_lower_bound")[n] == 2 * n + 2
            assert claims[n] == f"2^{2 * n + 2} | h(K_n)"
        assert_monotone(r)


def test_criterion_3_curve_13467():
    with criterion(3, "13467 at p = 3 gives 3^(2n) | h for n = 1..5", 5):
        r = run_label("13467")
        loc = r["local"]
        assert r["status"] == "ok"
        assert loc["discriminant"] == -(3**11) * 67**3
        assert loc["conductor"] == 13467
        assert all(row["nu_table"] == {"67": 0} for row in r["theorem1"])
        assert by_n(r, "kappa_lower_bound") == {n: 2 * n for n in range(1, 6)}
        assert by_n(r, "claim") == {n: f"3^{2 * n} | h(K_n)" for n in range(1, 6)}
        assert_monotone(r)


def test_criterion_4_group_suite():
    with criterion(4, "submodule lattice, H_1/H_3 structure and inertia matrices, exhaustive", 1):
        lat = verify_submodule_lattice()
        assert lat.ok and len(lat.submodules) == 4 and all(lat.inclusions.values())
        h = verify_H_structure()
        assert h.ok and h.h1 == 256 and h.index_h2 == 2 and h.index_h1 == 2**5 and h.det_square_is_one
        inert = verify_inertia_matrices()
        assert inert.ok and inert.meet_v2_1 == {0}


# --- criterion 5 ------------------------------------------------------------------

ROUND_TRIP_CASES = [
    (CORPUS["10082"][0], 2),
    (CORPUS["15650"][0], 2),
    (CORPUS["13467"][0], 3),
    (AUX_91[0], 7),
    (AUX_91[0], 13),
]
N = 13  # working precision for the comparison


def random_u(rng, unif):
    p, vq = unif.p, unif.q.valuation()
    v = rng.randrange(vq)
    while True:
        a = rng.randrange(1, p ** (N + 20))
        if unif.field == SPLIT_FIELD:
            if a % p:
                return Padic(p, v, a, N + 20)
        else:
            u = QuadPadic.from_rationals(p, a, rng.randrange(p ** (N + 20)), unif.D, N + 20)
            if u.valuation() == 0:
                return u * Padic(p, v, 1, N + 40)


def test_criterion_5_tate_round_trip():
    with criterion(5, "tate_forward after tate_inverse is the identity on 5 x 100 random points; j(q(j)) = j"):
        failures = []
        for coeffs, p in ROUND_TRIP_CASES:
            E = WeierstrassModel.from_list(coeffs)
            unif = TateUniformization(E, tate_algorithm(E, p), N + 16)
            rng = random.Random(1000 + p)
            for _ in range(100):
                u = random_u(rng, unif)
                X, Y = tate_forward(u, unif.q, N + 16)
                u2 = tate_inverse(X, Y, unif.q, N + 8)
                X2, Y2 = tate_forward(u2, unif.q, N + 16)
                if not (X2.equals(X, N) and Y2.equals(Y, N)):
                    failures.append((coeffs, p, u))
            j = invariants(E).j
            assert j_of_q(tate_parameter(j, p, N).q).equals(Padic.from_rational(p, j, N))
        assert not failures, f"{len(failures)} round-trip failures"


def test_criterion_6_quotient_oracle():
    with criterion(6, "brute-force H / <H^(p^n), q> has the predicted structure for p in {2,3,5}, n <= 4"):
        for p in (2, 3, 5):
            for n in range(1, 5):
                for split in (True, False):
                    rq = realize_quotient(p, n, split)
                    expected = (2, 2**n) if p == 2 else (p**n,)
                    assert sorted(rq.invariants) == sorted(expected), (p, n, split, rq.invariants)
                    assert rq.dlog_ok and rq.stable


def test_criterion_7_corollary_identities():
    with criterion(7, "exact-formula identities for r <= 5, nu <= 5, n <= 10"):
        for r in range(6):
            for nu in range(6):
                for n in range(1, 11):
                    for p in (3, 5):
                        exact = corollary_exact(p, n, r, nu, p)
                        assert exact == (2 * n * (r - 1) + 2 * nu if n > nu else 2 * n * r)
                        assert exact % 2 == 0
                        rep = kappa_lower_bound(p, n, r, NuTable(p, n, ()), nu=nu, conductor=p)
                        assert rep.exact and rep.exact_value == exact == rep.raw_bound
                        assert rep.refined >= rep.headline
                        if nu == 0:
                            assert rep.refined == rep.headline
                        assert rep.audit() and rep.raw_bound % 2 == 0
                        assert rep.claim_exponent == max(rep.raw_bound, 0)
                # branch continuity
                assert 2 * nu * r == 2 * nu * (r - 1) + 2 * nu
                assert 2 * (nu + 1) * (r - 1) + 2 * nu == 2 * (nu + 1) * r - 2


# --- criterion 8 ------------------------------------------------------------------


def random_curves(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        coeffs = [rng.randint(0, 1), rng.randint(-1, 1), rng.randint(0, 1), rng.randint(-80, 80), rng.randint(-80, 80)]
        E = WeierstrassModel.from_list(coeffs)
        if invariants(E).disc != 0:
            out.append(E)
    return out


def _nonresidue(ell):
    return next(d for d in range(3, 10 * ell) if d % ell and pow(d, (ell - 1) // 2, ell) == ell - 1)


def test_criterion_8_reduction_properties():
    with criterion(8, "Ogg's formula on 50 random curves, idempotence and twist flips at ell >= 5"):
        flips = 0
        for E in random_curves(50, 2024):
            prof = conductor(E)
            inv = invariants(E)
            for ell, d in prof.local.items():
                assert d.ord_disc == d.conductor_exponent + d.components - 1, (E, ell)
                again = tate_algorithm(d.minimal_model, ell)
                assert again.minimal_model == d.minimal_model
                assert (again.kodaira, again.ord_disc, again.conductor_exponent) == (
                    d.kodaira,
                    d.ord_disc,
                    d.conductor_exponent,
                )
                if d.multiplicative and ell >= 5:
                    D = _nonresidue(ell)
                    tw = tate_algorithm(WeierstrassModel(0, 0, 0, -27 * inv.c4 * D**2, -54 * inv.c6 * D**3), ell)
                    assert tw.multiplicative
                    assert {tw.reduction, d.reduction} == {Reduction.SPLIT, Reduction.NONSPLIT}
                    flips += 1
        assert flips > 0


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
