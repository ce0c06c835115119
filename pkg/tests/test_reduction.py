import random
from fractions import Fraction

import pytest

from tatebound.arith import DomainError, kronecker_symbol, primes_below
from tatebound.curve import WeierstrassModel, invariants, transform
from tatebound.reduction import (
    ContractError,
    Reduction,
    conductor,
    hypotheses_met,
    hypothesis_check,
    kodaira_components,
    split_or_nonsplit,
    tate_algorithm,
)

# Conductor, minimal discriminant and {prime: (Kodaira symbol, reduction)} cross-checked with PARI.
KNOWN = [
    ([1, 0, 1, -141, 624], 10082, 2863288, {2: ("I3", "nonsplit-mult"), 71: ("III", "additive")}),
    (
        [1, 1, 1, -55238, 4974531],
        15650,
        -2564096000000,
        {2: ("I19", "split-mult"), 5: ("I0*", "additive"), 313: ("I1", "nonsplit-mult")},
    ),
    ([1, 0, 0, 543, 10026], 13467, -53279263161, {3: ("I11", "split-mult"), 67: ("III", "additive")}),
    ([0, -1, 1, -10, -20], 11, -161051, {11: ("I5", "split-mult")}),
    ([0, 1, 1, -7, 5], 91, -91, {7: ("I1", "split-mult"), 13: ("I1", "split-mult")}),
    ([1, 0, 1, -8, 6], 170, 2**4 * 5**2 * 17, {2: ("I4", "nonsplit-mult"), 5: ("I2", "split-mult"), 17: ("I1", "split-mult")}),
    ([0, 0, 0, -1, 0], 32, 64, {2: ("III", "additive")}),
    ([0, 0, 0, 1, 0], 64, -64, {2: ("II", "additive")}),
]


@pytest.mark.parametrize("coeffs, N, dmin, local", KNOWN)
def test_known_reduction_data(coeffs, N, dmin, local):
    prof = conductor(WeierstrassModel.from_list(coeffs))
    assert prof.conductor == N
    assert prof.minimal_disc == dmin
    assert {p: (d.kodaira, d.reduction.value) for p, d in prof.local.items()} == local


def test_additive_exponents():
    assert tate_algorithm(WeierstrassModel.from_list([0, 0, 0, -1, 0]), 2).conductor_exponent == 5
    assert tate_algorithm(WeierstrassModel.from_list([0, 0, 0, 1, 0]), 2).conductor_exponent == 6


def test_nonminimal_model_is_minimized():
    E = WeierstrassModel.from_list([0, -1, 1, -10, -20])
    big = transform(E, r=3, s=-1, t=2, u=Fraction(1, 6))  # scales Delta by 6^12
    assert big.is_integral()
    prof = conductor(big)
    assert prof.conductor == 11 and prof.minimal_disc == -161051
    assert set(prof.local) == {11}


def test_potentially_good_flags():
    prof = conductor(WeierstrassModel.from_list([1, 1, 1, -55238, 4974531]))
    assert prof.local[5].potentially_good and not prof.local[5].multiplicative
    assert not prof.local[313].potentially_good


def test_hypothesis_check():
    prof = conductor(WeierstrassModel.from_list([1, 0, 1, -141, 624]))
    assert hypotheses_met(hypothesis_check(prof, 2))
    assert not hypotheses_met(hypothesis_check(prof, 71))  # additive at p
    assert not hypotheses_met(hypothesis_check(prof, 3))  # good at p
    # ord_11(Delta) = 5 is divisible by 5: fails at p = 5 only if 5 were multiplicative
    prof11 = conductor(WeierstrassModel.from_list([0, -1, 1, -10, -20]))
    diags = {d.name: d.ok for d in hypothesis_check(prof11, 11)}
    assert diags == {"multiplicative_at_p": True, "other_primes_mult_or_potgood": True, "p_not_dividing_ord_p_disc": True}


def test_potentially_multiplicative_prime_is_rejected():
    # twisting 91 by 13 turns I1 at 13 into I1*: additive with non-integral j
    inv = invariants(WeierstrassModel.from_list([0, 1, 1, -7, 5]))
    twist = WeierstrassModel(0, 0, 0, -27 * inv.c4 * 13**2, -54 * inv.c6 * 13**3)
    prof = conductor(twist)
    assert prof.local[7].multiplicative
    assert prof.local[13].kodaira == "I1*" and not prof.local[13].potentially_good
    diags = {d.name: d.ok for d in hypothesis_check(prof, 7)}
    assert diags["multiplicative_at_p"] and not diags["other_primes_mult_or_potgood"]


def test_kodaira_components():
    assert [kodaira_components(s) for s in ("I0", "I7", "II", "III", "IV", "I0*", "I3*", "IV*", "III*", "II*")] == [
        1, 7, 1, 2, 3, 5, 8, 7, 8, 9,
    ]


def test_split_or_nonsplit_contract():
    d = tate_algorithm(WeierstrassModel.from_list([1, 0, 1, -141, 624]), 71)
    with pytest.raises(ContractError):
        split_or_nonsplit(d)


def _random_curves(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        coeffs = [rng.randint(0, 1), rng.randint(-1, 1), rng.randint(0, 1), rng.randint(-60, 60), rng.randint(-60, 60)]
        E = WeierstrassModel.from_list(coeffs)
        if invariants(E).disc != 0:
            out.append(E)
    return out


def _naive_trace(E, ell):
    a1, a2, a3, a4, a6 = (int(c) for c in E.ainvs)
    count = 1
    for x in range(ell):
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % ell == 0:
                count += 1
    return ell + 1 - count


@pytest.mark.parametrize("E", _random_curves(25, 7), ids=str)
def test_ogg_formula_all_bad_primes(E):
    for p, d in conductor(E).local.items():
        assert d.ord_disc == d.conductor_exponent + d.components - 1, (p, d.kodaira)


@pytest.mark.parametrize("E", _random_curves(25, 8), ids=str)
def test_tate_algorithm_idempotent(E):
    for p, d in conductor(E).local.items():
        again = tate_algorithm(d.minimal_model, p)
        assert again.minimal_model == d.minimal_model
        assert (again.kodaira, again.ord_disc, again.conductor_exponent) == (d.kodaira, d.ord_disc, d.conductor_exponent)


@pytest.mark.parametrize("E", _random_curves(40, 9), ids=str)
def test_split_flag_matches_point_count(E):
    # at multiplicative ell the trace is +1 (split) or -1 (non-split)
    for ell, d in conductor(E).local.items():
        if d.multiplicative and ell < 400:
            a = _naive_trace(d.minimal_model, ell)
            assert a == (1 if d.reduction is Reduction.SPLIT else -1)


def test_quadratic_twist_flips_split():
    flipped = 0
    for E in _random_curves(60, 10):
        inv = invariants(E)
        for ell, d in conductor(E).local.items():
            if not d.multiplicative or ell < 5:
                continue
            dd = next(q for q in primes_below(200) if q > 2 and q != ell and kronecker_symbol(q, ell) == -1)
            tw = conductor(WeierstrassModel(0, 0, 0, -27 * inv.c4 * dd**2, -54 * inv.c6 * dd**3))
            assert tw.local[ell].multiplicative
            assert tw.local[ell].reduction is not d.reduction
            flipped += 1
    assert flipped >= 10


def test_singular_curve_rejected():
    with pytest.raises(DomainError):
        conductor(WeierstrassModel.from_list([0, 0, 0, 0, 0]))
