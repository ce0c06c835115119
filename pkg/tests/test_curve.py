from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tatebound.arith import DomainError, primes_below
from tatebound.curve import (
    MordellWeilInput,
    WeierstrassModel,
    add,
    count_points_mod,
    integral_model,
    invariants,
    multiply,
    negate,
    parse_curve,
    parse_points,
    point_order,
    torsion_subgroup,
    transform,
)

E11 = WeierstrassModel.from_list([0, -1, 1, -10, -20])
E10082 = WeierstrassModel.from_list([1, 0, 1, -141, 624])
P1, P2 = (Fraction(-6), Fraction(38)), (Fraction(6), Fraction(-1))


def test_invariants_11a1():
    inv = invariants(E11)
    assert (inv.c4, inv.c6, inv.disc) == (496, 20008, -161051)
    assert inv.j == Fraction(-122023936, 161051)
    assert inv.c4**3 - inv.c6**2 == 1728 * inv.disc


def test_invariants_printed_curve():
    inv = invariants(E10082)
    assert inv.disc == 2**3 * 71**3
    assert inv.j == Fraction(5**3 * 19**3, 2**3)


@given(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5), st.integers(1, 4))
def test_transform_preserves_j_and_scales_disc(r, s, t, u):
    E2 = transform(E10082, r, s, t, u)
    assert invariants(E2).j == invariants(E10082).j
    assert invariants(E2).disc == invariants(E10082).disc / Fraction(u) ** 12


def test_integral_model():
    E = WeierstrassModel.from_list([0, 0, 0, Fraction(1, 4), Fraction(1, 8)])
    Ei, d = integral_model(E)
    assert Ei.is_integral() and d == 2
    assert invariants(Ei).j == invariants(E).j


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_group_law_is_associative_and_commutative(a, b, c):
    P = multiply(E10082, a, P1)
    Q = multiply(E10082, b, P2)
    R = add(E10082, multiply(E10082, c, P1), P2)
    assert add(E10082, P, Q) == add(E10082, Q, P)
    assert add(E10082, add(E10082, P, Q), R) == add(E10082, P, add(E10082, Q, R))
    assert add(E10082, P, negate(E10082, P)) is None


def test_multiply_matches_repeated_addition():
    acc = None
    for m in range(8):
        assert multiply(E10082, m, P1) == acc
        acc = add(E10082, acc, P1)
    assert multiply(E10082, -3, P1) == negate(E10082, multiply(E10082, 3, P1))


@pytest.mark.parametrize(
    "coeffs, order",
    [
        ([0, -1, 1, -10, -20], 5),
        ([0, 0, 0, -1, 0], 4),
        ([0, 0, 0, 0, 8], 2),  # (-2, 0) is a rational 2-torsion point
        ([1, 0, 1, -141, 624], 1),
        ([1, 1, 1, -55238, 4974531], 1),
        ([1, 0, 0, 543, 10026], 1),
    ],
)
def test_torsion_orders(coeffs, order):
    E = WeierstrassModel.from_list(coeffs)
    n, gens = torsion_subgroup(E)
    assert n == order
    for P in gens:
        assert point_order(E, P) is not None


def test_mordell_weil_input_checks():
    mw = MordellWeilInput.build(E10082, [P1, P2])
    assert mw.rank == 2
    with pytest.raises(DomainError):
        MordellWeilInput.build(E10082, [(1, 1)])
    with pytest.raises(DomainError):
        MordellWeilInput.build(E11, [(5, 5)])  # a 5-torsion point


def test_parsers():
    assert parse_curve("1, 0, 1, -141, 624") == E10082
    assert parse_points("(37305/64,-6849551/512);(-75,2987)")[0] == (Fraction(37305, 64), Fraction(-6849551, 512))
    with pytest.raises(ValueError, match="position 8"):
        parse_points("(1,2) ; (3 4)")
    with pytest.raises(ValueError, match="five"):
        parse_curve("1,2,3")
    with pytest.raises(ValueError, match="a4"):
        parse_curve("1,0,1,x,624")


def _naive_trace(E, ell):
    a1, a2, a3, a4, a6 = (int(c) for c in E.ainvs)
    count = 1
    for x in range(ell):
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % ell == 0:
                count += 1
    return ell + 1 - count


@pytest.mark.parametrize("ell", [p for p in primes_below(60) if p not in (2, 71)])
def test_point_count_against_naive_enumeration(ell):
    assert count_points_mod(E10082, ell) == _naive_trace(E10082, ell)


def test_point_count_11a1_known_traces():
    # a_ell of the weight-2 newform of level 11
    known = {3: -1, 5: 1, 7: -2, 13: 4, 17: -2, 19: 0, 23: -1, 29: 0, 31: 7}
    assert {ell: count_points_mod(E11, ell) for ell in known} == known
    with pytest.raises(DomainError):
        count_points_mod(E11, 11)
