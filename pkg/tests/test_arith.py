from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tatebound.arith import (
    INF,
    DomainError,
    divisors,
    factor,
    is_prime,
    kronecker_symbol,
    primes_below,
    rational_roots,
    sqrt_mod_prime_power,
    valuation,
)

sympy = pytest.importorskip("sympy")


@given(st.integers(min_value=-(10**15), max_value=10**15).filter(lambda n: n != 0))
@settings(max_examples=100)
def test_factor_matches_sympy(n):
    f = factor(n)
    assert f.value() == n
    assert dict(f.factors) == sympy.factorint(abs(n))


def test_factor_semiprime_needs_rho():
    p, q = 1_000_003, 998_244_353
    assert factor(p * q).factors == ((p, 1), (q, 1))


def test_factor_zero_is_an_error():
    with pytest.raises(DomainError):
        factor(0)


def test_primes_below_and_is_prime_agree():
    ps = primes_below(2000)
    assert all(is_prime(p) for p in ps)
    assert sum(1 for n in range(2000) if is_prime(n)) == len(ps)
    assert is_prime(2**61 - 1) and not is_prime(2**61 + 1)


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert len(divisors(2**4 * 3**2)) == 15


@given(st.fractions().filter(lambda x: x != 0), st.sampled_from([2, 3, 5, 7]))
def test_valuation_multiplicative(x, p):
    y = x * p**3
    assert valuation(y, p) == valuation(x, p) + 3
    assert valuation(0, p) is INF


@given(st.integers(-500, 500), st.sampled_from([3, 5, 7, 11, 13, 101]))
def test_kronecker_matches_euler_criterion(a, p):
    expected = 0 if a % p == 0 else (1 if pow(a, (p - 1) // 2, p) == 1 else -1)
    assert kronecker_symbol(a, p) == expected


@given(st.integers(-500, 500), st.integers(0, 150).map(lambda k: 2 * k + 1))
def test_kronecker_matches_jacobi_for_odd_n(a, n):
    assert kronecker_symbol(a, n) == sympy.jacobi_symbol(a % n, n)


@given(st.integers(0, 10**6), st.sampled_from([(2, 12), (3, 8), (5, 5), (7, 4)]), st.data())
def test_sqrt_mod_prime_power(a, pk, data):
    p, kmax = pk
    k = data.draw(st.integers(1, kmax))
    mod = p**k
    r = sqrt_mod_prime_power(a, p, k)
    squares = {x * x % mod for x in range(mod)}
    if r is None:
        assert a % mod not in squares
    else:
        assert r * r % mod == a % mod


def test_rational_roots():
    # (2t - 1)(t + 3)(t^2 + 1)
    assert rational_roots([-3, 5, -1, 5, 2]) == [Fraction(-3), Fraction(1, 2)]
    assert rational_roots([0, 0, 1]) == [0]
    with pytest.raises(DomainError):
        rational_roots([0, 0])


@given(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=12), min_size=1, max_size=3))
def test_rational_roots_recovers_planted_roots(roots):
    coeffs = [Fraction(1)]
    for r in roots:  # multiply by (t - r)
        coeffs = [-r * coeffs[0]] + [coeffs[i - 1] - r * coeffs[i] for i in range(1, len(coeffs))] + [coeffs[-1]]
    assert set(rational_roots(coeffs)) == set(roots)
