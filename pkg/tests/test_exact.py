"""Integer utility layer: factorization, orders, Cornacchia, CRT."""

import math
from fractions import Fraction

import pytest

from lcong.exact import (
    bernoulli, centered_lift, cornacchia_4p_11, crt_pair, factorize,
    is_prime, kronecker, legendre, mult_order, primes_upto, sigma,
    squarefree_part, valuation,
)


def test_factorize_small():
    assert factorize(1) == {}
    assert factorize(2 ** 5 * 5 ** 3 * 7 * 13) == {2: 5, 5: 3, 7: 1, 13: 1}
    assert factorize(-360) == {2: 3, 3: 2, 5: 1}
    assert factorize(10 ** 9 + 7) == {10 ** 9 + 7: 1}


def test_factorize_reconstructs():
    for n in range(2, 4000):
        prod = 1
        for q, e in factorize(n).items():
            assert is_prime(q)
            prod *= q ** e
        assert prod == n


def test_valuation():
    assert valuation(0, 3) == math.inf
    assert valuation(54, 3) == 3
    assert valuation(Fraction(5, 9), 3) == -2
    assert valuation(Fraction(-18, 5), 3) == 2


def test_sigma_vs_sum():
    for n in range(1, 500):
        assert sigma(n, 3) == sum(d ** 3 for d in range(1, n + 1) if n % d == 0)


def test_mult_order():
    # ord of q mod 3: 1 iff q = 1 mod 3
    assert mult_order(7, 3) == 1
    assert mult_order(2, 3) == 2
    assert mult_order(2, 9) == 6
    for a in (2, 5, 7):
        r = mult_order(a, 81)
        assert pow(a, r, 81) == 1
        for d in range(1, r):
            assert pow(a, d, 81) != 1


def test_primes_upto():
    ps = primes_upto(100)
    assert ps[:6] == [2, 3, 5, 7, 11, 13]
    assert len(ps) == 25
    assert all(is_prime(p) for p in ps)


def test_legendre_kronecker_agree():
    for p in (3, 7, 11, 101):
        for a in range(1, 40):
            if a % p:
                assert legendre(a, p) == kronecker(a, p)


def test_kronecker_neg11_matches_splitting():
    # chi(q) = (q | 11) for odd q != 11 by quadratic reciprocity (11 = 3 mod 4)
    for q in (3, 5, 23, 31, 37, 53, 59):
        want = 1 if pow(q % 11, 5, 11) == 1 else -1
        assert kronecker(-11, q) == want
    assert kronecker(-11, 2) == -1   # -11 = 5 mod 8, inert
    assert kronecker(-11, 11) == 0


def test_crt_pair_and_centered_lift():
    r = crt_pair(3, 7, 4, 11)
    assert r % 7 == 3 and r % 11 == 4
    assert centered_lift(76, 77) == -1
    assert centered_lift(1, 77) == 1
    assert centered_lift(38, 77) == 38
    assert centered_lift(39, 77) == -38


def test_bernoulli_table():
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(12) == Fraction(-691, 2730)
    assert bernoulli(3) == 0


def test_squarefree_part():
    assert squarefree_part(1) == 1
    assert squarefree_part(12) == 3
    assert squarefree_part(360) == 10


@pytest.mark.parametrize("p", [q for q in primes_upto(1000)
                               if q not in (2, 11) and pow(q % 11, 5, 11) == 1])
def test_cornacchia_exhaustive_vs_naive(p):
    d = cornacchia_4p_11(p)
    # 4p = d^2 + 11 b^2 with d determined up to sign; check against brute force
    assert d is not None
    b2 = (4 * p - d * d) // 11
    assert d * d + 11 * b2 == 4 * p
    assert int(math.isqrt(b2)) ** 2 == b2
    # normalization pins the sign: d = 1 mod 11 would be one convention;
    # the library fixes d = 2 mod 11 signs via the CM character, so just
    # confirm |d| is the unique magnitude
    hits = {dd for dd in range(1, int(math.isqrt(4 * p)) + 1)
            if (4 * p - dd * dd) % 11 == 0
            and int(math.isqrt((4 * p - dd * dd) // 11)) ** 2 == (4 * p - dd * dd) // 11}
    assert abs(d) in hits
