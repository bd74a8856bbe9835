from fractions import Fraction as Q
import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from frobcheck.factor import factorize, is_probable_prime, pollard_brent, squarefree_part
from frobcheck.surd import MIN_DIGITS, SurdSum, format_surd, normalize_sqrt_rational, to_float

RADICANDS = [1, 2, 3, 5, 6, 7, 10, 11, 13, 15, 30, 105]


def surd_sums(max_terms=4):
    coeff = st.fractions(max_denominator=10**6).filter(lambda q: abs(q.numerator) < 2**64)
    return st.dictionaries(st.sampled_from(RADICANDS), coeff, max_size=max_terms).map(
        lambda d: SurdSum.from_terms(d.items())
    )


def test_sqrt_of_square_is_rational():
    assert SurdSum.sqrt(12) == SurdSum({3: Q(2)})
    assert SurdSum.sqrt(49) == SurdSum.rational(7)


def test_product_of_square_roots():
    assert SurdSum.sqrt(2) * SurdSum.sqrt(3) == SurdSum.sqrt(6)
    assert SurdSum.sqrt(6) * SurdSum.sqrt(10) == SurdSum({15: Q(2)})


def test_cancellation_gives_canonical_zero():
    x = SurdSum.from_terms([(1, 1), (2, 1)])
    assert x - x == SurdSum()
    assert not (x - x)
    assert (SurdSum.sqrt(2) + SurdSum.rational(1)) + (SurdSum.rational(1) - SurdSum.sqrt(2)) == 2


def test_normalize_sqrt_rational():
    # sqrt(2/134589) = sqrt(269178)/134589
    assert normalize_sqrt_rational(2, 134589) == SurdSum({269178: Q(1, 134589)})
    assert normalize_sqrt_rational(8) == SurdSum({2: Q(2)})
    assert normalize_sqrt_rational(1, 4) == SurdSum.rational(Q(1, 2))


def test_inverse_of_nested_multiquadratic():
    x = SurdSum.from_terms([(1, 1), (2, 1), (3, 1), (6, 1)])
    assert x * x.inverse() == 1
    with pytest.raises(ZeroDivisionError):
        SurdSum().inverse()


@settings(max_examples=150, deadline=None)
@given(surd_sums(), surd_sums(), surd_sums())
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@settings(max_examples=150, deadline=None)
@given(surd_sums())
def test_inverse_round_trip(x):
    if x:
        assert x.inverse() * x == SurdSum.rational(1)


@settings(max_examples=80, deadline=None)
@given(surd_sums(3), surd_sums(3))
def test_ordering_matches_float(x, y):
    if x == y:
        return
    fx, fy = to_float(x, 64), to_float(y, 64)
    assert (x < y) == (fx.value < fy.value)


def test_sign_of_near_cancellation():
    # 99/70 is a convergent of sqrt(2): the difference is about 7e-5
    x = SurdSum.sqrt(2) - SurdSum.rational(Q(99, 70))
    assert x.sign() == -1
    # 1+sqrt(2) squared minus (3 + 2 sqrt 2) is exactly zero, no numeric test involved
    y = (SurdSum.rational(1) + SurdSum.sqrt(2)) ** 2 - SurdSum.from_terms([(1, 3), (2, 2)])
    assert y.sign() == 0


def test_to_float_error_bound():
    x = SurdSum.from_terms([(2, Q(1, 3)), (5, -7)])
    b = to_float(x, 64)
    with mpmath.workdps(120):
        exact = mpmath.sqrt(2) / 3 - 7 * mpmath.sqrt(5)
        assert abs(b.value - exact) <= b.err
    with pytest.raises(ValueError):
        to_float(x, MIN_DIGITS - 1)


def test_format_matches_grammar():
    assert format_surd(SurdSum.from_terms([(1, Q(1, 2)), (6, -3)])) == "1/2 - 3*sqrt(6)"
    assert format_surd(SurdSum()) == "0"


def test_squarefree_part_against_trial_division():
    rng = random.Random(7)

    def oracle(n):
        s, f, p = 1, 1, 2
        while p * p <= n:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            f *= p ** (e // 2)
            s *= p ** (e % 2)
            p += 1
        return s * n, f

    for n in list(range(1, 2000)) + [rng.randrange(1, 10**6) for _ in range(300)]:
        assert squarefree_part(n) == oracle(n)


def test_squarefree_part_large():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randrange(1, 10**9)
        s, f = squarefree_part(n)
        assert f * f * s == n
        assert all(e == 1 for e in factorize(s).values())


def test_factorize_beyond_trial_limit():
    p, q = 1000003, 999999937
    assert factorize(p * q) == {p: 1, q: 1}
    assert factorize(p**2 * 12) == {2: 2, 3: 1, p: 2}
    assert is_probable_prime(q)
    assert pollard_brent(p * q) in (p, q)
