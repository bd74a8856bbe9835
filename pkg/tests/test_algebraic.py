"""Quotient algebra, implicit derivatives and the rational-form calculus."""

from fractions import Fraction as Q
import random

import mpmath
import pytest

from frobcheck.algebraic import (
    QuadraticConstraint,
    QuotientRing,
    RationalForm,
    discriminant_at,
    implicit_dZ,
    quotient_inv,
    quotient_mul,
    quotient_reduce,
    total_derivative,
    z_roots_numeric,
)
from frobcheck.errors import DegeneratePoint, NotInvertible
from frobcheck.frobenius import PointSampler, z_euler_residual
from frobcheck.poly import Poly
from frobcheck.surd import SurdSum, to_mp


def ring(a, b, c):
    return QuotientRing(SurdSum.rational(a), SurdSum.rational(b), SurdSum.rational(c))


@pytest.fixture(scope="module")
def e8_points(e8a1):
    s = PointSampler(e8a1, seed=3)
    out = []
    while len(out) < 3:
        _, pt = s.draw()
        if e8a1.constraint.at(pt).discriminant():
            out.append(pt)
    return out


def numeric_poly(p, pt):
    """p(t) at an mpmath point for a Z-free Poly."""
    total = mpmath.mpf(0)
    for e, c in p.terms.items():
        v = to_mp(c)
        for x, k in zip(pt, e):
            if k:
                v *= x**k
        total += v
    return total


def test_roots_small():
    r = [b.value for b in z_roots_numeric(ring(1, 0, -1), digits=40)]
    assert sorted(r) == [-1, 1]
    r = [b.value for b in z_roots_numeric(ring(1, -3, 2), digits=40)]
    assert sorted(r) == [1, 2]
    with pytest.raises(DegeneratePoint):
        z_roots_numeric(ring(1, 2, 1))


def test_complex_roots():
    roots = z_roots_numeric(ring(1, 0, 1), digits=40)
    assert {complex(b.value) for b in roots} == {1j, -1j}


def test_discriminant_vanishes_at_origin(e8a1):
    assert discriminant_at(e8a1.constraint, [SurdSum()] * 8) == SurdSum()
    pt = [SurdSum.rational(1)] + [SurdSum()] * 7
    d = discriminant_at(e8a1.constraint, pt)
    b0 = e8a1.constraint.B.z_coefficients_at(pt)[0]
    c0 = e8a1.constraint.C.z_coefficients_at(pt)[0]
    with mpmath.workdps(64):
        assert mpmath.almosteq(to_mp(d), to_mp(b0) ** 2 - 4 * to_mp(e8a1.constraint.A) * to_mp(c0), rel_eps=mpmath.mpf(10) ** -60)


def test_fixture_roots_have_small_residual(e8a1, e8_points):
    for pt in e8_points:
        for b in z_roots_numeric(e8a1.constraint, pt, digits=64):
            assert b.residual < mpmath.mpf(10) ** -32


def test_reduction_matches_repeated_substitution():
    r = ring(3, -2, 5)
    z = r.z()
    assert quotient_reduce(r, [0, 0, 1]) == z * z
    assert z * z == r(Q(-5, 3), Q(2, 3))
    # Z^3 by hand: Z*(zb Z + zc) = zb (zb Z + zc) + zc Z
    zb, zc = r.zb, r.zc
    assert quotient_reduce(r, [0, 0, 0, 1]) == r(zb * zc, zb * zb + zc)
    one = r.one()
    assert quotient_mul(one + z, one - z) == one - quotient_reduce(r, [0, 0, 1])


def test_norm_of_w_is_minus_discriminant(e8a1, e8_points):
    for pt in e8_points:
        r = e8a1.constraint.at(pt)
        assert r.W().norm() == -r.discriminant()
    r = ring(1, 2, 1)  # double root
    with pytest.raises(NotInvertible):
        r.W().inverse()


def test_quotient_inverse(e8a1, e8_points):
    rng = random.Random(2)
    r = ring(2, 0, 0)
    assert quotient_inv(r(Q(3))) == r(Q(1, 3))
    for pt in e8_points:
        qr = e8a1.constraint.at(pt)
        for _ in range(5):
            x = qr(SurdSum.from_terms([(rng.choice([1, 2, 13]), rng.randint(1, 9))]), pt[rng.randrange(8)])
            assert x * x.inverse() == qr.one()


def test_implicit_dz_toy():
    # Z^2 - t1 = 0  =>  Z_1 = 1/(2Z)
    n = 2
    q = QuadraticConstraint(SurdSum.rational(1), Poly(n), -Poly.var(n, 0))
    d = implicit_dZ(q, 0)
    assert d.k == 1 and d.num == Poly.constant(n, 1)
    r = q.at([SurdSum.rational(4)])
    assert d.evaluate([SurdSum.rational(4)]) == (r.z() * 2).inverse()


def test_implicit_dz_unity_direction_is_zero(e8a1):
    assert implicit_dZ(e8a1.constraint, e8a1.unity_index).is_zero()


def _branch_z(q, pt_mp):
    A = to_mp(q.A)
    b, c = numeric_poly(q.B, pt_mp), numeric_poly(q.C, pt_mp)
    s = mpmath.sqrt(b * b - 4 * A * c)
    return (-b + s) / (2 * A), (-b - s) / (2 * A)


@pytest.fixture(scope="module")
def rational_point(e8a1):
    s = PointSampler(e8a1, seed=8, sampling="rational")
    while True:
        _, pt = s.draw()
        if e8a1.constraint.at(pt).discriminant():
            return pt


def test_implicit_dz_against_finite_differences(e8a1, rational_point):
    """Five-point central stencil, step 1e-10 at 64 digits, at a small rational point."""
    q = e8a1.constraint
    pt = rational_point
    for i in range(8):
        d = implicit_dZ(q, i).evaluate(pt)
        with mpmath.workdps(64):
            base = [to_mp(x) for x in pt]
            h = mpmath.mpf(10) ** -10
            for sign in (0, 1):
                z0 = _branch_z(q, base)[sign]
                exact = d.at_branch(z0)

                def z_at(s):
                    p = list(base)
                    p[i] += s * h
                    return _branch_z(q, p)[sign]

                fd = (-z_at(2) + 8 * z_at(1) - 8 * z_at(-1) + z_at(-2)) / (12 * h)
                assert abs(fd - exact) <= (abs(exact) if exact else abs(z0)) * mpmath.mpf(10) ** -30


def test_first_derivative_of_f_against_finite_differences(e8a1, e8_points):
    q = e8a1.constraint
    pt = e8_points[1]
    df = total_derivative(RationalForm(e8a1.F, 0, q), 0).evaluate(pt)
    f0, f1 = e8a1.F.split_z()
    with mpmath.workdps(64):
        base = [to_mp(x) for x in pt]
        h = mpmath.mpf(10) ** -10

        def f_at(s, sign):
            p = list(base)
            p[0] += s * h
            z = _branch_z(q, p)[sign]
            return numeric_poly(f0, p) + numeric_poly(f1, p) * z

        for sign in (0, 1):
            exact = df.at_branch(_branch_z(q, base)[sign])
            fd = (-f_at(2, sign) + 8 * f_at(1, sign) - 8 * f_at(-1, sign) + f_at(-2, sign)) / (12 * h)
            assert abs(fd - exact) <= abs(exact) * mpmath.mpf(10) ** -30


def test_total_derivative_of_constraint_vanishes(e8a1):
    q = e8a1.constraint
    f = RationalForm(q.polynomial(), 0, q)
    assert f.is_zero()  # reduced on construction
    # without relying on that reduction: D_i(B Z + C) + D_i(A Z^2) == 0
    z = q.B.zslot
    lin = RationalForm(q.B.mul_var(z) + q.C, 0, q)
    quad = RationalForm(Poly.monomial((0,) * z + (1,), q.A), 0, q)
    for i in range(8):
        d_quad = RationalForm(total_derivative(quad, i).num.mul_var(z).scale(2), 1, q)  # D(A Z^2) = 2 Z D(A Z)
        assert (total_derivative(lin, i) + d_quad).is_zero()


def test_constant_derivative():
    n = 2
    q = QuadraticConstraint(SurdSum.rational(1), Poly(n), -Poly.var(n, 0))
    assert total_derivative(RationalForm(Poly.constant(n, 7), 0, q), 0).is_zero()
    # d/dt1 of 7/W^2 with W = 2Z, Z^2 = t1 is -7/(4 t1^2)
    d = total_derivative(RationalForm(Poly.constant(n, 7), 2, q), 0)
    assert d.k == 4 and d.num == Poly.constant(n, -28)
    assert d.evaluate([SurdSum.rational(4)]) == Q(-7, 64)


def test_total_derivatives_commute_on_f(e8a1):
    q = e8a1.constraint
    f = RationalForm(e8a1.F, 0, q)
    first = [total_derivative(f, i) for i in range(8)]
    for i in range(8):
        for j in range(i + 1, 8):
            assert (total_derivative(first[i], j) - total_derivative(first[j], i)).is_zero(), (i, j)


def test_z_is_homogeneous(e8a1):
    assert z_euler_residual(e8a1).is_zero()


def test_rational_form_matches_branch_substitution(e8a1, e8_points):
    q = e8a1.constraint
    pt = e8_points[2]
    f = total_derivative(total_derivative(RationalForm(e8a1.F, 0, q), 0), 7)
    val = f.evaluate(pt)
    with mpmath.workdps(64):
        base = [to_mp(x) for x in pt]
        for z in _branch_z(q, base):
            w = 2 * to_mp(q.A) * z + numeric_poly(q.B, base)
            n0, n1 = (f.num.split_z() + [Poly(9)])[:2]
            direct = (numeric_poly(n0, base) + numeric_poly(n1, base) * z) / w**f.k
            assert mpmath.almosteq(val.at_branch(z), direct, rel_eps=mpmath.mpf(10) ** -40)
