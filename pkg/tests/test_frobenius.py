from fractions import Fraction as Q
from itertools import product
import random

import mpmath
import pytest

from frobcheck import frobenius as fr
from frobcheck.errors import MetricDegenerate
from frobcheck.potential import parse_potential, serialize_potential
from frobcheck.surd import SurdSum

from symbolic import distinct_orderings, ordered_third_derivatives, permutation_defects

PAIRING = {(0, 6), (1, 4), (2, 3), (5, 7)}


def points(bundle, n, seed=1):
    s = fr.PointSampler(bundle, seed)
    out = []
    while len(out) < n:
        _, pt = s.draw()
        try:
            out.append((pt, fr.third_derivatives(bundle, pt)))
        except fr.DegeneratePoint:
            pass
    return out


@pytest.fixture(scope="module")
def e8_tables(e8a1):
    return points(e8a1, 3)


def test_unity_direction_values(e8_tables):
    for _, tab in e8_tables:
        assert tab(0, 6, 6) == 1
        assert not tab(6, 6, 6)
        assert tab(2, 3, 6) == tab(3, 2, 6) == tab(6, 3, 2) == 1


def test_table_shape(e8_tables):
    _, tab = e8_tables[0]
    assert len(tab) == 120
    assert tab(1, 2, 3) is tab(3, 1, 2)


def test_metric_is_the_pairing(e8a1, e8_tables):
    mets = [fr.metric(e8a1, table=tab) for _, tab in e8_tables]
    support = {(i, j) for i, j in mets[0].nonzero() if i <= j}
    assert support == PAIRING
    for m in mets:
        assert m.eta == mets[0].eta
        assert m.inverse == m.eta  # an involutive permutation matrix
        assert all(m.eta[i][j] == 1 for i, j in PAIRING)
    ws = e8a1.weights
    for i, j in support:
        assert ws.weights[i] + ws.weights[j] == Q(13, 12) == 2 - ws.charge


def test_metric_inverse_small():
    one, zero = SurdSum.rational(1), SurdSum()
    ident = [[one if i == j else zero for j in range(3)] for i in range(3)]
    assert fr.metric_inverse(ident) == ident
    d = [row[:] for row in ident]
    d[0][0] = SurdSum.sqrt(2)
    inv = fr.metric_inverse(d)
    assert inv[0][0] == SurdSum({2: Q(1, 2)})
    with pytest.raises(MetricDegenerate):
        fr.metric_inverse([[one, one], [one, one]])


def test_permutation_symmetry_symbolic(e8a1, e8_tables):
    """All orderings of D_i D_j D_k F agree exactly, and agree with the jet values at 3 points."""
    assert permutation_defects() == []
    d = ordered_third_derivatives()
    for pt, tab in e8_tables:
        ring = e8a1.constraint.at(pt)
        for i, j, k in [(0, 0, 0), (0, 1, 7), (2, 3, 5), (7, 7, 4), (1, 1, 2)]:
            for key in distinct_orderings(i, j, k):
                assert d[key].evaluate(pt, ring) == tab(i, j, k)


def test_jets_match_symbolic_on_every_triple(e8a1, e8_tables):
    d = ordered_third_derivatives()
    pt, tab = e8_tables[0]
    ring = e8a1.constraint.at(pt)
    for (key, value) in tab.items():
        assert d[key].evaluate(pt, ring) == value, key


def test_orbits_cover_all_tuples():
    reps, images = fr.wdvv_orbits(8)
    assert len(images) == 8**4
    assert len(reps) == 406
    for t, (rep, sign) in images.items():
        if t[0] == t[3]:
            assert rep is None


def test_orbit_signs_match_a_broken_potential(a3):
    """On a potential that violates WDVV, every tuple's residual is sign times its representative's."""
    text = serialize_potential(a3).replace("1/60 * t3^5", "1/7 * t3^5")
    bad = parse_potential(text)
    pt = [SurdSum.rational(x) for x in (Q(2), Q(-1, 3), Q(5, 2))]
    tab = fr.third_derivatives(bad, pt)
    met = fr.metric(bad, table=tab)
    reps, images = fr.wdvv_orbits(3)
    res = {t: fr.wdvv_residual(bad, pt, *t, table=tab, met=met) for t in product(range(3), repeat=4)}
    assert any(res.values())
    for t, (rep, sign) in images.items():
        assert res[t] == (SurdSum() if rep is None else res[rep].scale(sign))


def test_residual_examples(e8a1, e8_tables):
    pt, tab = e8_tables[1]
    met = fr.metric(e8a1, table=tab)
    rng = random.Random(4)
    for _ in range(10):
        i, j, q = (rng.randrange(8) for _ in range(3))
        assert fr.wdvv_residual(e8a1, pt, i, j, q, i, table=tab, met=met).is_zero()
        assert fr.wdvv_residual(e8a1, pt, 6, i, j, q, table=tab, met=met).is_zero()
        assert fr.wdvv_residual(e8a1, pt, i, j, q, rng.randrange(8), table=tab, met=met).is_zero()


def test_full_contraction_vanishes(e8a1, e8_tables):
    for _, tab in e8_tables[:2]:
        met = fr.metric(e8a1, table=tab)
        w = fr.WDVVContraction(tab, met.inverse, tab.ring(0))
        assert not any(w.residual(*t) for t in product(range(8), repeat=4))


def test_unity_check(e8a1, e8_tables, a3):
    _, tab = e8_tables[0]
    assert fr.unity_check(e8a1, table=tab) == (True, [])
    assert fr.unity_check(a3, [SurdSum.rational(x) for x in (1, 2, 3)]) == (True, [])
    # against a metric that is not the one read off the table
    met = fr.metric(e8a1, table=tab)
    eta = [row[:] for row in met.eta]
    eta[2][3] = eta[3][2] = SurdSum.rational(2)
    ok, witnesses = fr.unity_check(e8a1, table=tab, met=fr.metric_from_matrix(eta))
    assert not ok
    assert (2, 2) in witnesses and (3, 3) in witnesses


def test_perturbed_unity_term_fails_verification(e8a1):
    text = serialize_potential(e8a1).replace("1 * t3 * t4 * t7", "2 * t3 * t4 * t7")
    assert text != serialize_potential(e8a1)
    rep = fr.verify(parse_potential(text), n_points=1, seed=1)
    assert not rep.passed
    assert rep.failures()


def test_euler_residual(e8a1, a3):
    r = fr.euler_residual(e8a1)
    assert r.ok and r.operator_zero
    assert r.offenders == {"F": [], "B": [], "C": []}
    assert fr.euler_residual(a3).ok
    text = serialize_potential(e8a1).replace("* t1^21 * t2\n", "* t1^21 * t3\n", 1)
    r = fr.euler_residual(parse_potential(text))
    assert r.offenders["F"] == [(21, 0, 1, 0, 0, 0, 0, 0, 0)]
    assert not r.operator_zero


def test_exact_values_match_branch_recomputation(e8a1, e8_tables):
    pt, tab = e8_tables[2]
    digits = 64
    for _, z in fr.branch_values(e8a1, pt, digits):
        exact = fr.exact_to_branch(tab, z, digits)
        numeric = fr.numeric_third_derivatives(e8a1, pt, z, digits)
        with mpmath.workdps(digits):
            scale = max(abs(v) for v in numeric.values())
            for k, v in numeric.items():
                assert abs(exact[k] - v) <= scale * mpmath.mpf(10) ** -(digits - 8), k


def test_verify_small_fixtures(a3, cubic):
    for b in (a3, cubic):
        rep = fr.verify(b, n_points=3, seed=2)
        assert rep.passed
        assert all("discriminant" not in p for p in rep.points)


def test_verify_is_deterministic(e8a1):
    a = fr.verify(e8a1, n_points=2, seed=9).to_json()
    b = fr.verify(e8a1, n_points=2, seed=9, jobs=2).to_json()
    assert a == b
    assert fr.verify(e8a1, n_points=2, seed=10).to_json() != a


def test_numeric_mode_small_digits(e8a1):
    rep = fr.verify(e8a1, n_points=1, seed=1, mode="numeric", digits=64)
    assert rep.passed
    assert len(rep.points[0]["branches"]) == 2


def test_rational_sampler_draws_from_spec_range(a3):
    s = fr.PointSampler(a3, 5, sampling="rational")
    for _ in range(50):
        qs, pt = s.draw()
        for q in qs:
            assert q.denominator in (1, 2, 3) and 0 < abs(q.numerator) <= 9
        assert pt == [SurdSum.rational(q) for q in qs]
