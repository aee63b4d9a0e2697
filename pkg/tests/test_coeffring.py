"""Coefficient-ring unit tests: worked examples plus randomized ring axioms."""

import random
from fractions import Fraction

import pytest

from msc.coeffring import ENERGY, Poly, base, field, jet, momentum, parse_coord

X1, X2 = Poly.var(base(1)), Poly.var(base(2))
V1 = Poly.var(field(1))
P11 = Poly.var(momentum(1, 1))


def rand_poly(rng, coords, max_degree=2, max_terms=3):
    out = Poly.zero()
    for _ in range(rng.randint(1, max_terms)):
        term = Poly.const(Fraction(rng.choice([-3, -2, -1, 1, 2, 3]),
                                   rng.choice([1, 2])))
        for _ in range(rng.randint(0, max_degree)):
            term = term * Poly.var(rng.choice(coords))
        out = out + term
    return out


COORDS = [base(1), base(2), field(1), momentum(1, 1), momentum(2, 1), ENERGY]


def test_arith_examples():
    assert (X1 + V1) + (X1 - V1) == 2 * X1
    assert V1 * P11 == Poly.var(field(1)) * Poly.var(momentum(1, 1))
    assert (Poly.const(Fraction(1, 2)) * X1 ** 2) * 2 == X1 ** 2


def test_diff_examples():
    assert (V1 * P11).diff(field(1)) == P11
    assert V1.diff(base(1)) == Poly.zero()
    assert (P11 ** 2).diff(momentum(1, 1)) == 2 * P11


def test_subst_examples():
    assert (V1 + X1).subst({field(1): Poly.zero()}) == X1
    assert (P11 ** 2).subst({momentum(1, 1): V1 + 1}) == V1 ** 2 + 2 * V1 + 1
    assert X1.subst({field(1): Poly.const(7)}) == X1


def test_fiber_scale_integrate_examples():
    assert (V1 * P11).fiber_scale_integrate(0) == Fraction(1, 2) * (V1 * P11)
    assert (X1 * V1).fiber_scale_integrate(0) == X1 * V1
    assert Poly.const(5).fiber_scale_integrate(1) == Poly.const(5)


def test_fiber_scale_integrate_rejects_constant_at_shift_zero():
    with pytest.raises(ValueError):
        Poly.const(5).fiber_scale_integrate(0)
    with pytest.raises(ValueError):
        (X1 * Poly.var(ENERGY)).fiber_scale_integrate(0)


def test_ring_axioms_randomized():
    rng = random.Random(101)
    for _ in range(200):
        a = rand_poly(rng, COORDS)
        b = rand_poly(rng, COORDS)
        c = rand_poly(rng, COORDS)
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_partials_commute_randomized():
    rng = random.Random(102)
    for _ in range(200):
        a = rand_poly(rng, COORDS, max_degree=3)
        c1, c2 = rng.choice(COORDS), rng.choice(COORDS)
        assert a.diff(c1).diff(c2) == a.diff(c2).diff(c1)


def test_subst_composes_on_disjoint_supports():
    rng = random.Random(103)
    for _ in range(100):
        a = rand_poly(rng, COORDS, max_degree=2)
        b1 = {field(1): rand_poly(rng, [base(1), base(2)], 1)}
        b2 = {momentum(1, 1): rand_poly(rng, [base(1), ENERGY], 1)}
        combined = dict(b1)
        combined.update(b2)
        assert a.subst(b1).subst(b2) == a.subst(combined)


def test_canonical_printing():
    p = Poly.const(Fraction(1, 2)) * P11 ** 2 - V1 * X2
    assert str(p) == "1/2*p1_1^2 - v1*x2"
    assert str(Poly.zero()) == "0"
    assert str(Poly.const(Fraction(-3, 2))) == "-3/2"
    assert str(Poly.var(jet(1, 2))) == "j1_2"
    assert str(-V1) == "-v1"


def test_coord_name_round_trip():
    for coord in COORDS + [jet(1, 2), jet(2, 1)]:
        from msc.coeffring import coord_name

        assert parse_coord(coord_name(coord)) == coord
