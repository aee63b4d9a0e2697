"""Vertical-calculus unit tests: dv, the vertical Lie derivative, and the
homotopy potential."""

import random
from fractions import Fraction

import pytest

from msc.coeffring import ENERGY, Poly, base, field, momentum
from msc.exterior import (ADAPTED, COORDINATE, GradedForm, MultiVector,
                          change_basis, wedge)
from msc.geometry import BundleShape, SetupDescriptor
from msc.harness import Bounds, rand_form, rand_multivector, rand_poly, rand_setup
from msc.hamiltonian import is_hamiltonian, omega_2n, solve_hmvf
from msc.vertcalc import NotClosed, NotExact, dv, dv_potential, vertical_lie
from msc.harness import rand_hamiltonian

V1 = field(1)
P11 = momentum(1, 1)


def scalar(poly):
    return GradedForm.scalar(poly, ADAPTED)


def test_dv_examples():
    setup = SetupDescriptor(BundleShape(2, 1))
    vp = Poly.var(V1) * Poly.var(P11)
    expected = (Poly.var(P11) * GradedForm.coform(V1)
                + Poly.var(V1) * GradedForm.coform(P11))
    assert dv(scalar(vp), setup) == expected
    assert dv(scalar(Poly.var(base(1))), setup).is_zero


def test_dv_squared_zero_randomized():
    rng = random.Random(41)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(200):
        setup = rand_setup(rng, bounds)
        a = rand_form(rng, setup, bounds,
                      basis=rng.choice([ADAPTED, COORDINATE]))
        assert dv(dv(a, setup), setup).is_zero


def test_dv_antiderivation():
    rng = random.Random(42)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(80):
        setup = rand_setup(rng, bounds)
        a = rand_form(rng, setup, bounds, max_blades=1)
        b = rand_form(rng, setup, bounds)
        deg = a.homogeneous_degree()
        if deg is None:
            continue
        sign = -1 if deg % 2 else 1
        lhs = dv(wedge(a, b), setup)
        rhs = wedge(dv(a, setup), b) + sign * wedge(a, dv(b, setup))
        assert lhs == rhs


def test_dv_never_touches_w():
    rng = random.Random(43)
    bounds = Bounds(base_dim=2, fiber_dim=2)
    for _ in range(80):
        setup = rand_setup(rng, bounds)
        a = rand_form(rng, setup, bounds)
        result = dv(a, setup)
        # no new E^w factors beyond those already in a, and no d/dw applied:
        # differentiating only v/p coefficients means a w-free input stays
        # w-free even in coefficients
        stripped = GradedForm(ADAPTED, {
            blade: coeff for blade, coeff in a.terms.items()
            if all(lbl != ENERGY for lbl in blade)
            and ENERGY not in coeff.variables()})
        out = dv(stripped, setup)
        for blade, coeff in out.terms.items():
            assert all(lbl != ENERGY for lbl in blade)
            assert ENERGY not in coeff.variables()


def test_vertical_lie_examples():
    setup = SetupDescriptor(BundleShape(2, 1))
    # X = e_v1, a = v1: hook(e_v1, Ev1) + dv(0) = 1
    result = vertical_lie(MultiVector.vector(V1), scalar(Poly.var(V1)), setup)
    assert result == scalar(Poly.const(1))
    # closed and hook-free input gives zero
    a = GradedForm.coform(base(1))
    result = vertical_lie(MultiVector.vector(V1), a, setup)
    assert result.is_zero


def test_vertical_lie_rejects_inhomogeneous():
    setup = SetupDescriptor(BundleShape(2, 1))
    x = MultiVector.vector(V1) + MultiVector.blade([V1, P11])
    with pytest.raises(ValueError):
        vertical_lie(x, scalar(Poly.var(V1)), setup)


def test_hamiltonian_fields_preserve_omega():
    rng = random.Random(44)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(40):
        setup = rand_setup(rng, bounds)
        ham = rand_hamiltonian(rng, setup, bounds)
        x = solve_hmvf(ham, setup)
        if x.is_zero:
            continue
        if x.homogeneous_degree() is None:
            continue
        assert vertical_lie(x, omega_2n(setup), setup).is_zero


def test_dv_potential_examples():
    setup = SetupDescriptor(BundleShape(2, 1))
    ev1 = GradedForm.coform(V1)
    assert dv_potential(ev1, setup) == scalar(Poly.var(V1))

    a = Poly.var(P11) * GradedForm.coform(V1) + Poly.var(V1) * GradedForm.coform(P11)
    assert dv_potential(a, setup) == scalar(Poly.var(V1) * Poly.var(P11))

    two = wedge(GradedForm.coform(V1), GradedForm.coform(P11))
    beta = dv_potential(two, setup)
    expected = Fraction(1, 2) * (Poly.var(V1) * GradedForm.coform(P11)
                                 - Poly.var(P11) * GradedForm.coform(V1))
    assert beta == expected
    assert dv(beta, setup) == two


def test_dv_potential_round_trip_randomized():
    rng = random.Random(45)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(120):
        setup = rand_setup(rng, bounds)
        a = dv(rand_form(rng, setup, bounds), setup)
        beta = dv_potential(a, setup)
        assert dv(beta, setup) == a


def test_dv_potential_reproduces_fibre_constant_part():
    rng = random.Random(46)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(60):
        setup = rand_setup(rng, bounds)
        exact = dv(rand_form(rng, setup, bounds), setup)
        xs = [base(i) for i in setup.shape.base_range()]
        blade_labels = rng.sample(xs, rng.randint(0, len(xs)))
        remainder = GradedForm.blade(
            blade_labels, rand_poly(rng, xs + [ENERGY], 2, 2), ADAPTED)
        closed = exact + remainder
        assert dv(closed, setup).is_zero
        beta = dv_potential(closed, setup)
        assert closed - dv(beta, setup) == closed - exact


def test_dv_potential_rejects_non_closed():
    setup = SetupDescriptor(BundleShape(2, 1))
    with pytest.raises(NotClosed):
        dv_potential(scalar(Poly.var(V1)), setup)
