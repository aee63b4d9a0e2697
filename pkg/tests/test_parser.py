"""Document and expression parsing tests, including print/parse round trips."""

import random

import pytest

from msc.coeffring import ENERGY, Poly, base, field, momentum
from msc.exterior import ADAPTED, COORDINATE, GradedForm, MultiVector, wedge
from msc.harness import Bounds, rand_form, rand_multivector, rand_poly, rand_setup
from msc.parser import (AsymmetricLambdaError, DocumentError, EvalContext,
                        IndexOutOfBoundsError, ParseError, UnknownNameError,
                        eval_expression, parse_document, render_document)

MINIMAL = """
[setup]
base_dim = 1
fiber_dim = 1
"""

SCALAR_FIELD = """
[setup]
base_dim = 2
fiber_dim = 1

[forms]
Pi  = "p1_1*hook(e_x1, vol) + p2_1*hook(e_x2, vol)"
Phi = "v1"
one = "1"
"""


def test_minimal_document():
    doc = parse_document(MINIMAL)
    assert doc.setup.base_dim == 1
    assert doc.setup.fiber_dim == 1
    assert doc.setup.conn.is_flat
    assert doc.named_forms == {}


def test_scalar_field_document():
    doc = parse_document(SCALAR_FIELD)
    assert set(doc.named_forms) == {"Pi", "Phi", "one"}
    pi = doc.named_forms["Pi"]
    assert isinstance(pi, GradedForm)
    assert pi.homogeneous_degree() == 1
    assert doc.named_forms["Phi"] == Poly.var(field(1))


def test_connection_sections():
    text = """
[setup]
base_dim = 2
fiber_dim = 1

[connection.gamma]
1,1,1 = "x1 + 1"

[connection.lambda]
1,1,2 = "x2"
"""
    doc = parse_document(text)
    assert doc.setup.conn.gamma_at(1, 1, 1) == Poly.var(base(1)) + 1
    assert doc.setup.conn.lambda_at(1, 1, 2) == Poly.var(base(2))
    assert doc.setup.conn.lambda_at(1, 2, 1) == Poly.var(base(2))


def test_lambda_lower_triangle_rejected():
    text = MINIMAL + "\n[connection.lambda]\n1,1,1 = \"x1\"\n"
    parse_document(text)  # diagonal is fine
    bad = """
[setup]
base_dim = 2
fiber_dim = 1

[connection.lambda]
1,2,1 = "x1"
"""
    with pytest.raises(AsymmetricLambdaError):
        parse_document(bad)


def test_error_positions():
    bad = """
[setup]
base_dim = 2
fiber_dim = 1

[forms]
f = "v1 + + "
"""
    with pytest.raises(ParseError) as err:
        parse_document(bad)
    assert err.value.line == 7

    with pytest.raises(IndexOutOfBoundsError):
        parse_document(MINIMAL + "\n[forms]\nf = \"v2\"\n")

    with pytest.raises(UnknownNameError):
        parse_document(MINIMAL + "\n[forms]\nf = \"mystery + 1\"\n")

    with pytest.raises(ParseError):
        parse_document(MINIMAL + "\nstray = 1\n")


def test_lagrangian_and_sections():
    text = """
[setup]
base_dim = 2
fiber_dim = 1

[lagrangian]
L = "1/2*j1_1^2 + 1/2*j1_2^2"

[section.sol]
v1 = "x1 + 2*x2"
p1_1 = "1"
p2_1 = "2"
"""
    doc = parse_document(text)
    assert doc.lagrangian is not None
    assert doc.sections["sol"].fields[1] == Poly.var(base(1)) + 2 * Poly.var(base(2))
    assert doc.sections["sol"].momenta[(2, 1)] == Poly.const(2)


def test_lagrangian_rejects_momenta():
    text = MINIMAL + "\n[lagrangian]\nL = \"p1_1^2\"\n"
    with pytest.raises(ParseError):
        parse_document(text)


def test_expression_semantics():
    doc = parse_document(SCALAR_FIELD)
    ctx = EvalContext(doc.setup, doc.named_forms)
    assert eval_expression("Phi^2 - v1*v1", ctx) == Poly.zero()
    assert eval_expression("wedge(Ev1, Ep1_1)", ctx) == wedge(
        GradedForm.coform(field(1)), GradedForm.coform(momentum(1, 1)))
    from fractions import Fraction

    assert eval_expression("hook(e_x1, vol)", ctx) == GradedForm.coform(base(2))
    assert eval_expression("3/2", ctx) == Poly.const(Fraction(3, 2))
    with pytest.raises(ParseError):
        eval_expression("Ev1 * Ep1_1", ctx)  # products of forms need wedge
    with pytest.raises(ParseError):
        eval_expression("v1 / x1", ctx)


def test_print_parse_round_trip_polys():
    rng = random.Random(71)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(120):
        setup = rand_setup(rng, bounds)
        coords = ([base(i) for i in setup.shape.base_range()]
                  + [field(a) for a in setup.shape.fiber_range()]
                  + [momentum(i, a) for i in setup.shape.base_range()
                     for a in setup.shape.fiber_range()] + [ENERGY])
        p = rand_poly(rng, coords, 3, 4)
        ctx = EvalContext(setup, {})
        assert eval_expression(str(p), ctx) == p


def test_print_parse_round_trip_forms():
    rng = random.Random(72)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(120):
        setup = rand_setup(rng, bounds)
        a = rand_form(rng, setup, bounds, max_blades=4)
        ctx = EvalContext(setup, {})
        value = eval_expression(str(a), ctx)
        if isinstance(value, Poly):
            value = GradedForm.scalar(value, a.basis)
        if a.is_zero:
            assert value.is_zero
        else:
            assert GradedForm(a.basis, value.terms) == a


def test_print_parse_round_trip_vectors():
    rng = random.Random(73)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(80):
        setup = rand_setup(rng, bounds)
        x = rand_multivector(rng, setup, bounds, rng.randint(1, 3))
        ctx = EvalContext(setup, {})
        value = eval_expression(str(x), ctx)
        if isinstance(value, Poly):
            assert x.is_zero and value.is_zero
        else:
            assert value == x


def test_render_document_round_trip():
    rng = random.Random(74)
    bounds = Bounds(base_dim=3, fiber_dim=2)
    for _ in range(40):
        setup = rand_setup(rng, bounds)
        a = rand_form(rng, setup, bounds)
        text = render_document(setup, {"a": str(a)}, header="round trip")
        doc = parse_document(text)
        assert doc.setup.base_dim == setup.base_dim
        assert doc.setup.conn.gamma == setup.conn.gamma
        assert doc.setup.conn.lam == setup.conn.lam
        again = doc.named_forms["a"]
        if isinstance(again, Poly):
            again = GradedForm.scalar(again, a.basis)
        if a.is_zero:
            assert again.is_zero
        else:
            assert GradedForm(a.basis, again.terms) == a
