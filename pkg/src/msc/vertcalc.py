"""Vertical exterior derivative, vertical Lie derivative and the homotopy
potential.

In the adapted basis the covariant derivative along fibre directions kills
every adapted coframe element, so the vertical exterior derivative collapses
to plain fibre-coordinate partials of the blade coefficients:

    dv(a) = sum_M  E^M  ^  (d a_blade / d M) * blade

with M running over the field and momentum labels only.  The energy
coordinate w is excluded from vertical differentiation and never produces an
E^w factor; it rides along as a spectator parameter, as do the base
coordinates.

The potential of a dv-closed form is the fibrewise radial homotopy: contract
with the fibre Euler vector, scale the fibre coordinates by t and integrate
t over [0,1] monomial-wise.  The part of a closed form whose blades carry no
field/momentum label cannot be dv of anything; closedness forces it to be
fibre-constant, and it is excluded from the potential (the caller recovers
it as a - dv(potential)).
"""

from __future__ import annotations

from .coeffring import Poly, coord_key
from .exterior import (ADAPTED, GradedForm, MultiVector, GradedForm as _GF,
                       change_basis, hook, wedge)


class NotClosed(ValueError):
    """dv_potential was asked for a potential of a non-closed form."""


class NotExact(ValueError):
    """The fibre-degree-0 part of the input depends on fibre coordinates."""


def _fiber_labels_of(coeff: Poly) -> list:
    return sorted((c for c in coeff.variables() if c[0] in ("v", "p")),
                  key=coord_key)


def dv(a: GradedForm, setup) -> GradedForm:
    """Vertical exterior derivative; raises vertical bidegree by one."""
    if a.basis != ADAPTED:
        a = change_basis(a, ADAPTED, setup)
    out = GradedForm.zero(ADAPTED)
    for blade, coeff in a.terms.items():
        for label in _fiber_labels_of(coeff):
            partial = coeff.diff(label)
            out = out + wedge(GradedForm.coform(label, ADAPTED),
                              GradedForm(ADAPTED, {blade: partial}))
    return out


def vertical_lie(x: MultiVector, a: GradedForm, setup) -> GradedForm:
    """Graded vertical Lie derivative along a homogeneous r-vector field:
    L_X a = X _| dv(a) + (-1)^(r+1) dv(X _| a)."""
    r = x.homogeneous_degree()
    if r is None:
        raise ValueError("vertical_lie needs a homogeneous multivector field")
    if a.basis != ADAPTED:
        a = change_basis(a, ADAPTED, setup)
    first = hook(x, dv(a, setup))
    second = dv(hook(x, a), setup)
    sign = 1 if (r + 1) % 2 == 0 else -1
    return first + sign * second


def _fiber_blade_degree(blade) -> int:
    return sum(1 for lbl in blade if lbl[0] in ("v", "p"))


def dv_potential(a: GradedForm, setup) -> GradedForm:
    """A form beta with dv(beta) = a minus the fibre-constant remainder.

    The input must be dv-closed.  Blades with k >= 1 field/momentum labels
    are inverted sector by sector through the radial homotopy; the k = 0
    sector (horizontal blades, possibly with an E^w factor) is reproduced
    exactly by ``a - dv(dv_potential(a))`` and is excluded from the
    potential.  For inputs in the image of dv the round trip is exact:
    dv(dv_potential(a)) = a.
    """
    if a.basis != ADAPTED:
        a = change_basis(a, ADAPTED, setup)
    if not dv(a, setup).is_zero:
        raise NotClosed("dv_potential needs a dv-closed form")

    euler = setup.fiber_euler_vector()
    sectors: dict = {}
    for blade, coeff in a.terms.items():
        k = _fiber_blade_degree(blade)
        sectors.setdefault(k, {})[blade] = coeff

    degree_zero = sectors.pop(0, None)
    if degree_zero is not None:
        for blade, coeff in degree_zero.items():
            if _fiber_labels_of(coeff):
                raise NotExact(
                    "fibre-dependent coefficient on a fibre-degree-0 blade")

    beta = GradedForm.zero(ADAPTED)
    for k, terms in sectors.items():
        contracted = hook(euler, GradedForm(ADAPTED, terms))
        scaled = {blade: coeff.fiber_scale_integrate(k - 1)
                  for blade, coeff in contracted.terms.items()}
        beta = beta + GradedForm(ADAPTED, scaled)
    return beta
