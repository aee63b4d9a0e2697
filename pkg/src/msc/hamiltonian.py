"""Hamiltonian forms, their multivector fields, the graded Poisson bracket
and the bullet product.

A horizontal (n+1-r)-form is stored through its fully antisymmetric
coefficient array F^{j1...jr}:

    F = sum over increasing J of  F^J * ham_blade(J),

where ham_blade(J) is the volume form with the frame vectors e_{j1}, ...,
e_{jr} inserted in that order (first index into the first argument slot).
Admissibility of F is exactly solvability of

    X _| Omega^(2,n) = dv F

for an r-vector field X; the recognizer checks the per-monomial conditions
(momentum upper indices inside J, each momentum at most to the first power,
no repeated upper index in one monomial) and then the cross-index
consistency that makes the field components of X well defined.  The solver
returns the canonical representative with every multi-vertical component set
to zero and verifies the defining equation exactly.

The sign conventions of the exterior module are calibrated so that the
scalar-field bracket gives {Pi, Phi} = +1; every other sign follows
mechanically.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .coeffring import Poly, base, field, momentum
from .exterior import (ADAPTED, COORDINATE, GradedForm, MultiVector,
                       change_basis, hook, wedge, _hook_label)
from .geometry import SetupDescriptor, volume_form
from .vertcalc import dv


class NotHamiltonian(ValueError):
    """Rejection by the Hamiltonian-form recognizer, with the violated
    condition and the offending index or monomial."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}{': ' + detail if detail else ''}")


class InternalInconsistency(RuntimeError):
    """The solver's defining-equation verification failed (unreachable for
    inputs accepted by is_hamiltonian)."""


def ham_blade_table(setup: SetupDescriptor) -> dict:
    """For every increasing index tuple J: (sign, horizontal blade) with
    ham_blade(J) = sign * blade.  Cached on the setup."""
    cached = setup._cache.get("ham_blades")
    if cached is not None:
        return cached
    n1 = setup.base_dim
    vol = volume_form(setup, ADAPTED)
    table = {}
    for r in range(0, n1 + 1):
        for j_tuple in itertools.combinations(range(1, n1 + 1), r):
            form = vol
            for j in j_tuple:
                form = _hook_label(base(j), form)
            (blade, coeff), = form.terms.items()
            table[j_tuple] = (int(coeff.as_fraction()), blade)
    setup._cache["ham_blades"] = table
    return table


def ham_blade(setup: SetupDescriptor, j_tuple: tuple) -> GradedForm:
    """The horizontal blade (e_{j1...jr} hooked into the lifted volume)."""
    sign, blade = ham_blade_table(setup)[tuple(j_tuple)]
    return GradedForm(ADAPTED, {blade: Poly.const(sign)})


def omega_2n(setup: SetupDescriptor) -> GradedForm:
    return setup.forms().omega_2n


def _perm_sign(tup: tuple) -> tuple[int, tuple]:
    """(sign, sorted tuple) of an index tuple; sign 0 on repeats."""
    sign = 1
    out: list = []
    for x in tup:
        pos = len(out)
        while pos > 0 and out[pos - 1] > x:
            pos -= 1
        if pos > 0 and out[pos - 1] == x:
            return 0, ()
        if (len(out) - pos) % 2 == 1:
            sign = -sign
        out.insert(pos, x)
    return sign, tuple(out)


class HamiltonianForm:
    """A validated horizontal form with its antisymmetric coefficient array.

    ``coeffs`` maps increasing r-tuples to Poly entries; ``array`` returns
    the signed entry for an arbitrary index order.
    """

    __slots__ = ("setup", "r", "coeffs", "underlying")

    def __init__(self, setup: SetupDescriptor, r: int, coeffs: dict,
                 underlying: GradedForm):
        self.setup = setup
        self.r = r
        self.coeffs = {key: val for key, val in coeffs.items() if not val.is_zero}
        self.underlying = underlying

    @property
    def degree(self) -> int:
        return self.setup.base_dim - self.r

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def array(self, j_tuple: tuple) -> Poly:
        sign, sorted_j = _perm_sign(tuple(j_tuple))
        if sign == 0:
            return Poly.zero()
        entry = self.coeffs.get(sorted_j)
        if entry is None:
            return Poly.zero()
        return sign * entry

    def __eq__(self, other) -> bool:
        if not isinstance(other, HamiltonianForm):
            return NotImplemented
        return self.underlying == other.underlying

    __hash__ = None

    def __str__(self) -> str:
        return str(self.underlying)

    def __repr__(self) -> str:
        return f"HamiltonianForm(degree={self.degree}, {self})"

    def momentum_decomposition(self) -> dict:
        """Display decomposition by momentum degree k: the part of each array
        entry whose monomials carry exactly k momentum factors."""
        out: dict = {}
        for j_tuple, poly in self.coeffs.items():
            for mono, coeff in poly.terms.items():
                k = sum(e for c, e in mono if c[0] == "p")
                bucket = out.setdefault(k, {})
                part = bucket.get(j_tuple, Poly.zero())
                bucket[j_tuple] = part + Poly({mono: coeff})
        return out


def from_array(setup: SetupDescriptor, r: int, coeffs: dict) -> HamiltonianForm:
    """Build and validate a Hamiltonian form from array data on increasing
    index tuples."""
    form = GradedForm.zero(ADAPTED)
    for j_tuple, poly in coeffs.items():
        form = form + poly * ham_blade(setup, j_tuple)
    return is_hamiltonian(form, setup)


def _extract_array(a: GradedForm, setup: SetupDescriptor, r: int) -> dict:
    table = ham_blade_table(setup)
    by_blade = {blade: (j_tuple, sign)
                for j_tuple, (sign, blade) in table.items()
                if len(j_tuple) == r}
    coeffs = {}
    for blade, coeff in a.terms.items():
        j_tuple, sign = by_blade[blade]
        coeffs[j_tuple] = sign * coeff
    return coeffs


def is_hamiltonian(a, setup: SetupDescriptor) -> HamiltonianForm:
    """Validate a horizontal form against the admissibility conditions and
    return it with its coefficient array; raises NotHamiltonian otherwise."""
    if isinstance(a, Poly):
        a = GradedForm.scalar(a, ADAPTED)
    if isinstance(a, HamiltonianForm):
        return a
    if a.basis != ADAPTED:
        a = change_basis(a, ADAPTED, setup)

    n1 = setup.base_dim
    if a.is_zero:
        return HamiltonianForm(setup, n1, {}, a)

    degree = a.homogeneous_degree()
    if degree is None:
        raise NotHamiltonian("not homogeneous",
                             f"degrees {a.degrees()} mixed")
    if not a.is_horizontal():
        raise NotHamiltonian("not horizontal",
                             "a blade carries a vertical label")
    for blade, coeff in a.terms.items():
        for coord in coeff.variables():
            if coord[0] == "w":
                raise NotHamiltonian("depends on the energy coordinate w")
            if coord[0] == "j":
                raise NotHamiltonian("depends on a jet velocity")

    r = n1 - degree
    coeffs = _extract_array(a, setup, r)

    if r == 0:
        for coeff in coeffs.values():
            bad = [c for c in coeff.variables() if c[0] in ("v", "p")]
            if bad:
                raise NotHamiltonian(
                    "top-degree form must be fibre-constant",
                    f"depends on {bad[0]}")
        return HamiltonianForm(setup, r, coeffs, a)

    if r == n1:
        return HamiltonianForm(setup, r, coeffs, a)

    for j_tuple, poly in coeffs.items():
        j_set = set(j_tuple)
        for mono in poly.terms:
            uppers = []
            for coord, exp in mono:
                if coord[0] != "p":
                    continue
                if exp >= 2:
                    raise NotHamiltonian(
                        f"momentum power {exp}",
                        f"{Poly({mono: poly.terms[mono]})} in F{list(j_tuple)}")
                if coord[1] not in j_set:
                    raise NotHamiltonian(
                        "momentum with upper index outside the blade indices",
                        f"k={coord[1]} not in {list(j_tuple)}")
                uppers.append(coord[1])
            if len(uppers) != len(set(uppers)):
                raise NotHamiltonian(
                    "two momentum factors share an upper index",
                    f"{Poly({mono: poly.terms[mono]})} in F{list(j_tuple)}")

    ham = HamiltonianForm(setup, r, coeffs, a)
    _field_components(ham, check=True)
    return ham


def _field_components(ham: HamiltonianForm, check: bool = False) -> dict:
    """The (B, K) -> Poly table of field-vector components of the canonical
    multivector; with ``check`` the cross-index consistency is verified."""
    setup, r = ham.setup, ham.r
    n1, nf = setup.base_dim, setup.fiber_dim
    sgn = -1 if ((r - 1) + r * (r - 1) // 2) % 2 else 1
    kappa_field = -sgn
    out = {}
    for k_tuple in itertools.combinations(range(1, n1 + 1), r - 1):
        candidates = [l for l in range(1, n1 + 1) if l not in k_tuple]
        for b in range(1, nf + 1):
            first = ham.array(k_tuple + (candidates[0],)).diff(
                momentum(candidates[0], b))
            if check:
                for l in candidates[1:]:
                    other = ham.array(k_tuple + (l,)).diff(momentum(l, b))
                    if other != first:
                        raise NotHamiltonian(
                            "inconsistent momentum dependence across indices",
                            f"dF/dp at l={candidates[0]} and l={l} differ "
                            f"for B={b}, K={list(k_tuple)}")
            value = kappa_field * first
            if not value.is_zero:
                out[(b, k_tuple)] = value
    return out


def solve_hmvf(ham: HamiltonianForm, setup: SetupDescriptor) -> MultiVector:
    """The canonical Hamiltonian r-vector field of a validated form.

    Momentum components are read off as derivatives of the array by the
    field coordinates, field components from the consistency table; every
    component with two or more vertical factors is zero.  The defining
    equation hook(X, Omega^(2,n)) = dv(F) is verified exactly.
    """
    r = ham.r
    n1, nf = setup.base_dim, setup.fiber_dim
    if r == 0:
        x = MultiVector.zero()
    else:
        sgn = -1 if ((r - 1) + r * (r - 1) // 2) % 2 else 1
        kappa_mom = Fraction(sgn, r)
        terms = MultiVector.zero()
        for k_tuple in itertools.combinations(range(1, n1 + 1), r - 1):
            k_labels = [base(k) for k in k_tuple]
            for i in range(1, n1 + 1):
                if i in k_tuple:
                    continue
                for a in range(1, nf + 1):
                    coeff = kappa_mom * ham.array(k_tuple + (i,)).diff(field(a))
                    if not coeff.is_zero:
                        terms = terms + MultiVector.blade(
                            k_labels + [momentum(i, a)], coeff)
        for (b, k_tuple), coeff in _field_components(ham).items():
            terms = terms + MultiVector.blade(
                [base(k) for k in k_tuple] + [field(b)], coeff)
        x = terms

    if hook(x, omega_2n(setup)) != dv(ham.underlying, setup):
        raise InternalInconsistency(
            "hook(X, omega) != dv(F) for a recognized Hamiltonian form")
    return x


def poisson_bracket(f: HamiltonianForm, g: HamiltonianForm,
                    setup: SetupDescriptor) -> HamiltonianForm:
    """{F, G} = (-1)^(n+1-r) X_F _| X_G _| Omega^(2,n), r = deg F.

    The result degree is deg F + deg G - n; the hook underflows to the zero
    form when that is negative.  The output is revalidated, which is the
    closure lemma in executable form.
    """
    x_f = solve_hmvf(f, setup)
    x_g = solve_hmvf(g, setup)
    inner = hook(x_g, omega_2n(setup))
    result = hook(x_f, inner)
    if (setup.base_dim - f.degree) % 2:
        result = -result
    if result.is_zero:
        nominal = max(f.degree + g.degree - (setup.base_dim - 1), 0)
        return HamiltonianForm(setup, setup.base_dim - nominal, {}, result)
    return is_hamiltonian(result, setup)


def hodge_star(a: GradedForm, setup: SetupDescriptor,
               inverse: bool = False) -> GradedForm:
    """Blade-wise Hodge star on horizontal forms for the flat volume:
    star(e_{i1...ir} _| vol) = E^{i1} ^ ... ^ E^{ir}; the inverse flag
    applies the inverse bijection, so star o star^-1 = id."""
    if isinstance(a, Poly):
        a = GradedForm.scalar(a, ADAPTED)
    if a.basis != ADAPTED:
        a = change_basis(a, ADAPTED, setup)
    if not a.is_horizontal():
        raise ValueError("hodge_star is defined on horizontal forms")
    table = ham_blade_table(setup)
    full = tuple(range(1, setup.base_dim + 1))
    out: dict = {}
    if not inverse:
        by_blade = {blade: (j_tuple, sign)
                    for j_tuple, (sign, blade) in table.items()}
        for blade, coeff in a.terms.items():
            j_tuple, sign = by_blade[blade]
            target = tuple(base(j) for j in j_tuple)
            out[target] = out.get(target, Poly.zero()) + sign * coeff
    else:
        for blade, coeff in a.terms.items():
            j_tuple = tuple(lbl[1] for lbl in blade)
            sign, target = table[j_tuple]
            out[target] = out.get(target, Poly.zero()) + sign * coeff
    return GradedForm(ADAPTED, out)


def bullet(f: HamiltonianForm, g: HamiltonianForm,
           setup: SetupDescriptor) -> HamiltonianForm:
    """The graded-commutative Hodge-transported product of Hamiltonian forms.

    Composed as star^-1(star G ^ star F): with this package's first-slot
    insertion convention the factors must enter the wedge in that order for
    the graded Leibniz rule to carry its stated exponent; the opposite order
    flips {F,G}*H by (-1)^((n-r)(n+1-t)).
    """
    product = wedge(hodge_star(g.underlying, setup),
                    hodge_star(f.underlying, setup))
    result = hodge_star(product, setup, inverse=True)
    if result.is_zero:
        nominal = max(f.degree + g.degree - setup.base_dim, 0)
        return HamiltonianForm(setup, setup.base_dim - nominal, {}, result)
    return is_hamiltonian(result, setup)
