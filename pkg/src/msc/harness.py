"""Seeded randomized verification of the graded identities.

Each property below checks one invariant on a single randomized trial;
``run_property`` drives the trials, derives one independent sub-seed per
trial from the master seed, and collects counterexamples as complete
documents in the canonical text format.  Reports are reproducible: the same
seed and bounds give byte-identical rendered output (wall-clock time is kept
out of the rendering for that reason).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

from . import dynamics
from .coeffring import ENERGY, Poly, base, field, jet, momentum
from .exterior import (ADAPTED, COORDINATE, GradedForm, MultiVector,
                       bidegree_split, change_basis, d, hook, wedge)
from .geometry import BundleShape, ConnectionData, SetupDescriptor, volume_form
from .hamiltonian import (HamiltonianForm, bullet, from_array, ham_blade,
                          is_hamiltonian, poisson_bracket, solve_hmvf,
                          omega_2n)
from .parser import render_document
from .vertcalc import dv, dv_potential, vertical_lie


@dataclass
class Bounds:
    """Shape and size bounds that keep blade counts tractable."""

    base_dim: int = 2
    fiber_dim: int = 1
    conn_degree: int = 1
    coeff_degree: int = 2

    def __post_init__(self):
        if not 1 <= self.base_dim <= 4:
            raise ValueError("base_dim bound must be in 1..4")
        if not 1 <= self.fiber_dim <= 2:
            raise ValueError("fiber_dim bound must be in 1..2")


@dataclass
class Failure:
    trial: int
    seed: int
    counterexample: str


@dataclass
class VerifyReport:
    property: str
    trials: int
    seed: int
    failures: list = dataclass_field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


# -- random generators --------------------------------------------------------


def rand_fraction(rng: random.Random) -> Fraction:
    num = rng.choice([-3, -2, -1, 1, 2, 3])
    den = rng.choice([1, 1, 2])
    return Fraction(num, den)


def rand_poly(rng: random.Random, coords: list, max_degree: int,
              max_terms: int = 3, allow_constant: bool = True) -> Poly:
    out = Poly.zero()
    for _ in range(rng.randint(1, max_terms)):
        degree = rng.randint(0 if allow_constant else 1, max_degree)
        mono = Poly.const(rand_fraction(rng))
        for _ in range(degree):
            mono = mono * Poly.var(rng.choice(coords))
        out = out + mono
    return out


def rand_setup(rng: random.Random, bounds: Bounds,
               force_dims: tuple | None = None) -> SetupDescriptor:
    if force_dims is not None:
        n1, nf = force_dims
    else:
        n1 = rng.randint(1, bounds.base_dim)
        nf = rng.randint(1, bounds.fiber_dim)
    shape = BundleShape(n1, nf)
    xs = [base(i) for i in range(1, n1 + 1)]
    gamma = {}
    for _ in range(rng.randint(0, 2)):
        key = (rng.randint(1, nf), rng.randint(1, n1), rng.randint(1, nf))
        gamma[key] = rand_poly(rng, xs, bounds.conn_degree, 2)
    lam = {}
    for _ in range(rng.randint(0, 2)):
        i = rng.randint(1, n1)
        j = rng.randint(i, n1)
        key = (rng.randint(1, n1), i, j)
        lam[key] = rand_poly(rng, xs, bounds.conn_degree, 2)
    return SetupDescriptor(shape, ConnectionData(gamma, lam))


def phase_labels(setup: SetupDescriptor, include_energy: bool = True) -> list:
    labels = [base(i) for i in setup.shape.base_range()]
    labels += setup.vertical_labels()
    if include_energy:
        labels.append(ENERGY)
    return labels


def rand_form(rng: random.Random, setup: SetupDescriptor, bounds: Bounds,
              max_blades: int = 3, basis: str = ADAPTED) -> GradedForm:
    labels = phase_labels(setup)
    coords = phase_labels(setup)
    out = GradedForm.zero(basis)
    for _ in range(rng.randint(1, max_blades)):
        size = rng.randint(0, min(3, len(labels)))
        blade_labels = rng.sample(labels, size)
        coeff = rand_poly(rng, coords, bounds.coeff_degree, 2)
        out = out + GradedForm.blade(blade_labels, coeff, basis)
    return out


def rand_multivector(rng: random.Random, setup: SetupDescriptor,
                     bounds: Bounds, degree: int) -> MultiVector:
    labels = phase_labels(setup)
    coords = phase_labels(setup)
    out = MultiVector.zero()
    if degree > len(labels):
        return out
    for _ in range(rng.randint(1, 2)):
        blade_labels = rng.sample(labels, degree)
        coeff = rand_poly(rng, coords, bounds.coeff_degree, 2)
        out = out + MultiVector.blade(blade_labels, coeff)
    return out


def _rand_xv_poly(rng, setup, bounds) -> Poly:
    coords = [base(i) for i in setup.shape.base_range()]
    coords += [field(a) for a in setup.shape.fiber_range()]
    return rand_poly(rng, coords, bounds.coeff_degree, 2)


def _rand_top_generator(rng, setup, bounds) -> HamiltonianForm:
    """A random Hamiltonian n-form: function or fibre-linear momentum type."""
    n1 = setup.base_dim
    coeffs = {}
    if rng.random() < 0.5:
        coeffs[(rng.randint(1, n1),)] = _rand_xv_poly(rng, setup, bounds)
    else:
        weights = {a: _rand_xv_poly(rng, setup, bounds)
                   for a in setup.shape.fiber_range()}
        for i in range(1, n1 + 1):
            entry = Poly.zero()
            for a, g in weights.items():
                entry = entry + g * Poly.var(momentum(i, a))
            coeffs[(i,)] = entry
    return from_array(setup, 1, coeffs)


def rand_hamiltonian(rng: random.Random, setup: SetupDescriptor,
                     bounds: Bounds, degree: int | None = None) -> HamiltonianForm:
    """A random admissible form of the requested degree (default: random).

    Degree-d forms with d < n+1 are built as sums of bullet products of
    degree-n generators, which stay inside the admissible class; the result
    passes through the validator on construction.
    """
    n1 = setup.base_dim
    n = n1 - 1
    if degree is None:
        degree = rng.randint(0, n)
    if degree == n1:
        raise ValueError("top degree is generated separately")
    r = n1 - degree
    if r == n1:
        coords = phase_labels(setup, include_energy=False)
        return is_hamiltonian(rand_poly(rng, coords, bounds.coeff_degree, 3),
                              setup)
    total = None
    for _ in range(rng.randint(1, 2)):
        piece = _rand_top_generator(rng, setup, bounds)
        for _ in range(r - 1):
            piece = bullet(piece, _rand_top_generator(rng, setup, bounds), setup)
        piece = is_hamiltonian(_rand_xv_poly(rng, setup, bounds)
                               * piece.underlying, setup)
        total = piece if total is None else is_hamiltonian(
            total.underlying + piece.underlying, setup)
    return total


# -- properties -----------------------------------------------------------------

PROPERTY_NAMES = ("dv2", "antisym", "jacobi", "leibniz", "bullet-comm",
                  "conn-indep", "poincare", "closure", "degree-bookkeeping",
                  "legendre-consistency")


def _doc(setup, forms=None, lagrangian=None, sections=None, note="") -> str:
    printable = {name: str(value) for name, value in (forms or {}).items()}
    return render_document(setup, printable, lagrangian, sections,
                           header=note or None)


def _prop_dv2(rng, bounds):
    setup = rand_setup(rng, bounds)
    a = rand_form(rng, setup, bounds,
                  basis=rng.choice([ADAPTED, COORDINATE]))
    if not dv(dv(a, setup), setup).is_zero:
        return _doc(setup, {"a": change_basis(a, ADAPTED, setup)},
                    note="dv(dv(a)) != 0")
    return None


def _two_hams(rng, bounds, max_base=3):
    setup = rand_setup(rng, bounds)
    f = rand_hamiltonian(rng, setup, bounds)
    g = rand_hamiltonian(rng, setup, bounds)
    return setup, f, g


def _prop_antisym(rng, bounds):
    setup, f, g = _two_hams(rng, bounds)
    n = setup.base_dim - 1
    lhs = poisson_bracket(f, g, setup).underlying
    rhs = poisson_bracket(g, f, setup).underlying
    sign = -1 if ((n - f.degree) * (n - g.degree)) % 2 == 0 else 1
    if lhs != sign * rhs:
        return _doc(setup, {"F": f, "G": g}, note="graded antisymmetry failed")
    return None


def _prop_jacobi(rng, bounds):
    setup = rand_setup(rng, bounds)
    f = rand_hamiltonian(rng, setup, bounds)
    g = rand_hamiltonian(rng, setup, bounds)
    h = rand_hamiltonian(rng, setup, bounds)
    n = setup.base_dim - 1
    r, s, t = f.degree, g.degree, h.degree

    def sgn(a, b):
        return -1 if (a * b) % 2 else 1

    total = (sgn(n - r, n - t)
             * poisson_bracket(f, poisson_bracket(g, h, setup), setup).underlying
             + sgn(n - s, n - r)
             * poisson_bracket(g, poisson_bracket(h, f, setup), setup).underlying
             + sgn(n - t, n - s)
             * poisson_bracket(h, poisson_bracket(f, g, setup), setup).underlying)
    if not total.is_zero:
        return _doc(setup, {"F": f, "G": g, "H": h},
                    note="graded Jacobi identity failed")
    return None


def _prop_leibniz(rng, bounds):
    setup = rand_setup(rng, bounds)
    f = rand_hamiltonian(rng, setup, bounds)
    g = rand_hamiltonian(rng, setup, bounds)
    h = rand_hamiltonian(rng, setup, bounds)
    n = setup.base_dim - 1
    lhs = poisson_bracket(f, bullet(g, h, setup), setup).underlying
    first = bullet(poisson_bracket(f, g, setup), h, setup).underlying
    sign = -1 if ((n - f.degree) * (n + 1 - g.degree)) % 2 else 1
    second = sign * bullet(g, poisson_bracket(f, h, setup), setup).underlying
    if lhs != first + second:
        return _doc(setup, {"F": f, "G": g, "H": h},
                    note="graded Leibniz rule failed")
    return None


def _prop_bullet_comm(rng, bounds):
    setup, f, g = _two_hams(rng, bounds)
    n1 = setup.base_dim
    sign = -1 if ((n1 - f.degree) * (n1 - g.degree)) % 2 else 1
    if bullet(f, g, setup).underlying != sign * bullet(g, f, setup).underlying:
        return _doc(setup, {"F": f, "G": g},
                    note="bullet graded commutativity failed")
    return None


def _prop_conn_indep(rng, bounds):
    """Same coefficient arrays, two connections: identical brackets after
    re-expression in the coordinate basis."""
    setup1 = rand_setup(rng, bounds)
    setup2 = SetupDescriptor(setup1.shape, rand_setup(rng, bounds, force_dims=(
        setup1.base_dim, setup1.fiber_dim)).conn)
    f1 = rand_hamiltonian(rng, setup1, bounds)
    g1 = rand_hamiltonian(rng, setup1, bounds)
    f2 = from_array(setup2, f1.r, f1.coeffs)
    g2 = from_array(setup2, g1.r, g1.coeffs)
    lhs = change_basis(poisson_bracket(f1, g1, setup1).underlying,
                       COORDINATE, setup1)
    rhs = change_basis(poisson_bracket(f2, g2, setup2).underlying,
                       COORDINATE, setup2)
    if lhs != rhs:
        return _doc(setup1, {"F": f1, "G": g1},
                    note="bracket depends on the connection")
    return None


def _prop_poincare(rng, bounds):
    setup = rand_setup(rng, bounds)
    a = dv(rand_form(rng, setup, bounds), setup)
    beta = dv_potential(a, setup)
    if dv(beta, setup) != a:
        return _doc(setup, {"a": a}, note="poincare round trip failed")
    # with a fibre-constant remainder: a = dv(potential) + remainder exactly
    xs = [base(i) for i in setup.shape.base_range()]
    horizontal = GradedForm.blade(
        rng.sample(xs, rng.randint(0, len(xs))),
        rand_poly(rng, xs + [ENERGY], bounds.coeff_degree, 2), ADAPTED)
    closed = a + horizontal
    beta2 = dv_potential(closed, setup)
    if closed - dv(beta2, setup) != horizontal:
        return _doc(setup, {"a": closed},
                    note="fibre-constant part not reproduced")
    return None


def _prop_closure(rng, bounds):
    setup, f, g = _two_hams(rng, bounds)
    bracket = poisson_bracket(f, g, setup)  # validates internally
    try:
        is_hamiltonian(bracket.underlying, setup)
    except Exception:
        return _doc(setup, {"F": f, "G": g},
                    note="bracket failed the Hamiltonian recognizer")
    return None


def _prop_degree(rng, bounds):
    setup, f, g = _two_hams(rng, bounds)
    n1 = setup.base_dim
    bracket = poisson_bracket(f, g, setup)
    if not bracket.underlying.is_zero:
        expected = f.degree + g.degree - (n1 - 1)
        if bracket.underlying.homogeneous_degree() != expected:
            return _doc(setup, {"F": f, "G": g}, note="bracket degree wrong")
    product = bullet(f, g, setup)
    if not product.underlying.is_zero:
        expected = f.degree + g.degree - n1
        if product.underlying.homogeneous_degree() != expected:
            return _doc(setup, {"F": f, "G": g}, note="bullet degree wrong")
    return None


def _rand_regular_lagrangian(rng, setup, bounds) -> dynamics.Lagrangian:
    """A regular quadratic density: invertible constant Hessian plus lower
    terms in (x, v)."""
    slots = [(a, i) for a in setup.shape.fiber_range()
             for i in setup.shape.base_range()]
    density = Poly.zero()
    for idx, (a, i) in enumerate(slots):
        scale = rng.choice([Fraction(1), Fraction(-1), Fraction(1, 2),
                            Fraction(2)])
        density = density + Poly.const(scale) * Poly.var(jet(a, i)) ** 2
        for (b, j) in slots[idx + 1:]:
            if rng.random() < 0.2:
                # strictly diagonally dominated off-diagonal term
                density = density + Poly.const(Fraction(1, 8) * rng.choice([-1, 1])) \
                    * Poly.var(jet(a, i)) * Poly.var(jet(b, j))
    xv = [base(i) for i in setup.shape.base_range()]
    xv += [field(a) for a in setup.shape.fiber_range()]
    density = density + rand_poly(rng, xv, 2, 2)
    for a, i in slots:
        if rng.random() < 0.3:
            density = density + rand_poly(rng, xv, 1, 1) * Poly.var(jet(a, i))
    return dynamics.Lagrangian(density)


def _prop_legendre(rng, bounds):
    setup = rand_setup(rng, bounds)
    lag = _rand_regular_lagrangian(rng, setup, bounds)
    try:
        ham = dynamics.legendre(lag, setup)
    except dynamics.DegenerateLagrangian:
        return None  # the generator very rarely loses dominance; skip
    xs = [base(i) for i in setup.shape.base_range()]
    fields = {a: rand_poly(rng, xs, 3, 2) for a in setup.shape.fiber_range()}
    jet_bindings = {}
    for a in setup.shape.fiber_range():
        for i in setup.shape.base_range():
            jet_bindings[jet(a, i)] = fields[a].diff(base(i))
    momenta = {}
    for i in setup.shape.base_range():
        for a in setup.shape.fiber_range():
            momenta[(i, a)] = lag.density.diff(jet(a, i)).subst(
                {**jet_bindings, **{field(b): fields[b]
                                    for b in setup.shape.fiber_range()}})
    section = dynamics.Section(fields=fields, momenta=momenta)
    el = dynamics.el_residual(lag, section, setup)
    ham_res = dynamics.hamilton_residual(ham, section, setup)
    ok = all(ham_res.momentum_eqs[key].is_zero for key in ham_res.momentum_eqs)
    ok = ok and all(el[a] == ham_res.field_eqs[a] for a in el)
    if not ok:
        return _doc(setup, lagrangian=lag,
                    sections={"s": section},
                    note="Legendre transport disagrees with Euler-Lagrange")
    return None


PROPERTIES = {
    "dv2": _prop_dv2,
    "antisym": _prop_antisym,
    "jacobi": _prop_jacobi,
    "leibniz": _prop_leibniz,
    "bullet-comm": _prop_bullet_comm,
    "conn-indep": _prop_conn_indep,
    "poincare": _prop_poincare,
    "closure": _prop_closure,
    "degree-bookkeeping": _prop_degree,
    "legendre-consistency": _prop_legendre,
}


def run_property(name: str, trials: int, seed: int,
                 bounds: Bounds | None = None) -> VerifyReport:
    """Run one property for a number of independently seeded trials."""
    if name not in PROPERTIES:
        raise KeyError(f"unknown property {name!r}; "
                       f"choose from {', '.join(PROPERTY_NAMES)}")
    bounds = bounds or Bounds()
    check = PROPERTIES[name]
    master = random.Random(seed)
    sub_seeds = [master.getrandbits(63) for _ in range(trials)]
    report = VerifyReport(property=name, trials=trials, seed=seed)
    start = time.perf_counter()
    for index, sub_seed in enumerate(sub_seeds):
        counterexample = check(random.Random(sub_seed), bounds)
        if counterexample is not None:
            report.failures.append(Failure(index, sub_seed, counterexample))
    report.elapsed_ms = (time.perf_counter() - start) * 1000.0
    return report


def render_report(report: VerifyReport) -> str:
    """Deterministic text rendering (timings deliberately excluded)."""
    lines = [f"property: {report.property}",
             f"trials: {report.trials}",
             f"seed: {report.seed}",
             f"failures: {len(report.failures)}"]
    for k, failure in enumerate(report.failures):
        lines.append(f"failure[{k}]:")
        lines.append(f"  trial: {failure.trial}")
        lines.append(f"  seed: {failure.seed}")
        lines.append("  counterexample:")
        for row in failure.counterexample.splitlines():
            lines.append(f"    {row}")
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"
