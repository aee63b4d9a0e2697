"""Variational side: covariant Legendre transform, Euler-Lagrange and
Hamilton residuals, and the connection-split coordinate changes.

Lagrangian densities live on the jet alphabet (x^i, v^A, jA_i) and must be
quadratic in the jet velocities with a constant invertible Hessian for the
Legendre transform; that keeps the inversion inside the polynomial ring and
is exactly the regularity hypothesis.

The Hamiltonian here follows the source convention H = L~ - p.phi, which is
the canonical energy coordinate of the Legendre image (opposite in sign to
the textbook De Donder-Weyl Hamiltonian).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .coeffring import ENERGY, Poly, base, field, jet, momentum
from .geometry import SetupDescriptor


class DegenerateLagrangian(ValueError):
    """The jet-velocity Hessian is singular or not constant."""


class MissingMomenta(ValueError):
    """A Hamilton residual needs momentum components on the section."""


@dataclass
class Lagrangian:
    """A polynomial density over (x^i, v^A, jA_i)."""

    density: Poly

    def __post_init__(self):
        for coord in self.density.variables():
            if coord[0] not in ("x", "v", "j"):
                raise ValueError(
                    f"Lagrangian may not depend on {coord}; jet alphabet only")


@dataclass
class Section:
    """Field components v^A(x), optionally with momenta p^i_A(x)."""

    fields: dict            # A -> Poly in x
    momenta: dict | None = None  # (i, A) -> Poly in x

    def __post_init__(self):
        for poly in list(self.fields.values()) + list((self.momenta or {}).values()):
            for coord in poly.variables():
                if coord[0] != "x":
                    raise ValueError("sections depend on base coordinates only")

    def field_at(self, a: int) -> Poly:
        return self.fields.get(a, Poly.zero())

    def momentum_at(self, i: int, a: int) -> Poly:
        return (self.momenta or {}).get((i, a), Poly.zero())

    def phase_bindings(self, setup: SetupDescriptor) -> dict:
        out = {}
        for a in setup.shape.fiber_range():
            out[field(a)] = self.field_at(a)
        if self.momenta is not None:
            for i in setup.shape.base_range():
                for a in setup.shape.fiber_range():
                    out[momentum(i, a)] = self.momentum_at(i, a)
        return out


@dataclass
class DWHamiltonian:
    """H(x, v, p) together with the solved velocities phi^A_i(x, v, p).

    The pair satisfies phi = -dH/dp identically; that is the
    substitution form of the defining relation and is checked here.
    """

    h: Poly
    velocity_solution: dict  # (A, i) -> Poly

    def __post_init__(self):
        for (a, i), phi in self.velocity_solution.items():
            if -self.h.diff(momentum(i, a)) != phi:
                raise ValueError(
                    f"velocity solution for (A={a}, i={i}) is not -dH/dp")


def _solve_rational(matrix: list, rhs: list) -> list:
    """Solve M x = rhs exactly; M rational, rhs entries Poly.

    Gauss-Jordan with Fraction pivots; raises DegenerateLagrangian when
    singular.
    """
    n = len(matrix)
    m = [row[:] for row in matrix]
    r = rhs[:]
    for col in range(n):
        pivot = next((k for k in range(col, n) if m[k][col] != 0), None)
        if pivot is None:
            raise DegenerateLagrangian("singular jet-velocity Hessian")
        m[col], m[pivot] = m[pivot], m[col]
        r[col], r[pivot] = r[pivot], r[col]
        inv = Fraction(1) / m[col][col]
        m[col] = [x * inv for x in m[col]]
        r[col] = inv * r[col]
        for k in range(n):
            if k != col and m[k][col] != 0:
                factor = m[k][col]
                m[k] = [a - factor * b for a, b in zip(m[k], m[col])]
                r[k] = r[k] - factor * r[col]
    return r


def legendre(lag: Lagrangian, setup: SetupDescriptor) -> DWHamiltonian:
    """Covariant Legendre transform of a regular quadratic Lagrangian.

    Solves p^i_A = dL/djA_i linearly for the velocities, substitutes into
    L and emits H = L~ - p.phi.  The canonical energy coordinate
    p = L - (dL/dj).j agrees with H after substitution; this identity is
    asserted exactly.
    """
    slots = [(a, i) for a in setup.shape.fiber_range()
             for i in setup.shape.base_range()]
    derivs = {slot: lag.density.diff(jet(*slot)) for slot in slots}

    hessian = []
    for a, i in slots:
        row = []
        for b, j in slots:
            entry = derivs[(a, i)].diff(jet(b, j))
            if not entry.is_constant:
                raise DegenerateLagrangian(
                    "jet-velocity Hessian is not constant")
            row.append(entry.as_fraction())
        hessian.append(row)

    zero_jets = {jet(a, i): Poly.zero() for a, i in slots}
    rhs = [Poly.var(momentum(i, a)) - derivs[(a, i)].subst(zero_jets)
           for a, i in slots]
    solution = _solve_rational(hessian, rhs)
    phi = {slot: sol for slot, sol in zip(slots, solution)}

    jet_bindings = {jet(a, i): phi[(a, i)] for a, i in slots}
    l_tilde = lag.density.subst(jet_bindings)
    h = l_tilde
    for a, i in slots:
        h = h - Poly.var(momentum(i, a)) * phi[(a, i)]

    # the canonical energy coordinate of (Leg-Koord), transported to phase space
    p_scalar = lag.density
    for a, i in slots:
        p_scalar = p_scalar - derivs[(a, i)] * Poly.var(jet(a, i))
    if p_scalar.subst(jet_bindings) != h:
        raise AssertionError("energy coordinate disagrees with H")

    return DWHamiltonian(h=h, velocity_solution=phi)


def _jet_prolongation_bindings(s: Section, setup: SetupDescriptor) -> dict:
    out = {}
    for a in setup.shape.fiber_range():
        va = s.field_at(a)
        out[field(a)] = va
        for i in setup.shape.base_range():
            out[jet(a, i)] = va.diff(base(i))
    return out


def el_residual(lag: Lagrangian, s: Section, setup: SetupDescriptor) -> dict:
    """Euler-Lagrange residual per fibre index: dL/dv o j1(phi) minus the
    total divergence of dL/dj o j1(phi); identically zero on solutions."""
    bindings = _jet_prolongation_bindings(s, setup)
    out = {}
    for a in setup.shape.fiber_range():
        value = lag.density.diff(field(a)).subst(bindings)
        for i in setup.shape.base_range():
            value = value - lag.density.diff(jet(a, i)).subst(bindings).diff(base(i))
        out[a] = value
    return out


@dataclass
class HamiltonResidual:
    field_eqs: dict     # A -> Poly
    momentum_eqs: dict  # (i, A) -> Poly

    @property
    def is_zero(self) -> bool:
        return (all(p.is_zero for p in self.field_eqs.values())
                and all(p.is_zero for p in self.momentum_eqs.values()))


def hamilton_residual(ham: DWHamiltonian, s: Section,
                      setup: SetupDescriptor) -> HamiltonResidual:
    """Residuals of the generalized Hamilton equations on a section:
    field:    (dH/dv^A) o s - d_i p^i_A
    momentum: (dH/dp^i_A) o s + d_i v^A
    """
    if s.momenta is None:
        raise MissingMomenta("hamilton_residual needs momentum components")
    bindings = s.phase_bindings(setup)
    field_eqs = {}
    for a in setup.shape.fiber_range():
        value = ham.h.diff(field(a)).subst(bindings)
        for i in setup.shape.base_range():
            value = value - s.momentum_at(i, a).diff(base(i))
        field_eqs[a] = value
    momentum_eqs = {}
    for i in setup.shape.base_range():
        for a in setup.shape.fiber_range():
            momentum_eqs[(i, a)] = (
                ham.h.diff(momentum(i, a)).subst(bindings)
                + s.field_at(a).diff(base(i)))
    return HamiltonResidual(field_eqs, momentum_eqs)


def _gamma_shift(setup: SetupDescriptor) -> Poly:
    """Gamma^A_iB p^i_A v^B, the energy shift of the splitting map."""
    total = Poly.zero()
    for a in setup.shape.fiber_range():
        for i in setup.shape.base_range():
            for b in setup.shape.fiber_range():
                total = total + (setup.conn.gamma_at(a, i, b)
                                 * Poly.var(momentum(i, a)) * Poly.var(field(b)))
    return total


def psi_transform(expr: Poly, setup: SetupDescriptor,
                  inverse: bool = False) -> Poly:
    """The jet-coordinate change of the connection splitting, as a
    substitution on expressions: jA_i picks up (+/-) Gamma^A_iB v^B."""
    bindings = {}
    for a in setup.shape.fiber_range():
        for i in setup.shape.base_range():
            shift = Poly.zero()
            for b in setup.shape.fiber_range():
                shift = shift + setup.conn.gamma_at(a, i, b) * Poly.var(field(b))
            if not shift.is_zero:
                value = Poly.var(jet(a, i)) + (-shift if inverse else shift)
                bindings[jet(a, i)] = value
    return expr.subst(bindings)


def psi_point(point: Mapping, setup: SetupDescriptor,
              inverse: bool = False) -> dict:
    """psi_transform applied to a coordinate point (mapping coord -> Poly)."""
    out = dict(point)
    x_bindings = {c: v for c, v in point.items() if c[0] == "x"}
    for a in setup.shape.fiber_range():
        for i in setup.shape.base_range():
            key = jet(a, i)
            if key not in out:
                continue
            shift = Poly.zero()
            for b in setup.shape.fiber_range():
                gamma = setup.conn.gamma_at(a, i, b).subst(x_bindings)
                shift = shift + gamma * point.get(field(b), Poly.zero())
            out[key] = out[key] + (-shift if inverse else shift)
    return out


def psi_star_transform(expr: Poly, setup: SetupDescriptor,
                       inverse: bool = False) -> Poly:
    """The induced change on the affine dual: w picks up
    (+/-) Gamma^A_iB p^i_A v^B."""
    shift = _gamma_shift(setup)
    if shift.is_zero:
        return expr
    value = Poly.var(ENERGY) + (-shift if inverse else shift)
    return expr.subst({ENERGY: value})


def psi_star_point(point: Mapping, setup: SetupDescriptor,
                   inverse: bool = False) -> dict:
    out = dict(point)
    if ENERGY not in out:
        return out
    x_bindings = {c: v for c, v in point.items() if c[0] == "x"}
    shift = Poly.zero()
    for a in setup.shape.fiber_range():
        for i in setup.shape.base_range():
            for b in setup.shape.fiber_range():
                gamma = setup.conn.gamma_at(a, i, b).subst(x_bindings)
                shift = shift + (gamma * point.get(momentum(i, a), Poly.zero())
                                 * point.get(field(b), Poly.zero()))
    out[ENERGY] = out[ENERGY] + (-shift if inverse else shift)
    return out


def gamma_split_hamiltonian(ham: DWHamiltonian,
                            setup: SetupDescriptor) -> DWHamiltonian:
    """Transport H to the connection splitting: the defining surface
    w = H maps under the w-shift to w~ = H - Gamma.p.v, and the solved
    velocities pick up the compensating + Gamma.v (the jet-side change)."""
    shift = _gamma_shift(setup)
    h_gamma = ham.h - shift
    velocities = {}
    for (a, i), phi in ham.velocity_solution.items():
        extra = Poly.zero()
        for b in setup.shape.fiber_range():
            extra = extra + setup.conn.gamma_at(a, i, b) * Poly.var(field(b))
        velocities[(a, i)] = phi + extra
    return DWHamiltonian(h=h_gamma, velocity_solution=velocities)


def covariant_hamilton_residual(ham_gamma: DWHamiltonian, s: Section,
                                setup: SetupDescriptor) -> HamiltonResidual:
    """Hamilton residuals with covariant replacements:

    nabla_i v^A     = d_i v^A + Gamma^A_iB v^B
    nabla_i p~^i_A  = d_i p^i_A - Gamma^B_iA p^i_B

    (Gamma with a minus on the dual fibre index; the base-connection terms
    of the density-valued divergence cancel pairwise and do not appear.)
    Reduces to hamilton_residual at Gamma = Lambda = 0 and matches it
    identically through gamma_split_hamiltonian.
    """
    if s.momenta is None:
        raise MissingMomenta("covariant residual needs momentum components")
    bindings = s.phase_bindings(setup)
    field_eqs = {}
    for a in setup.shape.fiber_range():
        value = ham_gamma.h.diff(field(a)).subst(bindings)
        for i in setup.shape.base_range():
            div = s.momentum_at(i, a).diff(base(i))
            for b in setup.shape.fiber_range():
                div = div - setup.conn.gamma_at(b, i, a) * s.momentum_at(i, b)
            value = value - div
        field_eqs[a] = value
    momentum_eqs = {}
    for i in setup.shape.base_range():
        for a in setup.shape.fiber_range():
            grad = s.field_at(a).diff(base(i))
            for b in setup.shape.fiber_range():
                grad = grad + setup.conn.gamma_at(a, i, b) * s.field_at(b)
            momentum_eqs[(i, a)] = (
                ham_gamma.h.diff(momentum(i, a)).subst(bindings) + grad)
    return HamiltonResidual(field_eqs, momentum_eqs)
