"""Bundle shape, connection data, adapted frames and the canonical forms.

The setup holds the shape (n+1, N) of the vector bundle V -> M together with
a linear connection Gamma^A_iB on V and a torsion-free connection
Lambda^k_ij on M, all with entries polynomial in the base coordinates.

The induced horizontal lift on phase space is

  e_j = d/dx^j - Gamma^A_jB v^B d/dv^A
        + (Lambda^k_ji p^i_A - Gamma^B_jA p^k_B) d/dp^k_A

with vanishing w-component; together with the coordinate vertical vectors it
is the adapted frame.  The adapted coframe is obtained by exact inversion of
the (unitriangular) frame matrix, so the duality pairing holds by
construction.  A literal transcription of the printed momentum coframe
correction fails this pairing for one sign arrangement; duality is the
contract enforced here.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Mapping

from .coeffring import ENERGY, Poly, base, field, momentum
from .exterior import (ADAPTED, COORDINATE, GradedForm, MultiVector, wedge,
                       _hook_label, bidegree_part, change_basis, d)


@dataclass(frozen=True)
class BundleShape:
    """Dimensions (n+1, N) of the bundle; both at least 1."""

    base_dim: int
    fiber_dim: int

    def __post_init__(self):
        if self.base_dim < 1:
            raise ValueError("base_dim must be >= 1")
        if self.fiber_dim < 1:
            raise ValueError("fiber_dim must be >= 1")

    def base_range(self):
        return range(1, self.base_dim + 1)

    def fiber_range(self):
        return range(1, self.fiber_dim + 1)


class ConnectionData:
    """Christoffel data: gamma[A, i, B] on V and lam[k, i, j] on M.

    Entries are polynomials in base coordinates only; lam is symmetric in its
    last two indices (torsion-free).  Missing entries are zero.
    """

    __slots__ = ("gamma", "lam")

    def __init__(self,
                 gamma: Mapping[tuple, Poly] | None = None,
                 lam: Mapping[tuple, Poly] | None = None):
        self.gamma = {}
        self.lam = {}
        for key, poly in (gamma or {}).items():
            if not poly.is_zero:
                self.gamma[key] = poly
        for (k, i, j), poly in (lam or {}).items():
            if poly.is_zero:
                continue
            mirror = self.lam.get((k, j, i))
            if mirror is not None and mirror != poly:
                raise ValueError(
                    f"lambda[{k},{i},{j}] conflicts with its mirror entry")
            self.lam[(k, i, j)] = poly
            self.lam[(k, j, i)] = poly

    @classmethod
    def flat(cls) -> "ConnectionData":
        return cls()

    def gamma_at(self, a: int, i: int, b: int) -> Poly:
        return self.gamma.get((a, i, b), Poly.zero())

    def lambda_at(self, k: int, i: int, j: int) -> Poly:
        return self.lam.get((k, i, j), Poly.zero())

    @property
    def is_flat(self) -> bool:
        return not self.gamma and not self.lam


class SetupDescriptor:
    """Bundle shape plus connection data; the context of every computation.

    Treated as an immutable value after construction; derived objects (the
    adapted frame, canonical forms) are cached on first use.
    """

    __slots__ = ("shape", "conn", "_frame", "_forms", "_cache")

    def __init__(self, shape: BundleShape, conn: ConnectionData | None = None):
        self.shape = shape
        self.conn = conn or ConnectionData.flat()
        self._validate()
        self._frame = None
        self._forms = None
        self._cache = {}

    def _validate(self):
        n1, nf = self.shape.base_dim, self.shape.fiber_dim
        allowed = {base(i) for i in self.shape.base_range()}
        for (a, i, b), poly in self.conn.gamma.items():
            if not (1 <= a <= nf and 1 <= b <= nf and 1 <= i <= n1):
                raise ValueError(f"gamma index ({a},{i},{b}) out of bounds")
            if not poly.variables() <= allowed:
                raise ValueError("gamma entries must depend on base coordinates only")
        for (k, i, j), poly in self.conn.lam.items():
            if not (1 <= k <= n1 and 1 <= i <= n1 and 1 <= j <= n1):
                raise ValueError(f"lambda index ({k},{i},{j}) out of bounds")
            if not poly.variables() <= allowed:
                raise ValueError("lambda entries must depend on base coordinates only")

    @property
    def base_dim(self) -> int:
        return self.shape.base_dim

    @property
    def fiber_dim(self) -> int:
        return self.shape.fiber_dim

    def vertical_labels(self) -> list:
        labels = [field(a) for a in self.shape.fiber_range()]
        labels += [momentum(i, a) for i in self.shape.base_range()
                   for a in self.shape.fiber_range()]
        return labels

    def fiber_euler_vector(self) -> MultiVector:
        """v^A e_vA + p^i_A e_p i_A, the radial vector of the (v,p)-fibre."""
        out = MultiVector.zero()
        for lbl in self.vertical_labels():
            out = out + MultiVector.vector(lbl, Poly.var(lbl))
        return out

    def frame(self) -> "AdaptedFrame":
        if self._frame is None:
            self._frame = build_frame(self)
        return self._frame

    def forms(self) -> "CanonicalForms":
        if self._forms is None:
            self._forms = canonical_forms(self)
        return self._forms


class AdaptedFrame:
    """The connection-induced frame/coframe pair on phase space.

    ``corrections[mu][j]`` is the coefficient of the coordinate vertical
    vector d/d(mu) in the horizontal frame vector e_j.  The frame matrix is
    I + L with L supported on (horizontal row, vertical column) pairs, so
    L^2 = 0 and the inverse is I - L; the coframe below is exactly that
    inverse transpose.
    """

    __slots__ = ("setup", "corrections")

    def __init__(self, setup: SetupDescriptor, corrections: dict):
        self.setup = setup
        self.corrections = corrections

    def correction(self, label, j: int) -> Poly:
        return self.corrections.get(label, {}).get(j, Poly.zero())

    def frame_vector_coeffs(self, j: int) -> dict:
        """e_j expanded over the coordinate vectors (label -> Poly)."""
        out = {base(j): Poly.const(1)}
        for label, per_j in self.corrections.items():
            coeff = per_j.get(j)
            if coeff is not None and not coeff.is_zero:
                out[label] = coeff
        return out

    def coframe_in_coordinate(self, label) -> GradedForm:
        """The adapted coframe element E^label written in the d-basis."""
        if label[0] == "x":
            return GradedForm.coform(label, COORDINATE)
        out = GradedForm.coform(label, COORDINATE)
        for j in self.setup.shape.base_range():
            coeff = self.correction(label, j)
            if not coeff.is_zero:
                out = out - coeff * GradedForm.coform(base(j), COORDINATE)
        return out

    def coordinate_coform_in_adapted(self, label) -> GradedForm:
        """The coordinate coframe element d(label) written in the E-basis."""
        if label[0] == "x":
            return GradedForm.coform(label, ADAPTED)
        out = GradedForm.coform(label, ADAPTED)
        for j in self.setup.shape.base_range():
            coeff = self.correction(label, j)
            if not coeff.is_zero:
                out = out + coeff * GradedForm.coform(base(j), ADAPTED)
        return out

    def pairing(self, coframe_label, frame_label) -> Poly:
        """Exact contraction <E^alpha, e_beta> of the coordinate expansions."""
        coform = self.coframe_in_coordinate(coframe_label)
        if frame_label[0] == "x":
            vector_coeffs = self.frame_vector_coeffs(frame_label[1])
        else:
            vector_coeffs = {frame_label: Poly.const(1)}
        value = Poly.zero()
        for label, vcoeff in vector_coeffs.items():
            value = value + coform.coefficient((label,)) * vcoeff
        return value


def build_frame(setup: SetupDescriptor) -> AdaptedFrame:
    """Adapted frame from the connection data (vertical part of the
    horizontal lift), with the coframe given by exact inversion."""
    shape, conn = setup.shape, setup.conn
    corrections: dict = {}

    for a in shape.fiber_range():
        per_j = {}
        for j in shape.base_range():
            coeff = Poly.zero()
            for b in shape.fiber_range():
                coeff = coeff - conn.gamma_at(a, j, b) * Poly.var(field(b))
            if not coeff.is_zero:
                per_j[j] = coeff
        if per_j:
            corrections[field(a)] = per_j

    for k in shape.base_range():
        for a in shape.fiber_range():
            per_j = {}
            for j in shape.base_range():
                coeff = Poly.zero()
                for i in shape.base_range():
                    coeff = coeff + conn.lambda_at(k, j, i) * Poly.var(momentum(i, a))
                for b in shape.fiber_range():
                    coeff = coeff - conn.gamma_at(b, j, a) * Poly.var(momentum(k, b))
                if not coeff.is_zero:
                    per_j[j] = coeff
            if per_j:
                corrections[momentum(k, a)] = per_j

    return AdaptedFrame(setup, corrections)


def build_gamma_bar(setup: SetupDescriptor,
                    u: Mapping[int, Poly],
                    u_i: Mapping[tuple, Poly]) -> dict:
    """The prolonged-connection coefficients at a jet point.

    ``u[A]`` and ``u_i[(A, i)]`` are the fibre and jet values, polynomial in
    the base coordinates.  Returns the array keyed by (A, i, j).
    """
    shape, conn = setup.shape, setup.conn
    zero = Poly.zero()

    def uval(a):
        return u.get(a, zero)

    def uival(a, i):
        return u_i.get((a, i), zero)

    out = {}
    for a in shape.fiber_range():
        for i in shape.base_range():
            for j in shape.base_range():
                total = Poly.zero()
                for b in shape.fiber_range():
                    inner = uival(b, i)
                    for c in shape.fiber_range():
                        inner = inner + conn.gamma_at(b, i, c) * uval(c)
                    total = total - conn.gamma_at(a, j, b) * inner
                for k in shape.base_range():
                    inner = uival(a, k)
                    for b in shape.fiber_range():
                        inner = inner + conn.gamma_at(a, k, b) * uval(b)
                    total = total - conn.lambda_at(k, j, i) * inner
                for b in shape.fiber_range():
                    total = total - conn.gamma_at(a, i, b).diff(base(j)) * uval(b)
                for b in shape.fiber_range():
                    for c in shape.fiber_range():
                        total = total + conn.gamma_at(a, i, b) * conn.gamma_at(b, j, c) * uval(c)
                out[(a, i, j)] = total
    return out


@dataclass
class CanonicalForms:
    """The tautological (n+1)-form and its companions on one setup."""

    theta: GradedForm       # coordinate basis, as displayed
    omega_full: GradedForm  # -d(theta), coordinate basis
    vol: GradedForm         # horizontally lifted volume, adapted basis
    theta_1n: GradedForm    # bidegree-(1, n) part of theta, adapted basis
    omega_2n: GradedForm    # d^V(theta_1n), adapted basis


def volume_form(setup: SetupDescriptor, basis: str = ADAPTED) -> GradedForm:
    labels = [base(i) for i in setup.shape.base_range()]
    return GradedForm.blade(labels, 1, basis)


def canonical_forms(setup: SetupDescriptor) -> CanonicalForms:
    from .vertcalc import dv  # cycle-free at call time

    shape = setup.shape
    n1 = shape.base_dim
    vol_c = volume_form(setup, COORDINATE)

    theta = GradedForm.scalar(Poly.var(ENERGY), COORDINATE)
    theta = wedge(theta, vol_c)
    for i in shape.base_range():
        hooked = _hook_label(base(i), vol_c)
        for a in shape.fiber_range():
            term = Poly.var(momentum(i, a)) * wedge(
                GradedForm.coform(field(a), COORDINATE), hooked)
            theta = theta + term

    omega_full = -d(theta)

    theta_adapted = change_basis(theta, ADAPTED, setup)
    theta_1n = bidegree_part(theta_adapted, 1, n1 - 1)
    omega_2n = dv(theta_1n, setup)

    return CanonicalForms(theta=theta,
                          omega_full=omega_full,
                          vol=volume_form(setup, ADAPTED),
                          theta_1n=theta_1n,
                          omega_2n=omega_2n)
