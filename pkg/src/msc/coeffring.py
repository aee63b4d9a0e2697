"""Exact sparse polynomial arithmetic over the phase-space coordinate alphabet.

Every scalar that appears anywhere in this package is a multivariate
polynomial with rational coefficients over a small fixed alphabet of
coordinates:

  ("x", i)      base coordinate x^i,        i = 1 .. n+1
  ("v", A)      fibre (field) coordinate v^A,  A = 1 .. N
  ("p", i, A)   momentum coordinate p^i_A
  ("w",)        energy coordinate (printed ``w``)
  ("j", A, i)   jet velocity (printed ``jA_i``; only used by Lagrangians)

A polynomial is a dict mapping monomials to ``Fraction`` coefficients.  A
monomial is a tuple of (coordinate, exponent) pairs sorted by the total
coordinate order, with all exponents >= 1.  Zero coefficients are never
stored, so the zero polynomial is the empty dict and structural equality is
polynomial equality.  This exact representation is what makes every identity
check in the package a literal comparison with zero.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Coord = tuple
Monomial = tuple  # tuple[tuple[Coord, int], ...]

_KIND_RANK = {"x": 0, "v": 1, "p": 2, "w": 3, "j": 4}

# Coordinate kinds that count as fibre directions of P -> M for the radial
# homotopy (the energy coordinate w is a spectator, jets never appear here).
FIBER_KINDS = ("v", "p")


def base(i: int) -> Coord:
    return ("x", i)


def field(a: int) -> Coord:
    return ("v", a)


def momentum(i: int, a: int) -> Coord:
    return ("p", i, a)


ENERGY: Coord = ("w",)


def jet(a: int, i: int) -> Coord:
    return ("j", a, i)


def coord_key(c: Coord) -> tuple:
    """Total order on coordinates: base < field < momentum < energy < jet,
    lexicographic on indices within a kind."""
    return (_KIND_RANK[c[0]],) + tuple(c[1:])


def coord_name(c: Coord) -> str:
    kind = c[0]
    if kind == "x":
        return f"x{c[1]}"
    if kind == "v":
        return f"v{c[1]}"
    if kind == "p":
        return f"p{c[1]}_{c[2]}"
    if kind == "w":
        return "w"
    if kind == "j":
        return f"j{c[1]}_{c[2]}"
    raise ValueError(f"unknown coordinate kind {kind!r}")


_COORD_RE = re.compile(r"^(?:x(\d+)|v(\d+)|p(\d+)_(\d+)|j(\d+)_(\d+)|w)$")


def parse_coord(name: str) -> Coord | None:
    """Inverse of coord_name; returns None if the name is not a coordinate."""
    m = _COORD_RE.match(name)
    if m is None:
        return None
    if name == "w":
        return ENERGY
    if m.group(1) is not None:
        return base(int(m.group(1)))
    if m.group(2) is not None:
        return field(int(m.group(2)))
    if m.group(3) is not None:
        return momentum(int(m.group(3)), int(m.group(4)))
    return jet(int(m.group(5)), int(m.group(6)))


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    """Merge two sorted monomials, adding exponents."""
    out = []
    i = j = 0
    while i < len(m1) and j < len(m2):
        c1, e1 = m1[i]
        c2, e2 = m2[j]
        k1, k2 = coord_key(c1), coord_key(c2)
        if k1 == k2:
            out.append((c1, e1 + e2))
            i += 1
            j += 1
        elif k1 < k2:
            out.append(m1[i])
            i += 1
        else:
            out.append(m2[j])
            j += 1
    out.extend(m1[i:])
    out.extend(m2[j:])
    return tuple(out)


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_cmp(a: Monomial, b: Monomial) -> int:
    """Graded-lexicographic order used for canonical printing: higher total
    degree first, ties broken by the dense exponent vector under the
    coordinate order (smaller exponent on the earliest coordinate first)."""
    da, db = _mono_degree(a), _mono_degree(b)
    if da != db:
        return db - da
    i = j = 0
    while i < len(a) and j < len(b):
        ka, kb = coord_key(a[i][0]), coord_key(b[j][0])
        if ka == kb:
            ea, eb = a[i][1], b[j][1]
            if ea != eb:
                return -1 if ea < eb else 1
            i += 1
            j += 1
        elif ka < kb:
            return 1  # a has a nonzero exponent where b has zero
        else:
            return -1
    if i < len(a):
        return 1
    if j < len(b):
        return -1
    return 0


_mono_sort_key = functools.cmp_to_key(_mono_cmp)

Scalar = Union[int, Fraction]


def _as_fraction(value: Scalar) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


class Poly:
    """Exact multivariate polynomial with Fraction coefficients.

    Instances are immutable by convention; all operations return new
    polynomials in canonical form (no zero coefficients, sorted monomials).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        canonical = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff != 0:
                    canonical[mono] = coeff
        self.terms = canonical

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly":
        return cls()

    @classmethod
    def const(cls, value: Scalar) -> "Poly":
        value = _as_fraction(value)
        if value == 0:
            return cls()
        return cls({(): value})

    @classmethod
    def var(cls, coord: Coord, power: int = 1) -> "Poly":
        if power < 0:
            raise ValueError("negative power")
        if power == 0:
            return cls.const(1)
        return cls({((coord, power),): Fraction(1)})

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def as_fraction(self) -> Fraction:
        """The value of a constant polynomial (zero for the zero polynomial)."""
        if not self.terms:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return self.terms[()]

    def variables(self) -> set:
        return {c for mono in self.terms for c, _ in mono}

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(_mono_degree(m) for m in self.terms)

    def degree_in(self, coord: Coord) -> int:
        deg = 0
        for mono in self.terms:
            for c, e in mono:
                if c == coord:
                    deg = max(deg, e)
        return deg

    def fiber_degree(self, mono: Monomial) -> int:
        return sum(e for c, e in mono if c[0] in FIBER_KINDS)

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return None

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coeff
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Poly.const(1)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    # -- calculus ------------------------------------------------------------

    def diff(self, coord: Coord) -> "Poly":
        """Formal partial derivative with respect to one coordinate."""
        out: dict = {}
        for mono, coeff in self.terms.items():
            for idx, (c, e) in enumerate(mono):
                if c == coord:
                    if e == 1:
                        reduced = mono[:idx] + mono[idx + 1:]
                    else:
                        reduced = mono[:idx] + ((c, e - 1),) + mono[idx + 1:]
                    out[reduced] = out.get(reduced, Fraction(0)) + coeff * e
                    break
        return Poly(out)

    def subst(self, bindings: Mapping[Coord, "Poly | Scalar"]) -> "Poly":
        """Simultaneous substitution of coordinates by polynomials."""
        if not bindings:
            return self
        resolved = {c: (v if isinstance(v, Poly) else Poly.const(v))
                    for c, v in bindings.items()}
        result = Poly.zero()
        for mono, coeff in self.terms.items():
            term = Poly.const(coeff)
            for c, e in mono:
                factor = resolved.get(c)
                if factor is None:
                    term = term * Poly.var(c, e)
                else:
                    term = term * factor ** e
            result = result + term
        return result

    def fiber_scale_integrate(self, t_power_shift: int) -> "Poly":
        """Scale each monomial of total fibre degree k by 1/(k + t_power_shift).

        This is the monomial-wise radial homotopy integral over the fibre
        coordinates (field and momentum); base coordinates, w and jets count
        as parameters.  For t_power_shift = 0 a fibre-constant monomial would
        divide by zero; that signals a nonzero constant term in a homotopy
        integrand, which is a caller bug, so it is rejected.
        """
        if t_power_shift < 0:
            raise ValueError("t_power_shift must be >= 0")
        out: dict = {}
        for mono, coeff in self.terms.items():
            k = self.fiber_degree(mono)
            if k + t_power_shift == 0:
                raise ValueError(
                    "fibre-constant monomial in a homotopy integrand with shift 0")
            out[mono] = coeff / (k + t_power_shift)
        return Poly(out)

    # -- printing -------------------------------------------------------------

    def sorted_monomials(self) -> list:
        return sorted(self.terms, key=_mono_sort_key)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for mono in self.sorted_monomials():
            coeff = self.terms[mono]
            body = "*".join(
                coord_name(c) if e == 1 else f"{coord_name(c)}^{e}"
                for c, e in reversed(mono))
            mag = abs(coeff)
            if not body:
                text = str(mag)
            elif mag == 1:
                text = body
            else:
                text = f"{mag}*{body}"
            pieces.append(("-" if coeff < 0 else "+", text))
        sign, first = pieces[0]
        out = ("-" if sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self) -> str:
        return f"Poly({self})"


def poly_vars(*coords: Coord) -> list:
    """Convenience: the variable polynomials for a list of coordinates."""
    return [Poly.var(c) for c in coords]


def phase_coords(base_dim: int, fiber_dim: int, include_energy: bool = True) -> list:
    """All phase-space coordinates of a bundle shape, in canonical order."""
    coords: list = [base(i) for i in range(1, base_dim + 1)]
    coords += [field(a) for a in range(1, fiber_dim + 1)]
    coords += [momentum(i, a) for i in range(1, base_dim + 1)
               for a in range(1, fiber_dim + 1)]
    if include_energy:
        coords.append(ENERGY)
    return coords


def jet_coords(base_dim: int, fiber_dim: int) -> list:
    """The jet-bundle alphabet (x^i, v^A, jA_i) used by Lagrangians."""
    coords: list = [base(i) for i in range(1, base_dim + 1)]
    coords += [field(a) for a in range(1, fiber_dim + 1)]
    coords += [jet(a, i) for a in range(1, fiber_dim + 1)
               for i in range(1, base_dim + 1)]
    return coords
