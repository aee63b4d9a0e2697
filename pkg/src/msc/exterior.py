"""Graded exterior algebra of forms and multivector fields over the Poly ring.

Forms and multivectors are stored blade-wise: a blade is a strictly
increasing tuple of basis labels, and a form / multivector is a dict from
blades to Poly coefficients.  Labels reuse the coordinate tuples of
``coeffring`` (("x", i), ("v", A), ("p", i, A), ("w",)); whether a label
means a coframe element or a frame vector is determined by the container.

Two coframe bases coexist, tagged "coordinate" (dx, dv, dp, dw) and
"adapted" (the connection-induced splitting; printed Ex, Ev, Ep, Ew).
Multivector fields live in the adapted frame basis only.

Sign conventions, fixed once and used everywhere:

* wedge sorts merged labels and picks up the transposition parity;
* ``hook`` with a single vector fills the FIRST argument slot of the form;
* ``hook`` with a decomposable multivector xi_1 ^ ... ^ xi_k nests
  right-to-left:  hook(X, a) = a(xi_k, ..., xi_1, . , ...), i.e.
  hook(xi ^ eta, a) = hook(xi, hook(eta, a)).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .coeffring import Coord, Poly, coord_key

Blade = tuple  # tuple[Coord, ...], strictly increasing under coord_key

ADAPTED = "adapted"
COORDINATE = "coordinate"

_VERTICAL_KINDS = ("v", "p", "w")


def sort_labels(labels: Iterable[Coord]) -> tuple[int, Blade | None]:
    """Sort labels into a canonical blade.

    Returns (sign, blade); sign is the parity of the sorting permutation and
    is 0 (with blade None) when a label repeats.
    """
    out: list = []
    sign = 1
    for label in labels:
        key = coord_key(label)
        pos = len(out)
        while pos > 0 and coord_key(out[pos - 1]) > key:
            pos -= 1
        if pos > 0 and coord_key(out[pos - 1]) == key:
            return 0, None
        if (len(out) - pos) % 2 == 1:
            sign = -sign
        out.insert(pos, label)
    return sign, tuple(out)


def merge_blades(b1: Blade, b2: Blade) -> tuple[int, Blade | None]:
    """Merge two canonical blades, returning (sign, blade) or (0, None)."""
    out: list = []
    sign = 1
    i = j = 0
    while i < len(b1) and j < len(b2):
        k1, k2 = coord_key(b1[i]), coord_key(b2[j])
        if k1 == k2:
            return 0, None
        if k1 < k2:
            out.append(b1[i])
            i += 1
        else:
            if (len(b1) - i) % 2 == 1:
                sign = -sign
            out.append(b2[j])
            j += 1
    out.extend(b1[i:])
    out.extend(b2[j:])
    return sign, tuple(out)


def _label_str(label: Coord, basis: str, vector: bool) -> str:
    from .coeffring import coord_name

    name = coord_name(label)
    if vector:
        return f"e_{name}"
    return ("E" if basis == ADAPTED else "d") + name


class _BladeLinear:
    """Shared behaviour of GradedForm and MultiVector: a free module over
    Poly with canonical blade keys."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Blade, Poly] | None = None):
        canonical = {}
        if terms:
            for blade, coeff in terms.items():
                if not coeff.is_zero:
                    canonical[blade] = coeff
        self.terms = canonical

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> list:
        return sorted({len(b) for b in self.terms})

    def homogeneous_degree(self) -> int | None:
        """Blade length if homogeneous (zero counts as any degree -> None)."""
        degs = self.degrees()
        return degs[0] if len(degs) == 1 else None

    def coefficient(self, blade: Blade) -> Poly:
        return self.terms.get(blade, Poly.zero())

    def _terms_added(self, other) -> dict:
        out = dict(self.terms)
        for blade, coeff in other.terms.items():
            out[blade] = out.get(blade, Poly.zero()) + coeff
        return out

    def _terms_scaled(self, factor) -> dict:
        if isinstance(factor, (int, Fraction)):
            factor = Poly.const(factor)
        return {b: factor * c for b, c in self.terms.items()}

    def sorted_blades(self) -> list:
        return sorted(self.terms, key=lambda b: (len(b), tuple(map(coord_key, b))))


class GradedForm(_BladeLinear):
    """Exterior form with Poly coefficients over a tagged coframe basis."""

    __slots__ = ("basis",)

    def __init__(self, basis: str, terms: Mapping[Blade, Poly] | None = None):
        if basis not in (ADAPTED, COORDINATE):
            raise ValueError(f"unknown basis tag {basis!r}")
        super().__init__(terms)
        self.basis = basis

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, basis: str = ADAPTED) -> "GradedForm":
        return cls(basis)

    @classmethod
    def scalar(cls, value, basis: str = ADAPTED) -> "GradedForm":
        if isinstance(value, (int, Fraction)):
            value = Poly.const(value)
        return cls(basis, {(): value})

    @classmethod
    def coform(cls, label: Coord, basis: str = ADAPTED) -> "GradedForm":
        return cls(basis, {(label,): Poly.const(1)})

    @classmethod
    def blade(cls, labels: Iterable[Coord], coeff=1, basis: str = ADAPTED) -> "GradedForm":
        if isinstance(coeff, (int, Fraction)):
            coeff = Poly.const(coeff)
        sign, blade = sort_labels(labels)
        if sign == 0 or coeff.is_zero:
            return cls(basis)
        return cls(basis, {blade: sign * coeff})

    # -- linear structure ----------------------------------------------------

    def _check_same_basis(self, other: "GradedForm"):
        if self.basis != other.basis:
            raise ValueError("basis mismatch: combine forms in one basis first")

    def __add__(self, other) -> "GradedForm":
        if not isinstance(other, GradedForm):
            return NotImplemented
        self._check_same_basis(other)
        return GradedForm(self.basis, self._terms_added(other))

    def __sub__(self, other) -> "GradedForm":
        return self + (-other)

    def __neg__(self) -> "GradedForm":
        return GradedForm(self.basis, {b: -c for b, c in self.terms.items()})

    def __mul__(self, factor) -> "GradedForm":
        if not isinstance(factor, (int, Fraction, Poly)):
            return NotImplemented
        return GradedForm(self.basis, self._terms_scaled(factor))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedForm):
            return NotImplemented
        if self.is_zero and other.is_zero:
            return True
        return self.basis == other.basis and self.terms == other.terms

    __hash__ = None

    # -- structure ------------------------------------------------------------

    def bidegree_of_blade(self, blade: Blade) -> tuple[int, int]:
        vertical = sum(1 for lbl in blade if lbl[0] in _VERTICAL_KINDS)
        return vertical, len(blade) - vertical

    def is_horizontal(self) -> bool:
        return all(lbl[0] == "x" for b in self.terms for lbl in b)

    def __str__(self) -> str:
        return _render(self, vector=False)

    def __repr__(self) -> str:
        return f"GradedForm[{self.basis}]({self})"


class MultiVector(_BladeLinear):
    """Exterior multivector field over the adapted frame basis."""

    __slots__ = ()

    @classmethod
    def zero(cls) -> "MultiVector":
        return cls()

    @classmethod
    def scalar(cls, value) -> "MultiVector":
        if isinstance(value, (int, Fraction)):
            value = Poly.const(value)
        return cls({(): value})

    @classmethod
    def vector(cls, label: Coord, coeff=1) -> "MultiVector":
        if isinstance(coeff, (int, Fraction)):
            coeff = Poly.const(coeff)
        return cls({(label,): coeff})

    @classmethod
    def blade(cls, labels: Iterable[Coord], coeff=1) -> "MultiVector":
        if isinstance(coeff, (int, Fraction)):
            coeff = Poly.const(coeff)
        sign, blade = sort_labels(labels)
        if sign == 0 or coeff.is_zero:
            return cls()
        return cls({blade: sign * coeff})

    def __add__(self, other) -> "MultiVector":
        if not isinstance(other, MultiVector):
            return NotImplemented
        return MultiVector(self._terms_added(other))

    def __sub__(self, other) -> "MultiVector":
        return self + (-other)

    def __neg__(self) -> "MultiVector":
        return MultiVector({b: -c for b, c in self.terms.items()})

    def __mul__(self, factor) -> "MultiVector":
        if not isinstance(factor, (int, Fraction, Poly)):
            return NotImplemented
        return MultiVector(self._terms_scaled(factor))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiVector):
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    def __str__(self) -> str:
        return _render(self, vector=True)

    def __repr__(self) -> str:
        return f"MultiVector({self})"


# -- products ---------------------------------------------------------------


def wedge(a, b):
    """Exterior product; both arguments forms (same basis) or multivectors."""
    if isinstance(a, GradedForm) and isinstance(b, GradedForm):
        a._check_same_basis(b)
        out: dict = {}
        make = lambda t: GradedForm(a.basis, t)
    elif isinstance(a, MultiVector) and isinstance(b, MultiVector):
        out = {}
        make = MultiVector
    else:
        raise TypeError("wedge needs two forms or two multivectors")
    for b1, c1 in a.terms.items():
        for b2, c2 in b.terms.items():
            sign, blade = merge_blades(b1, b2)
            if sign == 0:
                continue
            out[blade] = out.get(blade, Poly.zero()) + sign * (c1 * c2)
    return make(out)


def _hook_label(label: Coord, form: GradedForm) -> GradedForm:
    """Interior product with a single basis vector, filling the first slot."""
    out: dict = {}
    for blade, coeff in form.terms.items():
        for idx, lbl in enumerate(blade):
            if lbl == label:
                rest = blade[:idx] + blade[idx + 1:]
                sign = -1 if idx % 2 else 1
                out[rest] = out.get(rest, Poly.zero()) + sign * coeff
                break
    return GradedForm(form.basis, out)


def _hook_blade(vblade: Blade, form: GradedForm) -> GradedForm:
    """Nested insertion of a vector blade, rightmost factor first."""
    result = form
    for label in reversed(vblade):
        if result.is_zero:
            break
        result = _hook_label(label, result)
    return result


def hook(x: MultiVector, a: GradedForm) -> GradedForm:
    """Interior product X _| a in the adapted basis, extended bilinearly."""
    if not isinstance(x, MultiVector):
        raise TypeError("hook expects a MultiVector on the left")
    if a.basis != ADAPTED:
        raise ValueError("hook is defined over the adapted basis")
    result = GradedForm.zero(ADAPTED)
    for vblade, vcoeff in x.terms.items():
        partial = _hook_blade(vblade, a)
        if not partial.is_zero:
            result = result + vcoeff * partial
    return result


def d(a: GradedForm, setup=None) -> GradedForm:
    """Full exterior derivative in the coordinate basis.

    Adapted input is converted first, which requires the setup.
    """
    if a.basis == ADAPTED:
        if setup is None:
            raise ValueError("adapted input needs the setup for conversion")
        a = change_basis(a, COORDINATE, setup)
    out = GradedForm.zero(COORDINATE)
    for blade, coeff in a.terms.items():
        for coord in sorted(coeff.variables(), key=coord_key):
            if coord[0] == "j":
                raise ValueError("jet velocities have no place on phase space")
            partial = coeff.diff(coord)
            out = out + wedge(GradedForm.coform(coord, COORDINATE),
                              GradedForm(COORDINATE, {blade: partial}))
    return out


def change_basis(a: GradedForm, target: str, setup) -> GradedForm:
    """Rewrite a form on the other coframe basis; exact, round-trip identity."""
    if target not in (ADAPTED, COORDINATE):
        raise ValueError(f"unknown basis tag {target!r}")
    if a.basis == target:
        return a
    frame = setup.frame()
    expand = (frame.coframe_in_coordinate if target == COORDINATE
              else frame.coordinate_coform_in_adapted)
    out = GradedForm.zero(target)
    for blade, coeff in a.terms.items():
        term = GradedForm.scalar(coeff, target)
        for label in blade:
            term = wedge(term, expand(label))
        out = out + term
    return out


def bidegree_split(a: GradedForm) -> dict:
    """Partition an adapted form by (vertical, horizontal) blade counts."""
    if a.basis != ADAPTED:
        raise ValueError("bidegree bookkeeping lives on the adapted basis")
    parts: dict = {}
    for blade, coeff in a.terms.items():
        key = a.bidegree_of_blade(blade)
        bucket = parts.setdefault(key, {})
        bucket[blade] = coeff
    return {key: GradedForm(ADAPTED, terms) for key, terms in parts.items()}


def bidegree_part(a: GradedForm, vertical: int, horizontal: int) -> GradedForm:
    return bidegree_split(a).get((vertical, horizontal), GradedForm.zero(ADAPTED))


# -- canonical printing -------------------------------------------------------


def _render(obj, vector: bool) -> str:
    if obj.is_zero:
        return "0"
    if list(obj.terms) == [()]:
        return str(obj.terms[()])
    basis = getattr(obj, "basis", ADAPTED)
    pieces = []
    for blade in obj.sorted_blades():
        coeff = obj.terms[blade]
        if not blade:
            text = str(coeff)
            sign = "+"
            if len(coeff.terms) == 1 and text.startswith("-"):
                sign, text = "-", text[1:]
            elif len(coeff.terms) > 1:
                text = f"({text})"
            pieces.append((sign, text))
            continue
        if len(blade) == 1:
            blade_text = _label_str(blade[0], basis, vector)
        else:
            blade_text = "wedge(" + ",".join(
                _label_str(lbl, basis, vector) for lbl in blade) + ")"
        sign = "+"
        if len(coeff.terms) == 1:
            coeff_text = str(coeff)
            if coeff_text.startswith("-"):
                sign, coeff_text = "-", coeff_text[1:]
            text = blade_text if coeff_text == "1" else f"{coeff_text}*{blade_text}"
        else:
            text = f"({coeff})*{blade_text}"
        pieces.append((sign, text))
    sign, first = pieces[0]
    out = ("-" if sign == "-" else "") + first
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out
