"""Setup-document and expression parsing, canonical rendering.

Documents are line-oriented sectioned text:

    [setup]
    base_dim = 2
    fiber_dim = 1

    [connection.gamma]      # entries A,i,B = "<poly in x>"; absent = zero
    1,1,1 = "3"

    [connection.lambda]     # entries k,i,j = "<poly in x>", i <= j only
    1,1,2 = "x1"

    [forms]                 # named forms, evaluated top to bottom
    Pi  = "p1_1*hook(e_x1, vol) + p2_1*hook(e_x2, vol)"
    Phi = "v1"

    [lagrangian]
    L = "1/2*j1_1^2 + 1/2*j1_2^2"

    [section.sol]
    v1 = "x1"
    p1_1 = "1"
    p2_1 = "0"

Expressions use the shared grammar: polynomial variables x1, v1, p1_2, w,
j1_2; coframe symbols dx1/dv1/dp1_1/dw (coordinate) and Ex1/Ev1/Ep1_1/Ew
(adapted); frame vectors e_x1, e_v1, e_p1_1, e_w; functions wedge(...) and
hook(X, a); the constant vol; operators + - * / ^ with / restricted to
exact constant divisors.  Canonical printing round-trips through this
grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

from .coeffring import Poly, coord_key, coord_name, parse_coord
from .dynamics import Lagrangian, Section
from .exterior import ADAPTED, COORDINATE, GradedForm, MultiVector, wedge, hook
from .geometry import BundleShape, ConnectionData, SetupDescriptor, volume_form


class DocumentError(Exception):
    """Base of all parse-time errors; carries a line:column position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        where = f" at {line}:{col}" if line else ""
        super().__init__(f"{message}{where}")


class ParseError(DocumentError):
    """Malformed syntax."""


class IndexOutOfBoundsError(DocumentError):
    """A coordinate or connection index exceeds the setup bounds."""


class AsymmetricLambdaError(DocumentError):
    """A lambda entry was specified with i > j."""


class UnknownNameError(DocumentError):
    """An identifier resolves to nothing."""


@dataclass
class SessionDocument:
    """A parsed document: setup plus named objects, all validated."""

    setup: SetupDescriptor
    named_forms: dict = dataclass_field(default_factory=dict)
    lagrangian: Lagrangian | None = None
    sections: dict = dataclass_field(default_factory=dict)


# -- expression tokenizer ------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|([-+*/^(),]))")


def _tokenize(text: str, line: int, col0: int) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}",
                             line, col0 + pos + (len(text[pos:]) - len(stripped)))
        col = col0 + m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), col))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), col))
        else:
            tokens.append(("op", m.group(3), col))
        pos = m.end()
    tokens.append(("end", None, col0 + len(text)))
    return tokens


_FORM_LABEL_RE = re.compile(r"^(d|E|e_)(x\d+|v\d+|p\d+_\d+|w)$")


@dataclass
class EvalContext:
    setup: SetupDescriptor
    names: dict
    allowed_kinds: tuple = ("x", "v", "p", "w")
    allow_forms: bool = True


class _ExpressionParser:
    """Recursive-descent evaluator for the shared expression grammar."""

    def __init__(self, tokens: list, ctx: EvalContext, line: int):
        self.tokens = tokens
        self.ctx = ctx
        self.line = line
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect_op(self, op: str):
        kind, value, col = self.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", self.line, col)

    def error(self, message: str, col: int):
        raise ParseError(message, self.line, col)

    # grammar ------------------------------------------------------------

    def parse(self):
        value = self.expr()
        kind, _, col = self.peek()
        if kind != "end":
            self.error("trailing input", col)
        return value

    def expr(self):
        value = self.term()
        while True:
            kind, op, col = self.peek()
            if kind == "op" and op in "+-":
                self.take()
                rhs = self.term()
                value = self.combine(op, value, rhs, col)
            else:
                return value

    def term(self):
        value = self.unary()
        while True:
            kind, op, col = self.peek()
            if kind == "op" and op in "*/":
                self.take()
                rhs = self.unary()
                value = self.combine(op, value, rhs, col)
            else:
                return value

    def unary(self):
        kind, op, col = self.peek()
        if kind == "op" and op == "-":
            self.take()
            return -self.unary()
        if kind == "op" and op == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        value = self.atom()
        kind, op, col = self.peek()
        if kind == "op" and op == "^":
            self.take()
            kind2, exponent, col2 = self.take()
            if kind2 != "int":
                self.error("exponent must be a non-negative integer", col2)
            if not isinstance(value, Poly):
                self.error("only polynomials can be raised to powers", col)
            return value ** exponent
        return value

    def atom(self):
        kind, value, col = self.take()
        if kind == "int":
            return Poly.const(value)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "name":
            return self.resolve_name(value, col)
        self.error("expected a value", col)

    def call_args(self):
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, op, col = self.peek()
            if kind == "op" and op == ",":
                self.take()
                args.append(self.expr())
            else:
                self.expect_op(")")
                return args

    # name and operator semantics -----------------------------------------

    def resolve_name(self, name: str, col: int):
        ctx = self.ctx
        if name == "wedge":
            args = self.call_args()
            if len(args) < 2:
                self.error("wedge takes at least two arguments", col)
            return self.fold_wedge(args, col)
        if name == "hook":
            args = self.call_args()
            if len(args) != 2:
                self.error("hook takes exactly two arguments", col)
            x, a = args
            if isinstance(a, Poly):
                a = GradedForm.scalar(a, ADAPTED)
            if not isinstance(x, MultiVector) or not isinstance(a, GradedForm):
                self.error("hook needs a multivector and a form", col)
            return self.wrap(lambda: hook(x, a), col)
        if name == "vol":
            if not ctx.allow_forms:
                self.error("vol is not available in this context", col)
            return volume_form(ctx.setup, ADAPTED)

        coord = parse_coord(name)
        if coord is not None:
            self.check_coord(coord, col)
            return Poly.var(coord)

        m = _FORM_LABEL_RE.match(name)
        if m is not None:
            if not ctx.allow_forms:
                self.error(f"{name} is not available in this context", col)
            prefix, coord = m.group(1), parse_coord(m.group(2))
            self.check_coord(coord, col, label=True)
            if prefix == "e_":
                return MultiVector.vector(coord)
            basis = ADAPTED if prefix == "E" else COORDINATE
            return GradedForm.coform(coord, basis)

        if name in ctx.names:
            return ctx.names[name]
        raise UnknownNameError(f"unknown name {name!r}", self.line, col)

    def check_coord(self, coord, col: int, label: bool = False):
        ctx = self.ctx
        kind = coord[0]
        allowed = ("x", "v", "p", "w") if label else ctx.allowed_kinds
        if kind not in allowed:
            self.error(f"coordinate {coord_name(coord)} not allowed here", col)
        n1, nf = ctx.setup.base_dim, ctx.setup.fiber_dim
        ok = True
        if kind == "x":
            ok = 1 <= coord[1] <= n1
        elif kind == "v":
            ok = 1 <= coord[1] <= nf
        elif kind == "p":
            ok = 1 <= coord[1] <= n1 and 1 <= coord[2] <= nf
        elif kind == "j":
            ok = 1 <= coord[1] <= nf and 1 <= coord[2] <= n1
        if not ok:
            raise IndexOutOfBoundsError(
                f"{coord_name(coord)} outside the bundle shape "
                f"(base_dim={n1}, fiber_dim={nf})", self.line, col)

    def fold_wedge(self, args: list, col: int):
        if any(isinstance(a, MultiVector) for a in args):
            if not all(isinstance(a, MultiVector) for a in args):
                self.error("wedge cannot mix vectors and forms", col)
            result = args[0]
            for a in args[1:]:
                result = self.wrap(lambda r=result, a=a: wedge(r, a), col)
            return result
        coerced = []
        basis = None
        for a in args:
            if isinstance(a, GradedForm):
                basis = basis or a.basis
        basis = basis or ADAPTED
        for a in args:
            if isinstance(a, Poly):
                a = GradedForm.scalar(a, basis)
            coerced.append(a)
        result = coerced[0]
        for a in coerced[1:]:
            result = self.wrap(lambda r=result, a=a: wedge(r, a), col)
        return result

    def wrap(self, fn, col: int):
        try:
            return fn()
        except (ValueError, TypeError) as exc:
            raise ParseError(str(exc), self.line, col)

    def combine(self, op: str, lhs, rhs, col: int):
        if op == "/":
            if not isinstance(rhs, Poly) or not rhs.is_constant or rhs.is_zero:
                self.error("division only by nonzero exact constants", col)
            factor = Fraction(1) / rhs.as_fraction()
            return self.wrap(lambda: lhs * factor, col)
        if op == "*":
            if isinstance(lhs, Poly) and isinstance(rhs, Poly):
                return lhs * rhs
            if isinstance(lhs, Poly):
                return self.wrap(lambda: rhs * lhs, col)
            if isinstance(rhs, Poly):
                return self.wrap(lambda: lhs * rhs, col)
            self.error("use wedge(...) to multiply forms", col)
        # '+' / '-'
        lhs, rhs = self.coerce_pair(lhs, rhs, col)
        return self.wrap(lambda: lhs + rhs if op == "+" else lhs - rhs, col)

    def coerce_pair(self, lhs, rhs, col: int):
        if isinstance(lhs, Poly) and isinstance(rhs, GradedForm):
            return GradedForm.scalar(lhs, rhs.basis), rhs
        if isinstance(lhs, GradedForm) and isinstance(rhs, Poly):
            return lhs, GradedForm.scalar(rhs, lhs.basis)
        if type(lhs) is not type(rhs) and not (
                isinstance(lhs, Poly) and isinstance(rhs, Poly)):
            self.error("cannot add values of different kinds", col)
        return lhs, rhs


def eval_expression(text: str, ctx: EvalContext, line: int = 0, col0: int = 0):
    tokens = _tokenize(text, line, col0)
    return _ExpressionParser(tokens, ctx, line).parse()


def parse_poly(text: str, setup: SetupDescriptor, allowed_kinds: tuple,
               line: int = 0, col0: int = 0) -> Poly:
    ctx = EvalContext(setup, {}, allowed_kinds=allowed_kinds, allow_forms=False)
    value = eval_expression(text, ctx, line, col0)
    if not isinstance(value, Poly):
        raise ParseError("expected a polynomial", line, col0)
    return value


# -- document parsing ----------------------------------------------------------


def _strip_comment(line: str) -> str:
    out = []
    quoted = False
    for ch in line:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


_SECTION_RE = re.compile(r"^\[([a-z_.]+(?:\.[A-Za-z_][A-Za-z0-9_]*)?)\]$")
_ENTRY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*|\d+(?:,\d+)*)\s*=\s*(.*)$")


def _unquote(raw: str, line_no: int, col: int) -> tuple[str, int]:
    raw = raw.strip()
    if len(raw) < 2 or not raw.startswith('"') or not raw.endswith('"'):
        raise ParseError("expected a double-quoted expression", line_no, col)
    return raw[1:-1], col + 1


def parse_document(text: str) -> SessionDocument:
    """Parse and fully validate a setup document."""
    sections: list = []
    current = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m is not None:
            current = (m.group(1), [])
            sections.append(current)
            continue
        if current is None:
            raise ParseError("entry outside any section", line_no, 1)
        m = _ENTRY_RE.match(line)
        if m is None:
            raise ParseError("expected `key = value`", line_no, 1)
        current[1].append((line_no, m.group(1),
                           raw.index("=") + 2, m.group(2).strip()))

    by_name: dict = {}
    for name, entries in sections:
        if name in by_name:
            raise ParseError(f"duplicate section [{name}]",
                             entries[0][0] if entries else 0, 1)
        by_name[name] = entries

    if "setup" not in by_name:
        raise ParseError("missing [setup] section", 1, 1)
    dims = {}
    for line_no, key, col, value in by_name.pop("setup"):
        if key not in ("base_dim", "fiber_dim"):
            raise ParseError(f"unknown setup key {key!r}", line_no, 1)
        if not value.isdigit():
            raise ParseError(f"{key} must be a positive integer", line_no, col)
        dims[key] = int(value)
    for key in ("base_dim", "fiber_dim"):
        if key not in dims:
            raise ParseError(f"missing {key} in [setup]", 1, 1)
    try:
        shape = BundleShape(dims["base_dim"], dims["fiber_dim"])
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1)

    bare = SetupDescriptor(shape)  # bounds checks for connection entries

    def parse_indices(key: str, count: int, line_no: int) -> tuple:
        parts = key.split(",")
        if len(parts) != count or not all(p.isdigit() for p in parts):
            raise ParseError(f"expected {count} comma-separated indices",
                             line_no, 1)
        return tuple(int(p) for p in parts)

    gamma = {}
    for line_no, key, col, value in by_name.pop("connection.gamma", []):
        a, i, b = parse_indices(key, 3, line_no)
        if not (1 <= a <= shape.fiber_dim and 1 <= b <= shape.fiber_dim
                and 1 <= i <= shape.base_dim):
            raise IndexOutOfBoundsError(
                f"gamma index ({a},{i},{b}) out of bounds", line_no, 1)
        if (a, i, b) in gamma:
            raise ParseError(f"duplicate gamma entry {key}", line_no, 1)
        body, col1 = _unquote(value, line_no, col)
        gamma[(a, i, b)] = parse_poly(body, bare, ("x",), line_no, col1)

    lam = {}
    for line_no, key, col, value in by_name.pop("connection.lambda", []):
        k, i, j = parse_indices(key, 3, line_no)
        if not all(1 <= idx <= shape.base_dim for idx in (k, i, j)):
            raise IndexOutOfBoundsError(
                f"lambda index ({k},{i},{j}) out of bounds", line_no, 1)
        if i > j:
            raise AsymmetricLambdaError(
                f"lambda entries are given for i <= j only, got ({k},{i},{j})",
                line_no, 1)
        if (k, i, j) in lam:
            raise ParseError(f"duplicate lambda entry {key}", line_no, 1)
        body, col1 = _unquote(value, line_no, col)
        lam[(k, i, j)] = parse_poly(body, bare, ("x",), line_no, col1)

    setup = SetupDescriptor(shape, ConnectionData(gamma, lam))
    doc = SessionDocument(setup=setup)

    for line_no, key, col, value in by_name.pop("forms", []):
        if key in doc.named_forms:
            raise ParseError(f"duplicate form name {key!r}", line_no, 1)
        body, col1 = _unquote(value, line_no, col)
        ctx = EvalContext(setup, doc.named_forms)
        result = eval_expression(body, ctx, line_no, col1)
        if isinstance(result, MultiVector):
            raise ParseError("a multivector field is not a form", line_no, col1)
        doc.named_forms[key] = result

    for line_no, key, col, value in by_name.pop("lagrangian", []):
        if key != "L":
            raise ParseError("the [lagrangian] section has a single key L",
                             line_no, 1)
        if doc.lagrangian is not None:
            raise ParseError("duplicate Lagrangian", line_no, 1)
        body, col1 = _unquote(value, line_no, col)
        density = parse_poly(body, setup, ("x", "v", "j"), line_no, col1)
        doc.lagrangian = Lagrangian(density)

    for name in list(by_name):
        if not name.startswith("section."):
            raise ParseError(f"unknown section [{name}]", 1, 1)
        section_name = name.split(".", 1)[1]
        fields: dict = {}
        momenta: dict = {}
        for line_no, key, col, value in by_name.pop(name):
            coord = parse_coord(key)
            body, col1 = _unquote(value, line_no, col)
            poly = parse_poly(body, setup, ("x",), line_no, col1)
            if coord is not None and coord[0] == "v":
                if not 1 <= coord[1] <= shape.fiber_dim:
                    raise IndexOutOfBoundsError(f"{key} out of bounds", line_no, 1)
                fields[coord[1]] = poly
            elif coord is not None and coord[0] == "p":
                if not (1 <= coord[1] <= shape.base_dim
                        and 1 <= coord[2] <= shape.fiber_dim):
                    raise IndexOutOfBoundsError(f"{key} out of bounds", line_no, 1)
                momenta[(coord[1], coord[2])] = poly
            else:
                raise ParseError(
                    f"section keys are field (v1) or momentum (p1_1) names, "
                    f"got {key!r}", line_no, 1)
        doc.sections[section_name] = Section(
            fields=fields, momenta=momenta or None)

    return doc


# -- canonical document rendering ----------------------------------------------


def render_document(setup: SetupDescriptor,
                    forms: dict | None = None,
                    lagrangian: Lagrangian | None = None,
                    sections: dict | None = None,
                    header: str | None = None) -> str:
    """Render a document in the canonical diffable format; everything the
    parser accepts round-trips through this."""
    lines = []
    if header:
        for row in header.splitlines():
            lines.append(f"# {row}")
    lines += ["[setup]",
              f"base_dim = {setup.base_dim}",
              f"fiber_dim = {setup.fiber_dim}"]
    if setup.conn.gamma:
        lines.append("")
        lines.append("[connection.gamma]")
        for (a, i, b) in sorted(setup.conn.gamma):
            lines.append(f'{a},{i},{b} = "{setup.conn.gamma[(a, i, b)]}"')
    upper = {key: poly for key, poly in setup.conn.lam.items()
             if key[1] <= key[2]}
    if upper:
        lines.append("")
        lines.append("[connection.lambda]")
        for (k, i, j) in sorted(upper):
            lines.append(f'{k},{i},{j} = "{upper[(k, i, j)]}"')
    if forms:
        lines.append("")
        lines.append("[forms]")
        for name, value in forms.items():
            lines.append(f'{name} = "{value}"')
    if lagrangian is not None:
        lines.append("")
        lines.append("[lagrangian]")
        lines.append(f'L = "{lagrangian.density}"')
    for name, section in (sections or {}).items():
        lines.append("")
        lines.append(f"[section.{name}]")
        for a in sorted(section.fields):
            lines.append(f'v{a} = "{section.fields[a]}"')
        for (i, a) in sorted(section.momenta or {}):
            lines.append(f'p{i}_{a} = "{section.momenta[(i, a)]}"')
    return "\n".join(lines) + "\n"
