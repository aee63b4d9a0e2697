"""Command-line front end: document loading, command dispatch, canonical
text/JSON output, and the verification harness driver.

Exit codes: 0 success, 1 mathematical rejection (not Hamiltonian, not
closed, degenerate Lagrangian, failing verification), 2 usage or parse
error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import dynamics
from .coeffring import Poly
from .exterior import ADAPTED, GradedForm, MultiVector, change_basis, d
from .hamiltonian import (NotHamiltonian, bullet, is_hamiltonian,
                          poisson_bracket, solve_hmvf)
from .harness import PROPERTY_NAMES, Bounds, render_report, run_property
from .parser import DocumentError, SessionDocument, parse_document
from .vertcalc import NotClosed, NotExact, dv, dv_potential

MATH_ERRORS = (NotHamiltonian, NotClosed, NotExact,
               dynamics.DegenerateLagrangian, dynamics.MissingMomenta)


class UsageError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.output == "json":
        print(json.dumps(payload, sort_keys=True, separators=(", ", ": ")))
    else:
        print(text)


def _load_document(args) -> SessionDocument:
    if not args.file:
        raise UsageError("this command needs --file <document>")
    try:
        with open(args.file, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc}")
    return parse_document(text)


def _named_form(doc: SessionDocument, name: str):
    if name not in doc.named_forms:
        raise UsageError(f"no form named {name!r} in the document "
                         f"(have: {', '.join(sorted(doc.named_forms)) or 'none'})")
    return doc.named_forms[name]


def _named_section(doc: SessionDocument, name: str):
    if name not in doc.sections:
        raise UsageError(f"no section named {name!r} in the document")
    return doc.sections[name]


def _as_form(value, basis=ADAPTED) -> GradedForm:
    if isinstance(value, Poly):
        return GradedForm.scalar(value, basis)
    return value


def _ham_payload(ham) -> dict:
    return {
        "degree": ham.degree,
        "coeffs": {",".join(map(str, key)): str(val)
                   for key, val in sorted(ham.coeffs.items())},
        "status": "hamiltonian",
        "text": str(ham),
    }


def _cmd_dv(args, doc):
    result = dv(_as_form(_named_form(doc, args.form)), doc.setup)
    _emit(args, {"text": str(result)}, str(result))


def _cmd_d(args, doc):
    result = d(_as_form(_named_form(doc, args.form), basis="coordinate"),
               doc.setup)
    _emit(args, {"text": str(result)}, str(result))


def _cmd_potential(args, doc):
    result = dv_potential(_as_form(_named_form(doc, args.form)), doc.setup)
    _emit(args, {"text": str(result)}, str(result))


def _cmd_is_hamiltonian(args, doc):
    ham = is_hamiltonian(_named_form(doc, args.form), doc.setup)
    text = f"hamiltonian: degree {ham.degree}, {len(ham.coeffs)} coefficient(s)"
    for key, val in sorted(ham.coeffs.items()):
        text += f"\nF[{','.join(map(str, key))}] = {val}"
    _emit(args, _ham_payload(ham), text)


def _cmd_hmvf(args, doc):
    ham = is_hamiltonian(_named_form(doc, args.form), doc.setup)
    x = solve_hmvf(ham, doc.setup)
    _emit(args, {"degree": ham.degree, "text": str(x), "status": "hamiltonian"},
          str(x))


def _cmd_bracket(args, doc):
    f = is_hamiltonian(_named_form(doc, args.left), doc.setup)
    g = is_hamiltonian(_named_form(doc, args.right), doc.setup)
    result = poisson_bracket(f, g, doc.setup)
    _emit(args, _ham_payload(result), str(result))


def _cmd_bullet(args, doc):
    f = is_hamiltonian(_named_form(doc, args.left), doc.setup)
    g = is_hamiltonian(_named_form(doc, args.right), doc.setup)
    result = bullet(f, g, doc.setup)
    _emit(args, _ham_payload(result), str(result))


def _cmd_legendre(args, doc):
    if doc.lagrangian is None:
        raise UsageError("the document has no [lagrangian] section")
    ham = dynamics.legendre(doc.lagrangian, doc.setup)
    lines = [f"H = {ham.h}"]
    velocity = {}
    for (a, i) in sorted(ham.velocity_solution):
        lines.append(f"phi{a}_{i} = {ham.velocity_solution[(a, i)]}")
        velocity[f"{a},{i}"] = str(ham.velocity_solution[(a, i)])
    _emit(args, {"h": str(ham.h), "velocity": velocity}, "\n".join(lines))


def _cmd_el_residual(args, doc):
    if doc.lagrangian is None:
        raise UsageError("the document has no [lagrangian] section")
    section = _named_section(doc, args.section)
    residual = dynamics.el_residual(doc.lagrangian, section, doc.setup)
    lines = [f"E{a} = {residual[a]}" for a in sorted(residual)]
    _emit(args, {"residual": {str(a): str(residual[a]) for a in residual}},
          "\n".join(lines))


def _cmd_ham_residual(args, doc):
    if doc.lagrangian is None:
        raise UsageError("the document has no [lagrangian] section")
    section = _named_section(doc, args.section)
    ham = dynamics.legendre(doc.lagrangian, doc.setup)
    res = dynamics.hamilton_residual(ham, section, doc.setup)
    lines = [f"field{a} = {res.field_eqs[a]}" for a in sorted(res.field_eqs)]
    lines += [f"momentum{i}_{a} = {res.momentum_eqs[(i, a)]}"
              for (i, a) in sorted(res.momentum_eqs)]
    payload = {
        "field": {str(a): str(p) for a, p in res.field_eqs.items()},
        "momentum": {f"{i},{a}": str(p)
                     for (i, a), p in res.momentum_eqs.items()},
    }
    _emit(args, payload, "\n".join(lines))


def _cmd_verify(args, _doc):
    bounds = Bounds(base_dim=args.base_dim, fiber_dim=args.fiber_dim)
    seed = args.verify_seed if args.verify_seed is not None else args.seed
    report = run_property(args.property, args.trials, seed, bounds)
    if args.output == "json":
        payload = {
            "property": report.property,
            "trials": report.trials,
            "seed": report.seed,
            "failures": [{"trial": f.trial, "seed": f.seed,
                          "counterexample": f.counterexample}
                         for f in report.failures],
            "result": "PASS" if report.passed else "FAIL",
        }
        print(json.dumps(payload, sort_keys=True, separators=(", ", ": ")))
    else:
        sys.stdout.write(render_report(report))
    return 0 if report.passed else 1


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msc",
        description="Exact calculus on multisymplectic phase spaces")
    parser.add_argument("--file", help="setup document to load")
    parser.add_argument("--output", choices=("text", "json"), default="text")
    parser.add_argument("--seed", type=int, default=0,
                        help="master seed for randomized commands")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler, about in (
            ("dv", _cmd_dv, "vertical exterior derivative of a named form"),
            ("d", _cmd_d, "full exterior derivative of a named form"),
            ("potential", _cmd_potential, "dv-potential of a closed form")):
        p = sub.add_parser(name, help=about)
        p.add_argument("form")
        p.set_defaults(handler=handler, needs_doc=True)

    p = sub.add_parser("is-hamiltonian", help="validate a named form")
    p.add_argument("form")
    p.set_defaults(handler=_cmd_is_hamiltonian, needs_doc=True)

    p = sub.add_parser("hmvf", help="canonical Hamiltonian multivector field")
    p.add_argument("form")
    p.set_defaults(handler=_cmd_hmvf, needs_doc=True)

    for name, handler, about in (
            ("bracket", _cmd_bracket, "graded Poisson bracket of two forms"),
            ("bullet", _cmd_bullet, "bullet product of two forms")):
        p = sub.add_parser(name, help=about)
        p.add_argument("left")
        p.add_argument("right")
        p.set_defaults(handler=handler, needs_doc=True)

    p = sub.add_parser("legendre", help="covariant Legendre transform")
    p.set_defaults(handler=_cmd_legendre, needs_doc=True)

    p = sub.add_parser("el-residual", help="Euler-Lagrange residual on a section")
    p.add_argument("section")
    p.set_defaults(handler=_cmd_el_residual, needs_doc=True)

    p = sub.add_parser("ham-residual", help="Hamilton residuals on a section")
    p.add_argument("section")
    p.set_defaults(handler=_cmd_ham_residual, needs_doc=True)

    p = sub.add_parser("verify", help="run a randomized property check")
    p.add_argument("--property", required=True, choices=PROPERTY_NAMES)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, dest="verify_seed", default=None,
                   help="overrides the global --seed for this run")
    p.add_argument("--base-dim", type=int, default=2)
    p.add_argument("--fiber-dim", type=int, default=1)
    p.set_defaults(handler=_cmd_verify, needs_doc=False)
    return parser


def main(argv=None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        doc = _load_document(args) if args.needs_doc else None
        return args.handler(args, doc) or 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DocumentError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except MATH_ERRORS as exc:
        if args.output == "json":
            print(json.dumps({"status": "rejected", "reason": str(exc)},
                             sort_keys=True))
        else:
            print(f"rejected: {exc}")
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
