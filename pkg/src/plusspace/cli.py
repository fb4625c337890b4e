"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 bad arguments, 3 computation
error.  Elements are given in square-root coordinates: ``u,v`` means u + v sqrt(d).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .base_field import BaseField, FieldElement, format_element, make_field
from .class_group import compute_class_group
from .cyclotomic import CycRat

EXIT_OK, EXIT_VERIFY, EXIT_ARGS, EXIT_COMPUTE = 0, 1, 2, 3


class ArgumentError(Exception):
    pass


def _field(d: int) -> BaseField:
    try:
        return make_field(d)
    except (TypeError, ValueError) as exc:
        raise ArgumentError(str(exc)) from None


def _element(F: BaseField, text: str) -> FieldElement:
    try:
        parts = [Fraction(x.strip()) for x in text.split(",")]
    except ValueError:
        raise ArgumentError(f"cannot parse element {text!r}; expected u or u,v") from None
    if len(parts) == 1:
        parts.append(Fraction(0))
    if len(parts) != 2 or (F.degree == 1 and parts[1] != 0):
        raise ArgumentError(f"cannot parse element {text!r}; expected u or u,v")
    return F.from_sqrt(parts[0], parts[1]) if F.degree == 2 else F.elt(parts[0])


def _chi(F: BaseField, j: int):
    G = compute_class_group(F)
    if not 0 <= j < G.h:
        raise ArgumentError(f"character index {j} out of range 0..{G.h - 1}")
    return G.character(j)


def _positive(name: str, value: int, minimum: int = 1) -> int:
    if value < minimum:
        raise ArgumentError(f"--{name} must be at least {minimum}")
    return value


def _value_text(v: CycRat) -> str:
    return str(v.to_rational()) if v.is_rational() else str(v)


def _qexp_table(Q, scale: int) -> str:
    rows = [("xi", "trace", "norm", "coefficient")]
    for xi, c in Q.items():
        rows.append((format_element(xi), str(xi.trace()), str(xi.norm()), _value_text(c * scale)))
    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    head = f"# {Q.label}, trace <= {Q.trace_bound}" + (f", scaled by {scale}" if scale != 1 else "")
    lines = [head]
    for r in rows:
        lines.append("  ".join(s.rjust(w) for s, w in zip(r, widths)))
    return "\n".join(lines)


def _emit(args, doc: dict, table: Optional[str] = None) -> None:
    if args.format == "table" and table is not None:
        text = table + "\n"
    else:
        text = json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# subcommands


def cmd_field(args) -> int:
    F = _field(args.field)
    G = compute_class_group(F)
    doc = {"kind": F.kind, "D": F.D, "discriminant": F.disc, "omega": F.omega_desc,
           "fundamental_unit": format_element(F.fund_unit),
           "totally_positive_unit": format_element(F.tp_unit),
           "different_generator": format_element(F.different_gen),
           "class_number": G.h}
    table = "\n".join(f"{k}: {v}" for k, v in doc.items())
    _emit(args, doc, table)
    return EXIT_OK


def cmd_classgroup(args) -> int:
    F = _field(args.field)
    G = compute_class_group(F)
    chars = G.characters()
    reps = [A.to_json() for A in G.reps]
    table_vals = [[_value_text(ch.value_on_class(i)) for i in range(G.h)] for ch in chars]
    doc = {"h": G.h, "cycle_structure": list(G.cycle_structure), "representatives": reps,
           "characters": table_vals}
    lines = [f"h = {G.h}, cycles {list(G.cycle_structure)}"]
    for j, row in enumerate(table_vals):
        lines.append(f"chi_{j}: " + "  ".join(row))
    _emit(args, doc, "\n".join(lines))
    return EXIT_OK


def _jsonable(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def cmd_eisenstein(args) -> int:
    from .eisenstein import EisensteinSpec, eisenstein_qexpansion
    F = _field(args.field)
    _positive("kappa", args.kappa)
    _positive("trace-bound", args.trace_bound)
    chi = _chi(F, args.chi)
    spec = EisensteinSpec(F, args.kappa, chi)
    Q = eisenstein_qexpansion(spec, args.trace_bound)
    _emit(args, Q.to_json(args.scale), _qexp_table(Q, args.scale))
    return EXIT_OK


def cmd_cohen(args) -> int:
    from .eisenstein import cohen_coefficient
    if args.r < 2:
        raise ArgumentError("--r must be at least 2")
    if args.n_max < 0:
        raise ArgumentError("--n-max must be non-negative")
    vals = [cohen_coefficient(args.r, n) for n in range(args.n_max + 1)]
    doc = {"r": args.r, "coefficients": [_jsonable(v * args.scale) for v in vals]}
    table = "\n".join(f"H({args.r},{n}) = {v * args.scale}" for n, v in enumerate(vals))
    _emit(args, doc, table)
    return EXIT_OK


def cmd_lvalue(args) -> int:
    from .lvalues import CharacterSpec, hecke_L_exact, hecke_L_numeric
    F = _field(args.field)
    _positive("kappa", args.kappa)
    chi = _chi(F, args.chi)
    xi = _element(F, args.xi) if args.xi else None
    spec = CharacterSpec(F, xi, chi, args.conjugate)
    doc = {"field": F.D or 0, "kappa": args.kappa, "s": 1 - args.kappa, "chi": args.chi,
           "xi": format_element(xi) if xi is not None else None}
    if args.backend == "exact":
        val = hecke_L_exact(F, args.kappa, spec)
        doc["value"] = (val * args.scale).to_json()
        table = f"L(1-{args.kappa}) = {_value_text(val * args.scale)}"
    else:
        num = hecke_L_numeric(F, args.kappa, spec, args.terms)
        doc["value"] = [num.value.real * args.scale, num.value.imag * args.scale]
        doc["error_bound"] = num.error_bound * args.scale
        doc["terms"] = num.terms
        table = f"L(1-{args.kappa}) ~ {num.value * args.scale} (+/- {num.error_bound * args.scale:.2e})"
    _emit(args, doc, table)
    return EXIT_OK


def cmd_hecke(args) -> int:
    from .eisenstein import EisensteinSpec, eisenstein_qexpansion, hecke_T_plus, hecke_eigenvalue
    F = _field(args.field)
    _positive("kappa", args.kappa)
    _positive("trace-bound", args.trace_bound)
    chi = _chi(F, args.chi)
    alpha = _element(F, args.alpha)
    spec = EisensteinSpec(F, args.kappa, chi)
    G = eisenstein_qexpansion(spec, args.trace_bound)
    H = hecke_T_plus(spec, alpha, G)
    lam = hecke_eigenvalue(spec, alpha)
    eigen = all(H.coefficient(x) == G.coefficient(x) * lam for x in H.indices())
    doc = H.to_json(args.scale)
    doc["expected_eigenvalue"] = lam
    doc["is_eigenvector"] = eigen
    table = _qexp_table(H, args.scale) + f"\neigenvalue {lam}: {'yes' if eigen else 'no'}"
    _emit(args, doc, table)
    return EXIT_OK


def cmd_local(args) -> int:
    from . import local_oracle as lo
    p = args.p
    import sympy
    if not sympy.isprime(p):
        raise ArgumentError("--p must be prime")
    ctx = lo.PadicContext(p)
    if args.check == "unit-integrals":
        u1, u2 = lo.unit_integrals(ctx)
        doc = {"p": p, "units": u1.to_json(), "shifted_units": u2.to_json()}
    elif args.check == "hilbert":
        doc = {"p": p, "a": str(args.a), "b": str(args.b),
               "symbol": lo.hilbert_symbol(p, Fraction(args.a), Fraction(args.b))}
    elif args.check == "weil":
        doc = {"p": p, "a": str(args.a), "alpha": lo.weil_constant(ctx, Fraction(args.a)).to_json()}
    elif args.check == "whittaker":
        fctx = lo.PadicContext(p, exact=False)
        W, P = lo.whittaker_vs_psi(fctx, Fraction(args.xi), args.s)
        doc = {"p": p, "xi": str(args.xi), "s": args.s, "integral": [W.real, W.imag],
               "psi": [complex(P).real, complex(P).imag], "agree": abs(W - P) < 1e-9}
    elif args.check == "constant":
        fctx = lo.PadicContext(p, exact=False)
        c = lo.constant_integral(fctx, args.s)
        want = (1 - p ** (-2 * args.s - 1)) / (1 - p ** (-2 * args.s))
        doc = {"p": p, "s": args.s, "integral": c.real, "closed_form": want,
               "agree": abs(c - want) < 1e-9}
    else:
        rep = lo.convolve_idempotent_check(ctx, args.levels, args.samples)
        doc = {"p": p, "levels": rep.levels,
               "max_deviation": {str(k): v for k, v in rep.max_deviation.items()},
               "stable": rep.stable, "ok": rep.ok}
    _emit(args, doc, "\n".join(f"{k}: {v}" for k, v in doc.items()))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES
    results = [check() for check in SUITES[args.suite]]
    doc = {"suite": args.suite,
           "results": [{"check": r.key, "location": r.location, "passed": r.passed,
                        "detail": r.detail} for r in results]}
    table = "\n".join(r.line() for r in results)
    _emit(args, doc, table)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plusspace",
                                     description="Plus-space Eisenstein series over Q and real quadratic fields")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, field=True):
        if field:
            p.add_argument("--field", type=int, required=True,
                           help="d for Q(sqrt d) (any d with that squarefree core), 0 for Q")
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--output", help="write to this file instead of stdout")
        p.add_argument("--scale", type=int, default=1, help="integer multiplier applied on output")

    p = sub.add_parser("field", help="field data")
    common(p)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("classgroup", help="class group and character table")
    common(p)
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("eisenstein", help="q-expansion of G_{k+1/2}(z, chi')")
    common(p)
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--chi", type=int, default=0)
    p.add_argument("--trace-bound", type=int, required=True)
    p.set_defaults(func=cmd_eisenstein)

    p = sub.add_parser("cohen", help="Cohen's series H_r over Q")
    common(p, field=False)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_cohen)

    p = sub.add_parser("lvalue", help="L_F(1 - kappa, chi_xi * chi_j)")
    common(p)
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--chi", type=int, default=0)
    p.add_argument("--xi", help="twist u,v meaning u + v sqrt d")
    p.add_argument("--conjugate", action="store_true", help="use the inverse class character")
    p.add_argument("--backend", choices=("exact", "numeric"), default="exact")
    p.add_argument("--terms", type=int, default=200_000)
    p.set_defaults(func=cmd_lvalue)

    p = sub.add_parser("hecke", help="apply T+(alpha^2) to G and test the eigenvalue")
    common(p)
    p.add_argument("--kappa", type=int, required=True)
    p.add_argument("--chi", type=int, default=0)
    p.add_argument("--alpha", required=True, help="u,v meaning u + v sqrt d")
    p.add_argument("--trace-bound", type=int, required=True)
    p.set_defaults(func=cmd_hecke)

    p = sub.add_parser("local", help="local oracle checks over Q_p")
    common(p, field=False)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--check", required=True,
                   choices=("unit-integrals", "hilbert", "weil", "whittaker", "constant",
                            "idempotence"))
    p.add_argument("--a", default="1")
    p.add_argument("--b", default="1")
    p.add_argument("--xi", default="1")
    p.add_argument("--s", type=float, default=1.25)
    p.add_argument("--levels", type=int, nargs="+", default=[3, 4])
    p.add_argument("--samples", type=int, default=20)
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("verify", help="run a reproduction suite")
    common(p, field=False)
    p.add_argument("suite", choices=("paper-example", "structure", "local", "all"))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (ValueError, ArithmeticError, RuntimeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
