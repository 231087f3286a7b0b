"""Command-line front end.

Exit status: 0 when every check passed, 1 when a check failed, 2 on usage
or input errors.  ``--json`` output is deterministic for a given seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import congruence as cg
from . import modelcheck as mc
from . import numberfield as nf
from . import signexp as sx
from . import theories
from .meadows import Meadow, MeadowError, make_meadow
from .poly import parse_poly
from .term import DEFAULT_SYMBOLS, Equation, parse_equation, parse_equations, parse_term


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def resolve_meadow(desc: str) -> Meadow:
    """make_meadow plus ``signed:[<base>]`` and ``eqex`` for the expansions."""
    desc = desc.strip()
    if desc == "eqex":
        return sx.EqMeadow()
    if desc.startswith("signed:"):
        inner = desc[len("signed:"):]
        if not (inner.startswith("[") and inner.endswith("]")):
            raise MeadowError(f"signed descriptor needs [...]: {desc!r}")
        return sx.SignedMeadow(make_meadow(inner[1:-1]))
    return make_meadow(desc)


def parse_grid(text: str) -> list[Fraction]:
    try:
        return [Fraction(v.strip()) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad grid {text!r}; expected comma-separated rationals") from None


def _symbols(m: Meadow) -> dict[str, int]:
    return {**DEFAULT_SYMBOLS, **m.extra_ops}


def _equations(args, m: Meadow | None = None) -> list[Equation]:
    syms = _symbols(m) if m is not None else None
    consts = list(m.constants) if m is not None else []
    eqs = [parse_equation(t, syms, consts) for t in getattr(args, "equations", []) or []]
    if getattr(args, "file", None):
        _, more = parse_equations(Path(args.file).read_text(encoding="utf-8"), syms)
        eqs += more
    return eqs


def _mode(args, m: Meadow) -> mc.Mode:
    if getattr(args, "grid", None):
        return mc.grid([m.check(v) for v in parse_grid(args.grid)], args.workers)
    if m.finite:
        return mc.Mode("exhaustive", workers=args.workers)
    return mc.sample(args.samples, args.seed)


# ------------------------------------------------------------- subcommands


def cmd_eval(args) -> dict:
    m = resolve_meadow(args.meadow)
    t = parse_term(args.term, _symbols(m), list(m.constants))
    env = {}
    for binding in args.let or []:
        name, sep, val = binding.partition("=")
        if not sep:
            raise ValueError(f"--let expects name=value, got {binding!r}")
        env[name.strip()] = m.parse_value(val)
    value = mc.eval_term(t, m, env)
    return {
        "operation": "eval",
        "meadow": str(m),
        "term": str(t),
        "assignment": {k: m.fmt(v) for k, v in env.items()},
        "value": m.fmt(value),
        "passed": True,
    }


def cmd_check(args) -> dict:
    m = resolve_meadow(args.meadow)
    mode = _mode(args, m)
    verdicts = [mc.check_il(m, mode)] if args.il else []
    for eq in _equations(args, m):
        eq_mode = mode if mc.equation_names(eq) else mc.CLOSED
        verdicts.append(mc.check_equation(m, eq, eq_mode))
    if not verdicts:
        raise UsageError("nothing to check: give equations, --file or --il")
    subject = "IL" if args.il and len(verdicts) == 1 else "equations"
    return mc.report("check", m, subject, mode, verdicts, seed=_seed(args, mode))


def _seed(args, mode: mc.Mode) -> int | None:
    return args.seed if mode.kind == "sample" else None


def cmd_axioms(args) -> dict:
    m = resolve_meadow(args.meadow)
    suite = args.suite
    if suite == "sr":
        th = theories.sr()
        return {
            "operation": "axioms",
            "meadow": str(m),
            "theory": th.name,
            "mode": "display",
            "axioms": [str(e) for e in th],
            "no_rational_sqrt": sx.no_rational_sqrt(2),
            "passed": True,
        }
    if suite == "signs" and not m.finite:
        sm = m if isinstance(m, sx.SignedMeadow) else sx.SignedMeadow(m)
        values = parse_grid(args.grid) if args.grid else sx.DEFAULT_GRID
        laws = sx.check_signs(sm, values, args.samples, args.seed, args.workers)
        return {
            "operation": "axioms",
            "meadow": str(sm),
            "theory": "Signs",
            "mode": f"grid({len(sx.default_grid(sm, values))}) + sample({args.samples}, seed {args.seed})",
            "seed": args.seed,
            "laws": [r.to_json() for r in laws],
            "passed": all(r.holds for r in laws),
        }
    mode = _mode(args, m)
    if suite == "il":
        return mc.report("axioms", m, "IL", mode, [mc.check_il(m, mode)], seed=_seed(args, mode))
    if Path(suite).is_file():
        th = theories.Theory(
            Path(suite).stem,
            tuple(parse_equations(Path(suite).read_text(encoding="utf-8"), _symbols(m))[1]),
        )
    else:
        th = theories.by_name(suite)
    if th.symbols and suite == "signs" and not isinstance(m, sx.SignedMeadow):
        raise ValueError(f"{m} has no sign function")
    rep = mc.check_theory(m, th, mode)
    return mc.report("axioms", m, th.name, mode, rep.verdicts, seed=_seed(args, mode))


def cmd_congruences(args) -> dict:
    if args.eq_example:
        return sx.eq_meadow_checks()
    if not args.meadow:
        raise UsageError("--meadow is required unless --eq-example is given")
    m = resolve_meadow(args.meadow)
    alg = cg.FiniteAlgebra.from_meadow(m, args.reduct)
    out: dict = {"operation": "congruences", "meadow": str(m), "reduct": args.reduct}
    if args.principal:
        a, b = (m.parse_value(v) for v in args.principal)
        c = cg.principal_congruence(m, a, b, args.reduct)
        out["principal"] = {"pair": [m.fmt(a), m.fmt(b)], "blocks": c.render(alg.labels)}
    lattice = cg.all_congruences(alg)
    out["count"] = len(lattice)
    out["congruences"] = [c.render(alg.labels) for c in lattice]
    simple = all(c.is_diagonal() or c.is_total() for c in lattice)
    out["simple"] = simple
    si, mono = cg.is_subdirectly_irreducible(alg)
    out["subdirectly_irreducible"] = si
    if mono is not None:
        out["monolith"] = mono.render(alg.labels)
    checks = {}
    if not m.extra_ops or args.reduct:
        il = mc.check_il(m, mc.Mode("exhaustive", workers=args.workers))
        out["inverse_law"] = il.status
        checks["simple_iff_inverse_law"] = simple == il.holds
    if args.oracle:
        oracle = cg.brute_force_congruences(alg)
        out["oracle_count"] = len(oracle)
        checks["oracle_agrees"] = oracle == lattice
    if args.decompose:
        d = cg.subdirect_decompose(alg)
        out["decomposition"] = {
            "kernels": [c.render(alg.labels) for c in d.congruences],
            "factor_sizes": [q.size for q in d.quotients],
            "injective": d.injective,
            "homomorphism": d.homomorphism,
            "surjective_projections": d.surjective_projections,
            "factors_si": d.factors_si,
        }
        checks["decomposition"] = d.ok
    out["checks"] = checks
    out["passed"] = all(checks.values())
    return out


def cmd_single_spec(args) -> dict:
    return nf.verify_single_spec(args.p0, args.p1, args.bound, args.workers, args.detail)


def cmd_presentation(args) -> dict:
    if args.file:
        P = nf.Presentation.parse(Path(args.file).read_text(encoding="utf-8"))
        if P.constants and not args.poly:
            raise UsageError("--poly is required with --file")
        g = parse_poly(args.poly) if args.poly else None
    else:
        P = nf.gaussian_presentation()
        g = parse_poly(args.poly or "x^2 + 1")
    return nf.verify_presentation(P, g, args.trials, args.seed, args.samples)


def cmd_combine(args) -> dict:
    eqs = _equations(args)
    if not eqs:
        raise UsageError("give at least one equation or --file")
    single = mc.reduce_to_single(eqs)
    out: dict = {
        "operation": "combine",
        "equations": [str(e) for e in eqs],
        "combined": str(single),
    }
    verdicts = []
    for desc in args.verify_on or []:
        m = resolve_meadow(desc)
        mode = _mode(args, m)
        v = mc.check_equivalence(m, eqs, single, mode)
        verdicts.append({"meadow": str(m), "mode": mode.describe(), **v.to_json()})
    out["verification"] = verdicts
    out["passed"] = all(v["status"] != mc.FAILS for v in verdicts)
    return out


def cmd_initial(args) -> dict:
    if args.equal:
        s, t = (parse_term(x) for x in args.equal)
        r = mc.bounded_initial_equality(s, t, args.bound)
        return {"operation": "initial-equality", "lhs": str(s), "rhs": str(t), **r, "passed": True}
    eqs = _equations(args)
    if not eqs:
        raise UsageError("give equations, --file or --equal")
    return mc.initial_spec_check(eqs, args.bound, args.workers)


def cmd_sep_prime(args) -> dict:
    try:
        R = sorted({int(v) for v in args.primes.split(",") if v.strip()})
    except ValueError:
        raise ValueError(f"bad prime list {args.primes!r}") from None
    p = mc.separating_prime(R, args.bound)
    out: dict = {"operation": "sep-prime", "primes": R, "bound": args.bound, "separating_prime": p}
    if p is None:
        out["passed"] = False
        return out
    m = make_meadow(f"zp:{p}")
    rows = []
    for q in R + [p]:
        v = mc.check_equation(m, mc.inverse_law_for(q), mc.CLOSED)
        rows.append({"equation": str(mc.inverse_law_for(q)), "holds": v.holds})
    out["meadow"] = str(m)
    out["checks"] = rows
    out["passed"] = all(r["holds"] for r in rows[:-1]) and not rows[-1]["holds"]
    return out


def cmd_ek_check(args) -> dict:
    return mc.check_ek(args.k, args.p, args.seed)


def cmd_signs(args) -> dict:
    m = resolve_meadow(args.meadow)
    values = parse_grid(args.grid) if args.grid else sx.DEFAULT_GRID
    out: dict = {"operation": "signs", "meadow": str(m), "seed": args.seed}
    ok = True
    if m.finite:
        out["signs"] = None
        out["note"] = f"{m} is not formally real; only EFR is checked"
    else:
        sm = m if isinstance(m, sx.SignedMeadow) else sx.SignedMeadow(m)
        laws = sx.check_signs(sm, values, args.samples, args.seed, args.workers)
        out["signs"] = [r.to_json() for r in laws]
        ok &= all(r.holds for r in laws)
        base = sm.base
        if isinstance(base, sx.RationalMeadow):
            order = sx.check_order_axioms(values)
            out["order"] = [v.to_json() for v in order]
            ok &= all(v.holds for v in order)
        m = base
    efr = sx.check_efr(m, args.efr, values, args.samples, args.seed, args.workers)
    out["efr"] = [r.to_json() for r in efr]
    efr_ok = all(r.holds for r in efr)
    if m.finite and args.expect_efr_failure:
        out["efr_expectation"] = "fails"
        ok &= not efr_ok
    else:
        ok &= efr_ok
    out["passed"] = bool(ok)
    return out


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("--samples", type=int, default=100, help="random assignments when sampling")

    p = _Parser(prog="meadowkit", description="Compute and check equations in meadows.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("eval", parents=[common], help="evaluate a term")
    s.add_argument("--meadow", required=True)
    s.add_argument("--let", action="append", metavar="NAME=VALUE")
    s.add_argument("term")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("check", parents=[common], help="check equations or IL")
    s.add_argument("--meadow", required=True)
    s.add_argument("--il", action="store_true", help="check the inverse law")
    s.add_argument("--file")
    s.add_argument("--grid", help="comma-separated values to range over")
    s.add_argument("equations", nargs="*")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("axioms", parents=[common], help="check a named axiom suite")
    s.add_argument("--meadow", required=True)
    s.add_argument("--suite", required=True, help="md, il, inv:B, signs, efr:N, sr or a file")
    s.add_argument("--grid")
    s.set_defaults(func=cmd_axioms)

    s = sub.add_parser("congruences", parents=[common], help="congruence lattice of a finite meadow")
    s.add_argument("--meadow")
    s.add_argument("--reduct", action="store_true", help="ignore extra symbols")
    s.add_argument("--principal", nargs=2, metavar=("A", "B"))
    s.add_argument("--oracle", action="store_true", help="cross-check by partition filtering")
    s.add_argument("--decompose", action="store_true", help="subdirect decomposition")
    s.add_argument("--eq-example", action="store_true", help="the eq-expanded Z2 x Z3 example")
    s.set_defaults(func=cmd_congruences)

    s = sub.add_parser("single-spec", parents=[common], help="quadratic-residue specification")
    s.add_argument("--p0", type=int, required=True)
    s.add_argument("--p1", type=int, required=True)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--detail", action="store_true", help="include per-prime rows")
    s.set_defaults(func=cmd_single_spec)

    s = sub.add_parser("presentation", parents=[common], help="check a presentation of Q0(c)")
    s.add_argument("--file", help="presentation file with a const header")
    s.add_argument("--poly", help="minimal polynomial of the constant")
    s.add_argument("--trials", type=int, default=1000)
    s.set_defaults(func=cmd_presentation, samples=200)

    s = sub.add_parser("combine", parents=[common], help="fold equations into one")
    s.add_argument("--file")
    s.add_argument("--verify-on", action="append", metavar="MEADOW")
    s.add_argument("--grid")
    s.add_argument("equations", nargs="*")
    s.set_defaults(func=cmd_combine)

    s = sub.add_parser("initial", parents=[common], help="bounded initial-algebra checks")
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--file")
    s.add_argument("--equal", nargs=2, metavar=("S", "T"), help="compare two closed terms")
    s.add_argument("equations", nargs="*")
    s.set_defaults(func=cmd_initial)

    s = sub.add_parser("sep-prime", parents=[common], help="least prime outside a finite set")
    s.add_argument("--primes", required=True, help="comma-separated primes")
    s.add_argument("--bound", type=int, required=True)
    s.set_defaults(func=cmd_sep_prime)

    s = sub.add_parser("ek-check", parents=[common], help="evaluate E_k in Z/2pZ")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(func=cmd_ek_check)

    s = sub.add_parser("signs", parents=[common], help="sign axioms, order axioms and EFR")
    s.add_argument("--meadow", default="q0")
    s.add_argument("--grid")
    s.add_argument("--efr", type=int, default=5, help="largest EFR instance")
    s.add_argument(
        "--expect-efr-failure",
        action="store_true",
        help="pass when EFR fails on a finite meadow",
    )
    s.set_defaults(func=cmd_signs)
    return p


# ----------------------------------------------------------------- output


def _text(rep: dict) -> str:
    lines = []
    for k, v in rep.items():
        if k in ("verdicts", "relations", "defining_equations") and isinstance(v, list):
            lines.append(f"{k}:")
            lines += ["  " + _verdict_line(x) for x in v]
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{k}:")
            for x in v:
                if "checks" in x:
                    mark = "ok  " if x.get("holds") else "FAIL"
                    lines.append(f"  {mark} {x.get('axiom', '')}")
                    lines += ["       " + _verdict_line(c) for c in x["checks"]]
                elif "status" in x:
                    lines.append("  " + _verdict_line(x))
                else:
                    lines.append("  " + json.dumps(x))
        elif isinstance(v, dict) and "status" in v:
            lines.append(f"{k}: {_verdict_line(v)}")
        elif isinstance(v, (dict, list)):
            lines.append(f"{k}: {json.dumps(v)}")
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


def _verdict_line(v: dict) -> str:
    s = f"{v['status']:<17} {v['equation']}  [{v['assignments_checked']}]"
    w = v.get("witness")
    if w:
        assign = ", ".join(f"{k}={x}" for k, x in w.get("assignment", {}).items())
        s += f"\n    witness {assign or '(closed)'}"
        if "lhs" in w:
            s += f": lhs = {w['lhs']}, rhs = {w['rhs']}"
    return s


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be at least 1")
        rep = args.func(args)
    except UsageError as e:
        print(f"meadowkit: error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as e:
        print(f"meadowkit: error: {e}", file=sys.stderr)
        return 2
    except SystemExit as e:
        # --help exits 0; argparse failures surface as UsageError above
        return int(e.code or 0)
    if args.json:
        print(json.dumps(rep, indent=2, ensure_ascii=False))
    else:
        print(_text(rep))
    return 0 if rep.get("passed", True) else 1


if __name__ == "__main__":
    sys.exit(main())
