"""Acceptance gate: one check per criterion, one PASS/FAIL line each.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly with
``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import sys
import time

import pytest

from meadowkit import theories
from meadowkit.cli import main as cli_main
from meadowkit.congruence import all_congruences, brute_force_congruences, is_simple
from meadowkit.meadows import make_meadow
from meadowkit.modelcheck import (
    CLOSED,
    EXHAUSTIVE,
    check_equation,
    check_equivalence,
    check_il,
    check_theory,
    eval_term,
    inverse_law_for,
    reduce_to_single,
    sample,
    separating_prime,
)
from meadowkit.numberfield import gaussian_presentation, verify_single_spec
from meadowkit.numeric import NotSquarefreeError
from meadowkit.poly import parse_poly
from meadowkit.signexp import (
    SignedMeadow,
    check_efr,
    check_order_axioms,
    check_signs,
    eq_meadow_checks,
)
from meadowkit.numberfield import verify_presentation
from meadowkit.term import parse_equation, parse_term

FLEET = [
    "zp:2", "zp:3", "zp:5", "zp:7", "zp:11", "zp:13",
    "zsf:6", "zsf:10", "zsf:15", "zsf:30",
    "prod:[zp:2,zp:3]", "prod:[zp:2,zp:2]", "prod:[zp:3,zp:3]", "prod:[zp:2,zp:3,zp:5]",
    "gen:[prod:[zp:2,zp:2]]",
]


def c1_md_suite():
    fields = [f"zp:{p}" for p in (2, 3, 5, 7, 11, 13)] + [f"zsf:{n}" for n in (6, 10, 15, 30)]
    failures = []
    for d in fields:
        rep = check_theory(make_meadow(d), theories.md(), EXHAUSTIVE)
        if len(rep.verdicts) != 10:
            failures.append(f"{d}: {len(rep.verdicts)} axioms")
        failures += [f"{d}: {v.subject}" for v in rep.verdicts if not v.holds]
    return not failures, f"{len(fields)} meadows x 10 axioms, failures: {failures or 0}"


def c2_non_squarefree():
    seen = {}
    for n in (4, 8, 9, 12):
        try:
            make_meadow(f"zsf:{n}")
            seen[n] = None
        except NotSquarefreeError as e:
            w = e.witness
            lacks = all((w * y * w - w) % n for y in range(n))
            seen[n] = w if lacks else None
    ok = seen[4] == 2 and all(v is not None for v in seen.values())
    return ok, "witnesses " + ", ".join(f"Z/{n}: {w}" for n, w in seen.items())


def c3_il_counterexample():
    m = make_meadow("prod:[zp:2,zp:3]")
    v = check_il(m)
    w = v.witness or {}
    x = (0, 1)
    direct = m.mul(x, m.inv(x))
    ok = (
        not v.holds
        and w.get("assignment") == {"x": "<0,1>"}
        and w.get("lhs") == "<0,1>"
        and w.get("rhs") == "<1,1>"
        and direct == (0, 1)
    )
    return ok, f"witness {w.get('assignment')}, x*x^-1 = {w.get('lhs')} != {w.get('rhs')}"


def c4_simplicity():
    counts = {d: len(all_congruences(make_meadow(d))) for d in ("zp:2", "zp:3", "zp:5", "zp:7", "zsf:6", "zsf:30")}
    expected = {"zp:2": 2, "zp:3": 2, "zp:5": 2, "zp:7": 2, "zsf:6": 4, "zsf:30": 8}
    mismatched = []
    oracle_checked = 0
    for d in FLEET:
        m = make_meadow(d)
        if is_simple(m) != check_il(m).holds:
            mismatched.append(d)
        if m.size <= 7:
            oracle_checked += 1
            if all_congruences(m) != brute_force_congruences(m):
                mismatched.append(d + " (oracle)")
    ok = counts == expected and not mismatched
    return ok, f"counts {counts}; fleet {len(FLEET)}, oracle on {oracle_checked}; mismatches {mismatched or 0}"


def c5_single_spec():
    r = verify_single_spec(2, 3, 10000)
    ok = (
        r["passed"]
        and r["rational_root"] is None
        and not r["primes_without_root"]
        and not r["legendre_discrepancies"]
        and r["primes_checked"] == 1229
    )
    return ok, (
        f"{r['primes_checked']} primes, {len(r['primes_without_root'])} without root, "
        f"{len(r['legendre_discrepancies'])} Legendre discrepancies"
    )


POOL = ["x = 0", "y = 0", "x - x = 0", "x * 0 = 0", "1_(x) * x - x = 0"]


def c6_combiner():
    eqs = [parse_equation(t) for t in POOL]
    bad = []
    n = 0
    for d in ("zsf:6", "zsf:30"):
        m = make_meadow(d)
        for a, b in itertools.product(eqs, repeat=2):
            n += 1
            if not check_equivalence(m, [a, b], reduce_to_single([a, b])).holds:
                bad.append((d, str(a), str(b)))
        for trio in itertools.combinations(eqs, 3):
            n += 1
            if not check_equivalence(m, list(trio), reduce_to_single(list(trio))).holds:
                bad.append((d,) + tuple(map(str, trio)))
    return not bad, f"{n} exhaustive equivalence checks, failures {bad or 0}"


def c7_gaussian_presentation():
    r = verify_presentation(gaussian_presentation(), parse_poly("x^2 + 1"), trials=1000, seed=0, samples=200)
    rel = {v["equation"]: v["status"] for v in r["relations"]}
    ok = (
        r["passed"]
        and r["trials"] == 1000
        and not r["normal_form_failures"]
        and not r["roundtrip_failures"]
        and rel.get("i * i + 1 = 0") == "holds_exhaustive"
        and sum(1 for s in rel.values() if s == "holds_sampled") == 1
    )
    return ok, f"1000 terms, round-trip failures {len(r['roundtrip_failures'])}, relations {sorted(rel.values())}"


def c8_signs():
    q = SignedMeadow(make_meadow("q0"))
    qq = SignedMeadow(make_meadow("prod:[q0,q0]"))
    s_q = check_signs(q)
    s_qq = check_signs(qq)
    order = check_order_axioms()
    efr_q = check_efr(make_meadow("q0"), 5)
    efr_z2 = check_efr(make_meadow("zp:2"), 1)
    w = efr_z2[1].verdicts[0].witness or {}
    ok = (
        all(r.holds for r in s_q)
        and all(r.holds for r in s_qq)
        and all(v.holds for v in order)
        and all(r.holds for r in efr_q)
        and not efr_z2[1].holds
        and w.get("assignment") == {"x0": "1", "x1": "1"}
    )
    return ok, (
        f"S1-S6 Q0 {sum(r.holds for r in s_q)}/6, Q0xQ0 {sum(r.holds for r in s_qq)}/6; "
        f"OF {sum(v.holds for v in order)}/4; EFR<=5 on Q0 {sum(r.holds for r in efr_q)}/6; "
        f"Z2 EFR1 witness {w.get('assignment')}"
    )


def c9_eq_expansion():
    r = eq_meadow_checks()
    sw = r["stated_witness"]
    ok = (
        r["passed"]
        and sw == {"assignment": {"x": "<1,0>"}, "lhs": "<0,0>", "rhs": "<1,0>"}
        and r["congruences_expanded"] == 2
        and r["congruences_reduct"] == 4
    )
    return ok, (
        f"eq(x*x^-1,1) at x=<1,0>: {sw['lhs']} != {sw['rhs']}; congruences "
        f"{r['congruences_expanded']} expanded, {r['congruences_reduct']} reduct"
    )


def c10_witnesses():
    p = separating_prime({2, 3, 5}, 100)
    m = make_meadow(f"zp:{p}") if p else None
    recheck = m is not None and all(
        check_equation(m, inverse_law_for(q), CLOSED).holds for q in (2, 3, 5)
    ) and not check_equation(m, inverse_law_for(p), CLOSED).holds
    qq = make_meadow("prod:[q0,q0]")
    inv_p = check_theory(qq, theories.inv_p(50), CLOSED)
    il = check_il(qq, sample(100, 0))
    w = (il.witness or {}).get("assignment")
    x = qq.parse_value("<1,0>")
    direct = eval_term(parse_term("x * x^-1"), qq, {"x": x})
    ok = p == 7 and recheck and inv_p.holds and len(inv_p.verdicts) == 15 and not il.holds and w == {"x": "<1,0>"} and direct != qq.one
    return ok, f"separating prime {p} (rechecked {recheck}); Q0xQ0 Inv_P<=50 {inv_p.holds}, IL witness {w}"


DETERMINISM_RUNS = [
    ["check", "--meadow", "prod:[zp:2,zp:3]", "--il"],
    ["check", "--meadow", "prod:[q0,q0]", "--il", "--seed", "7"],
    ["axioms", "--meadow", "zsf:30", "--suite", "md"],
    ["axioms", "--meadow", "q0", "--suite", "md", "--seed", "11"],
    ["congruences", "--meadow", "zsf:30", "--decompose"],
    ["congruences", "--eq-example"],
    ["single-spec", "--p0", "2", "--p1", "3", "--bound", "10000"],
    ["presentation", "--trials", "200", "--seed", "3"],
    ["combine", "x = 0", "y = 0", "x * 0 = 0", "--verify-on", "zsf:30"],
    ["initial", "--bound", "50", "(1+x1*x1+x2*x2)*(1+x1*x1+x2*x2)^-1 = 1"],
    ["sep-prime", "--primes", "2,3,5", "--bound", "100"],
    ["ek-check", "--k", "3", "--p", "5"],
    ["signs", "--meadow", "q0", "--efr", "3"],
]


def _cli_json(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main(argv + ["--json"])
    return code, buf.getvalue()


def c11_determinism():
    differing = []
    for argv in DETERMINISM_RUNS:
        runs = [_cli_json(argv + ["--workers", w]) for w in ("1", "1", "8")]
        if not (runs[0] == runs[1] == runs[2]) or not runs[0][1]:
            differing.append(argv[0])
    return not differing, f"{len(DETERMINISM_RUNS)} reports x (1, 1, 8 workers); differing {differing or 0}"


CRITERIA = [
    ("1 Md axioms on prime fields and Z/n", c1_md_suite),
    ("2 non-squarefree rejection", c2_non_squarefree),
    ("3 IL counterexample on Z2 x Z3", c3_il_counterexample),
    ("4 simplicity and congruence counts", c4_simplicity),
    ("5 single-equation spec up to 10000", c5_single_spec),
    ("6 equation combiner", c6_combiner),
    ("7 Q0(i) presentation", c7_gaussian_presentation),
    ("8 sign, order and EFR suites", c8_signs),
    ("9 eq-expansion example", c9_eq_expansion),
    ("10 separating prime and product witness", c10_witnesses),
    ("11 determinism of JSON reports", c11_determinism),
]


@pytest.mark.parametrize("name,fn", CRITERIA, ids=[c[0].split()[0] for c in CRITERIA])
def test_criterion(name, fn):
    t = time.perf_counter()
    ok, detail = fn()
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {name}: {detail} [{time.perf_counter() - t:.1f}s]")
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for name, fn in CRITERIA:
        t = time.perf_counter()
        ok, detail = fn()
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail} [{time.perf_counter() - t:.1f}s]", flush=True)
    sys.exit(1 if failed else 0)
