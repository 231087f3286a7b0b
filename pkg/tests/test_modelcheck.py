from __future__ import annotations

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from meadowkit import theories
from meadowkit.meadows import RationalMeadow, make_meadow
from meadowkit.modelcheck import (
    CLOSED,
    EXHAUSTIVE,
    FAILS,
    HOLDS_EXHAUSTIVE,
    HOLDS_SAMPLED,
    Mode,
    TooManyAssignments,
    bounded_initial_equality,
    check_equation,
    check_equivalence,
    check_ek,
    check_il,
    check_theory,
    combine_pair,
    eval_term,
    initial_spec_check,
    inverse_law_for,
    reduce_to_single,
    report,
    sample,
    separating_prime,
)
from meadowkit.numeric import weak_inverse_mod
from meadowkit.numberfield import single_spec_term, spec_equation
from meadowkit.term import ONE, ZERO, Equation, Var, numeral, parse_equation, parse_term

x, y = Var("x"), Var("y")


def test_eval_examples():
    assert eval_term(parse_term("4"), make_meadow("zp:3")) == 1
    assert eval_term(parse_term("5 * 5^-1"), make_meadow("zp:5")) == 0
    p = make_meadow("prod:[zp:2,zp:3]")
    assert eval_term(parse_term("x * x^-1"), p, {"x": (0, 1)}) == (0, 1)
    q = RationalMeadow()
    assert eval_term(parse_term("(x + 1/2)^-1"), q, {"x": F(3, 2)}) == F(1, 2)


def test_check_equation_examples():
    p = make_meadow("prod:[zp:2,zp:3]")
    v = check_equation(p, parse_equation("x * (x * x^-1) = x"))
    assert v.status == HOLDS_EXHAUSTIVE and v.assignments_checked == 6
    v = check_equation(make_meadow("zp:5"), parse_equation("5 * 5^-1 = 1"), CLOSED)
    assert v.status == FAILS and v.witness["lhs"] == "0" and v.witness["rhs"] == "1"
    v = check_equation(RationalMeadow(), parse_equation("x * x^-1 * x = x"), sample(100, 42))
    assert v.status == HOLDS_SAMPLED and v.samples == 100


def test_il_examples():
    assert check_il(make_meadow("zp:7")).holds
    v = check_il(make_meadow("prod:[zp:2,zp:3]"))
    assert not v.holds and v.witness["assignment"] == {"x": "<0,1>"}
    v = check_il(make_meadow("prod:[q0,q0]"), sample(100, 0))
    assert not v.holds and v.witness["assignment"] == {"x": "<1,0>"}


def test_theory_examples():
    assert check_theory(make_meadow("zsf:30"), theories.md()).holds
    assert check_theory(make_meadow("prod:[q0,q0]"), theories.inv_p(50), CLOSED).holds
    rep = check_theory(make_meadow("zp:2"), theories.efr(1))
    assert rep.verdicts[0].holds
    w = rep.verdicts[1].witness
    assert not rep.verdicts[1].holds and w["assignment"] == {"x0": "1", "x1": "1"}


def test_md_holds_on_fleet(finite_meadow):
    assert check_theory(finite_meadow, theories.md()).holds


def test_exhaustive_cap():
    with pytest.raises(TooManyAssignments):
        check_equation(make_meadow("zsf:210"), parse_equation("x + y + z + w = w + z + y + x"))


def test_failing_witness_is_least_and_rechecks():
    m = make_meadow("zsf:30")
    v = check_equation(m, parse_equation("x * y = y * x + x * x * x^-1 - x"))
    assert v.holds
    v = check_equation(m, parse_equation("x * x = x"))
    assert v.witness["assignment"] == {"x": "2"} and v.assignments_checked == 3
    env = {"x": m.parse_value(v.witness["assignment"]["x"])}
    eq = parse_equation("x * x = x")
    assert eval_term(eq.lhs, m, env) != eval_term(eq.rhs, m, env)


@pytest.mark.parametrize("workers", [2, 3])
def test_verdicts_independent_of_workers(workers):
    m = make_meadow("zsf:30")
    eq = parse_equation("x * y * z = x * y + z - z")
    base = check_equation(m, eq)
    par = check_equation(m, eq, Mode("exhaustive", workers=workers))
    assert base == par and not base.holds


def test_report_key_order():
    m = make_meadow("zp:3")
    rep = report("check", m, "IL", EXHAUSTIVE, [check_il(m)])
    assert list(rep) == ["operation", "meadow", "theory", "mode", "verdicts", "passed"]
    rep = report("check", m, "IL", sample(5, 3), [check_il(m, sample(5, 3))])
    assert rep["seed"] == 3


# ----------------------------------------------------------------- combiner


def test_combine_pair_shape():
    assert str(combine_pair(x, y)) == "(1 - y * y^-1) * (1 - x * x^-1) = 1"
    assert str(combine_pair(ZERO, ZERO)) == "(1 - 0 * 0^-1) * (1 - 0 * 0^-1) = 1"
    for desc in ("zsf:30", "prod:[zp:2,zp:3]"):
        assert check_equation(make_meadow(desc), combine_pair(ZERO, ZERO), CLOSED).holds


def test_reduce_to_single_examples():
    e = parse_equation("x = 0")
    assert reduce_to_single([e]) is e
    assert reduce_to_single([parse_equation("x = 0"), parse_equation("y = 0")]) == combine_pair(x, y)
    with pytest.raises(ValueError):
        reduce_to_single([])


def test_combined_difference_terms():
    r, t = parse_term("x - x"), parse_term("y * 0")
    assert check_equation(make_meadow("zsf:6"), combine_pair(r, t)).holds


POOL = ["x = 0", "y = 0", "x - x = 0", "x * 0 = 0", "1_(x) * x - x = 0", "x * y = 1", "z + z = z"]


@pytest.mark.parametrize("desc", ["zsf:6", "prod:[zp:2,zp:3]", "zsf:10"])
def test_combiner_equivalence_exhaustive(desc):
    m = make_meadow(desc)
    eqs = [parse_equation(t) for t in POOL]
    for a, b in itertools.permutations(eqs, 2):
        assert check_equivalence(m, [a, b], reduce_to_single([a, b])).holds
    for trio in itertools.combinations(eqs, 3):
        assert check_equivalence(m, list(trio), reduce_to_single(list(trio))).holds


def test_equivalence_detects_mismatch():
    m = make_meadow("zsf:6")
    v = check_equivalence(m, [parse_equation("x = 0")], parse_equation("x * y = 0"))
    assert not v.holds
    assert v.witness["assignment"] == {"x": "1", "y": "0"}
    assert v.witness["system_holds"] is False


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(POOL), min_size=1, max_size=4))
def test_reduce_to_single_property(texts):
    eqs = [parse_equation(t) for t in texts]
    assert check_equivalence(make_meadow("zsf:6"), eqs, reduce_to_single(eqs)).holds


# ----------------------------------------------------------- initial algebra


def test_initial_spec_check_examples():
    r = initial_spec_check([parse_equation("(1+x1*x1+x2*x2)*(1+x1*x1+x2*x2)^-1 = 1")], 50)
    assert r["conclusion"] == "consistent_up_to_bound"
    assert all(not row["models"] for row in r["primes"]) and len(r["primes"]) == 15
    r = initial_spec_check([parse_equation("x = x")], 10)
    assert r["conclusion"] == "refuted" and r["refuting_primes"][0] == 2
    r = initial_spec_check([spec_equation(single_spec_term(2, 3))], 100)
    assert r["conclusion"] == "consistent_up_to_bound"


def test_initial_spec_check_parallel_matches():
    eqs = [parse_equation("(1+x1*x1+x2*x2)*(1+x1*x1+x2*x2)^-1 = 1")]
    assert initial_spec_check(eqs, 30, 1) == initial_spec_check(eqs, 30, 2)


def test_separating_prime_examples():
    assert separating_prime({2, 3, 5}, 100) == 7
    assert separating_prime(set(), 10) == 2
    assert separating_prime({2}, 2) is None
    with pytest.raises(ValueError):
        separating_prime({4}, 10)


@given(st.sets(st.sampled_from([2, 3, 5, 7, 11, 13, 17, 19, 23]), max_size=6))
def test_separating_prime_rechecks(R):
    p = separating_prime(R, 60)
    m = make_meadow(f"zp:{p}")
    assert p not in R
    assert all(check_equation(m, inverse_law_for(q), CLOSED).holds for q in R)
    assert not check_equation(m, inverse_law_for(p), CLOSED).holds


def test_check_ek():
    r = check_ek(2, 5)
    assert r["passed"] and r["meadow"] == "zsf:10"
    for k, p, n in ((3, 5, 10), (3, 7, 14)):
        r = check_ek(k, p)
        bad = [c for c in r["clauses"] if not c["holds"]]
        assert [c["clause"] for c in bad] == ["2 * 2^-1 = 1"]
        assert bad[0]["lhs"] == str(2 * weak_inverse_mod(2, n) % n)
    assert check_ek(3, 5)["clauses"][4]["lhs"] == "6"
    with pytest.raises(ValueError):
        check_ek(3, 3)


def test_bounded_initial_equality():
    r = bounded_initial_equality(parse_term("0^-1"), ZERO, 50)
    assert r["verdict"] == "equal_up_to_bound"
    r = bounded_initial_equality(parse_term("2 * 2^-1"), ONE, 50)
    assert r["verdict"] == "distinct" and r["witness"]["meadow"] == "zp:2"
    r = bounded_initial_equality(parse_term("3 * 3^-1 * 3"), numeral(3), 100)
    assert r["verdict"] == "equal_up_to_bound"
    with pytest.raises(ValueError):
        bounded_initial_equality(x, x, 5)
