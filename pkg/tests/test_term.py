from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from meadowkit.term import (
    ONE,
    ZERO,
    Add,
    App,
    Const,
    Equation,
    Inv,
    Mul,
    Neg,
    One,
    TermSyntaxError,
    Var,
    constants_of,
    free_vars,
    numeral,
    numeral_value,
    parse_equation,
    parse_equations,
    parse_term,
    render,
    substitute,
    symbols_of,
)

x, y = Var("x"), Var("y")


def count_ones(t) -> int:
    if isinstance(t, One):
        return 1
    if isinstance(t, (Add, Mul)):
        return count_ones(t.left) + count_ones(t.right)
    if isinstance(t, (Neg, Inv)):
        return count_ones(t.arg)
    if isinstance(t, App):
        return sum(count_ones(a) for a in t.args)
    return 0


def test_numeral_shapes():
    assert numeral(0) == ZERO
    assert numeral(1) == Add(ZERO, ONE)
    assert numeral(2) == Add(Add(ZERO, ONE), ONE)


@given(st.integers(0, 300))
def test_numeral_has_n_ones(n):
    t = numeral(n)
    assert count_ones(t) == n
    assert numeral_value(t) == n


def test_deep_numeral_is_iterative():
    t = numeral(20000)
    assert numeral_value(t) == 20000
    assert render(t) == "20000"
    assert parse_term("20000") == t


@pytest.mark.parametrize(
    "text,expected",
    [
        ("x * (x * x^-1)", Mul(x, Mul(x, Inv(x)))),
        ("0_(x)", Add(ONE, Neg(Mul(x, Inv(x))))),
        ("1_(x)", Mul(x, Inv(x))),
        ("((x))", x),
        ("x - y", Add(x, Neg(y))),
        ("x / y", Mul(x, Inv(y))),
        ("inv(x)", Inv(x)),
        ("x^-1^-1", Inv(Inv(x))),
        ("-x * y", Mul(Neg(x), y)),
        ("x^2", Mul(x, x)),
        ("2", numeral(2)),
        ("1", ONE),
        ("0", ZERO),
    ],
)
def test_parse_examples(text, expected):
    assert parse_term(text) == expected


def test_parse_symbols_and_constants():
    t = parse_term("s(x) * eq(x, c)", {"s": 1, "eq": 2}, ["c"])
    assert t == Mul(App("s", (x,)), App("eq", (x, Const("c"))))
    assert symbols_of(t) == {"s", "eq"}
    assert constants_of(t) == {"c"}


@pytest.mark.parametrize(
    "text",
    ["x +", "(x", "x y", "s(x, y)", "f(x)", "x ^ 2 ^", "s", "x = y", ""],
)
def test_parse_errors(text):
    with pytest.raises(TermSyntaxError):
        parse_term(text, {"s": 1})


def test_error_position():
    with pytest.raises(TermSyntaxError) as ei:
        parse_term("x + * y")
    assert ei.value.col == 5


def test_equation_file_format():
    consts, eqs = parse_equations("# comment\nconst i\ni * i + 1 = 0  # trailing\n\nx = x\n")
    assert consts == ["i"]
    assert eqs == [Equation(Add(Mul(Const("i"), Const("i")), ONE), ZERO), Equation(x, x)]


def test_equation_file_error_line():
    with pytest.raises(TermSyntaxError) as ei:
        parse_equations("x = x\nx + = 1\n")
    assert ei.value.line == 2


def test_substitute_examples():
    assert substitute(Add(x, y), {"x": ONE}) == Add(ONE, y)
    assert substitute(Inv(x), {"x": ZERO}) == Inv(ZERO)
    t = App("eq", (x, x))
    assert substitute(t, {"x": numeral(2)}) == App("eq", (numeral(2), numeral(2)))


def test_free_vars_examples():
    assert free_vars(Add(Mul(x, y), x)) == {"x", "y"}
    assert free_vars(numeral(3)) == set()
    assert free_vars(Mul(App("s", (x,)), App("s", (x,)))) == {"x"}


# ------------------------------------------------------------ round trip

leaves = st.one_of(
    st.just(ZERO),
    st.just(ONE),
    st.sampled_from([Var("x"), Var("y"), Var("z1")]),
    st.builds(numeral, st.integers(0, 12)),
    st.just(Const("c")),
)


def extend(children):
    return st.one_of(
        st.builds(Add, children, children),
        st.builds(Mul, children, children),
        st.builds(Neg, children),
        st.builds(Inv, children),
        st.builds(lambda a: App("s", (a,)), children),
        st.builds(lambda a, b: App("eq", (a, b)), children, children),
    )


terms = st.recursive(leaves, extend, max_leaves=25)


@settings(max_examples=400)
@given(terms)
def test_parse_render_roundtrip(t):
    assert parse_term(render(t), constants=["c"]) == t


@given(terms, terms)
def test_equation_roundtrip(a, b):
    eq = Equation(a, b)
    assert parse_equation(str(eq), constants=["c"]) == eq


@given(terms, terms)
def test_substitute_is_homomorphic(a, b):
    sigma = {"x": Add(Var("y"), ONE), "y": numeral(3)}
    for make in (Add, Mul):
        assert substitute(make(a, b), sigma) == make(substitute(a, sigma), substitute(b, sigma))
    assert substitute(Neg(a), sigma) == Neg(substitute(a, sigma))
    assert substitute(Inv(a), sigma) == Inv(substitute(a, sigma))
