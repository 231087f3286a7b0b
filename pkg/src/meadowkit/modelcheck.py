"""Evaluate terms in meadows and check equations, theories and procedures.

Exhaustive scans enumerate assignments in lexicographic order (variables
sorted by name, values in carrier order).  A failing scan reports the least
failing assignment, so verdicts do not depend on how work is split across
workers.
"""

from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from . import theories
from .meadows import Meadow, MeadowError, ModMeadow, RationalMeadow
from .numeric import is_prime, primes_upto
from .term import (
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
    Term,
    Theory,
    Var,
    Zero,
    free_vars,
    numeral,
    numeral_value,
    render,
)

EXHAUSTIVE_CAP = 10**7
PARALLEL_THRESHOLD = 20_000
PROBE_PRODUCT_CAP = 4096

HOLDS_EXHAUSTIVE = "holds_exhaustive"
HOLDS_SAMPLED = "holds_sampled"
FAILS = "fails"


class EvaluationError(MeadowError):
    pass


class TooManyAssignments(MeadowError):
    pass


# ---------------------------------------------------------------- evaluation


def eval_term(t: Term, m: Meadow, env: Mapping[str, Any] | None = None) -> Any:
    """Structural evaluation of ``t`` in ``m`` under ``env``.

    ``env`` binds variables and may also bind constants; unbound constants
    fall back to the meadow's own named constants.
    """
    env = env or {}
    if isinstance(t, Zero):
        return m.zero
    if isinstance(t, One):
        return m.one
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Const):
        if t.name in env:
            return env[t.name]
        try:
            return m.constants[t.name]
        except KeyError:
            raise EvaluationError(f"constant {t.name!r} has no value in {m}") from None
    if isinstance(t, Add):
        n = numeral_value(t)
        if n is not None:
            return m.from_int(n)
        return m.add(eval_term(t.left, m, env), eval_term(t.right, m, env))
    if isinstance(t, Mul):
        return m.mul(eval_term(t.left, m, env), eval_term(t.right, m, env))
    if isinstance(t, Neg):
        return m.neg(eval_term(t.arg, m, env))
    if isinstance(t, Inv):
        return m.inv(eval_term(t.arg, m, env))
    if isinstance(t, App):
        if t.symbol not in m.extra_ops:
            raise EvaluationError(f"symbol {t.symbol!r} is not interpreted in {m}")
        return m.apply(t.symbol, [eval_term(a, m, env) for a in t.args])
    raise TypeError(f"not a term: {t!r}")


def compile_term(
    t: Term, m: Meadow, names: Sequence[str], consts: Mapping[str, Any] | None = None
) -> Callable[[Sequence[Any]], Any]:
    """Turn ``t`` into a function of a value tuple ordered like ``names``."""
    pos = {n: i for i, n in enumerate(names)}
    consts = {**m.constants, **(consts or {})}

    def go(u: Term):
        if isinstance(u, Zero):
            z = m.zero
            return lambda v: z
        if isinstance(u, One):
            o = m.one
            return lambda v: o
        if isinstance(u, Var):
            if u.name not in pos:
                raise EvaluationError(f"unbound variable {u.name!r}")
            i = pos[u.name]
            return lambda v: v[i]
        if isinstance(u, Const):
            if u.name not in consts:
                raise EvaluationError(f"constant {u.name!r} has no value in {m}")
            c = consts[u.name]
            return lambda v: c
        if isinstance(u, Add):
            n = numeral_value(u)
            if n is not None:
                c = m.from_int(n)
                return lambda v: c
            f, g, op = go(u.left), go(u.right), m.add
            return lambda v: op(f(v), g(v))
        if isinstance(u, Mul):
            f, g, op = go(u.left), go(u.right), m.mul
            return lambda v: op(f(v), g(v))
        if isinstance(u, Neg):
            f, op = go(u.arg), m.neg
            return lambda v: op(f(v))
        if isinstance(u, Inv):
            f, op = go(u.arg), m.inv
            return lambda v: op(f(v))
        if isinstance(u, App):
            if u.symbol not in m.extra_ops:
                raise EvaluationError(f"symbol {u.symbol!r} is not interpreted in {m}")
            fs, sym, ap = [go(a) for a in u.args], u.symbol, m.apply
            return lambda v: ap(sym, [f(v) for f in fs])
        raise TypeError(f"not a term: {u!r}")

    return go(t)


def compile_indexed(t: Term, m: Meadow, names: Sequence[str], consts=None):
    """Like :func:`compile_term` but over element indices of a tabulated meadow."""
    tb = m.tables
    pos = {n: i for i, n in enumerate(names)}
    consts = {**m.constants, **(consts or {})}

    def go(u: Term):
        if isinstance(u, Zero):
            z = tb.zero
            return lambda v: z
        if isinstance(u, One):
            o = tb.one
            return lambda v: o
        if isinstance(u, Var):
            if u.name not in pos:
                raise EvaluationError(f"unbound variable {u.name!r}")
            i = pos[u.name]
            return lambda v: v[i]
        if isinstance(u, Const):
            if u.name not in consts:
                raise EvaluationError(f"constant {u.name!r} has no value in {m}")
            c = tb.index[consts[u.name]]
            return lambda v: c
        if isinstance(u, Add):
            n = numeral_value(u)
            if n is not None:
                c = tb.index[m.from_int(n)]
                return lambda v: c
            f, g, T = go(u.left), go(u.right), tb.add
            return lambda v: T[f(v)][g(v)]
        if isinstance(u, Mul):
            f, g, T = go(u.left), go(u.right), tb.mul
            return lambda v: T[f(v)][g(v)]
        if isinstance(u, Neg):
            f, T = go(u.arg), tb.neg
            return lambda v: T[f(v)]
        if isinstance(u, Inv):
            f, T = go(u.arg), tb.inv
            return lambda v: T[f(v)]
        if isinstance(u, App):
            if u.symbol not in tb.extra:
                raise EvaluationError(f"symbol {u.symbol!r} is not interpreted in {m}")
            T = tb.extra[u.symbol]
            fs = [go(a) for a in u.args]
            if len(fs) == 1:
                f = fs[0]
                return lambda v: T[f(v)]
            f, g = fs
            return lambda v: T[f(v)][g(v)]
        raise TypeError(f"not a term: {u!r}")

    return go(t)


# ------------------------------------------------------------------ verdicts


@dataclass
class Verdict:
    """Outcome of checking one (possibly conditional) law."""

    subject: str
    status: str
    assignments_checked: int
    witness: dict | None = None
    samples: int | None = None

    @property
    def holds(self) -> bool:
        return self.status != FAILS

    def to_json(self) -> dict:
        out: dict = {"equation": self.subject, "status": self.status}
        if self.samples is not None:
            out["samples"] = self.samples
        if self.witness is not None:
            out["witness"] = self.witness
        out["assignments_checked"] = self.assignments_checked
        return out


def _witness(m: Meadow, names, values, lhs, rhs) -> dict:
    return {
        "assignment": {n: m.fmt(v) for n, v in zip(names, values)},
        "lhs": m.fmt(lhs),
        "rhs": m.fmt(rhs),
    }


@dataclass
class Mode:
    """How assignments are produced.

    ``exhaustive``: every assignment over a finite carrier.
    ``sample``: directed probes, then ``count`` seeded random assignments.
    ``closed``: the single empty assignment.
    ``grid``: every assignment over the explicit value list ``grid``.
    """

    kind: str = "exhaustive"
    count: int = 100
    seed: int = 0
    grid: Sequence | None = None
    workers: int = 1

    def describe(self) -> str:
        if self.kind == "sample":
            return f"sample({self.count}, seed {self.seed})"
        if self.kind == "grid":
            return f"grid({len(self.grid)})"
        return self.kind


EXHAUSTIVE = Mode("exhaustive")
CLOSED = Mode("closed")


def sample(count: int = 100, seed: int = 0) -> Mode:
    return Mode("sample", count=count, seed=seed)


def grid(values: Sequence, workers: int = 1) -> Mode:
    return Mode("grid", grid=list(values), workers=workers)


def _domain(m: Meadow, mode: Mode) -> list:
    if mode.kind == "grid":
        return list(mode.grid)
    if not m.finite:
        raise MeadowError(f"exhaustive mode needs a finite meadow, {m} is infinite")
    return m.elements()


def _sample_assignments(m: Meadow, k: int, mode: Mode) -> list[tuple]:
    probes = m.probes()
    if k == 0:
        return [()]
    if len(probes) ** k <= PROBE_PRODUCT_CAP:
        out = list(itertools.product(probes, repeat=k))
    else:
        out = [(p,) * k for p in probes]
    rng = random.Random(mode.seed)
    out += [tuple(m.random_element(rng) for _ in range(k)) for _ in range(mode.count)]
    return out


# A predicate over value tuples: returns None if the law holds at the point,
# else a (lhs, rhs) pair of values for the witness.
Law = Callable[[Sequence[Any]], Any]


def _equation_law(m: Meadow, eq: Equation, names, indexed: bool, consts=None):
    comp = compile_indexed if indexed else compile_term
    f = comp(eq.lhs, m, names, consts)
    g = comp(eq.rhs, m, names, consts)

    def law(v):
        a, b = f(v), g(v)
        return None if a == b else (a, b)

    return law


def _il_law(m: Meadow, indexed: bool):
    if indexed:
        tb = m.tables
        z, o, mul, inv = tb.zero, tb.one, tb.mul, tb.inv

        def law(v):
            x = v[0]
            if x == z:
                return None
            r = mul[x][inv[x]]
            return None if r == o else (r, o)

    else:

        def law(v):
            x = v[0]
            if x == m.zero:
                return None
            r = m.mul(x, m.inv(x))
            return None if r == m.one else (r, m.one)

    return law


def _equiv_law(m: Meadow, system, single: Equation, names, indexed: bool):
    laws = [_equation_law(m, eq, names, indexed) for eq in system]
    comp = compile_indexed if indexed else compile_term
    f, g = comp(single.lhs, m, names), comp(single.rhs, m, names)

    def law(v):
        a, b = f(v), g(v)
        return None if (a == b) == all(l(v) is None for l in laws) else (a, b)

    return law


@dataclass
class _Job:
    """Picklable description of a scan, rebuilt inside worker processes."""

    meadow: Meadow
    kind: str  # "eq" or "il"
    equation: Equation | None
    names: tuple
    indexed: bool
    consts: dict = field(default_factory=dict)

    system: tuple = ()

    def law(self):
        if self.kind == "il":
            return _il_law(self.meadow, self.indexed)
        if self.kind == "equiv":
            return _equiv_law(self.meadow, self.system, self.equation, self.names, self.indexed)
        return _equation_law(self.meadow, self.equation, self.names, self.indexed, self.consts)


def _scan_range(job: _Job, domain: list, start: int, stop: int):
    """First failing flat index in [start, stop) and its (lhs, rhs), or None."""
    law = job.law()
    k = len(job.names)
    it = itertools.islice(itertools.product(domain, repeat=k), start, stop)
    for i, v in enumerate(it, start):
        r = law(v)
        if r is not None:
            return i, v, r
    return None


def _scan(job: _Job, domain: list, total: int, workers: int):
    if workers <= 1 or total < PARALLEL_THRESHOLD:
        return _scan_range(job, domain, 0, total)
    step = -(-total // workers)
    bounds = [(s, min(s + step, total)) for s in range(0, total, step)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(_scan_range, *zip(*[(job, domain, a, b) for a, b in bounds])))
    hits = [r for r in results if r is not None]
    return min(hits, key=lambda r: r[0]) if hits else None


def _run(m: Meadow, job: _Job, mode: Mode, subject: str) -> Verdict:
    k = len(job.names)
    if mode.kind == "closed":
        if k:
            raise MeadowError(f"closed mode needs a closed equation, found variables {list(job.names)}")
        job.indexed = False
        r = job.law()(())
        if r is None:
            return Verdict(subject, HOLDS_EXHAUSTIVE, 1)
        return Verdict(subject, FAILS, 1, _witness(m, (), (), *r))
    if mode.kind == "sample":
        job.indexed = False
        law = job.law()
        points = _sample_assignments(m, k, mode)
        for i, v in enumerate(points):
            r = law(v)
            if r is not None:
                return Verdict(subject, FAILS, i + 1, _witness(m, job.names, v, *r), samples=mode.count)
        return Verdict(subject, HOLDS_SAMPLED, len(points), samples=mode.count)
    domain = _domain(m, mode)
    total = len(domain) ** k
    if total > EXHAUSTIVE_CAP:
        raise TooManyAssignments(
            f"{len(domain)}^{k} = {total} assignments exceeds {EXHAUSTIVE_CAP}; use sampling"
        )
    use_index = mode.kind == "exhaustive" and m.tables is not None
    job.indexed = use_index
    scan_domain = list(range(len(domain))) if use_index else domain
    hit = _scan(job, scan_domain, total, mode.workers)
    if hit is None:
        return Verdict(subject, HOLDS_EXHAUSTIVE, total)
    i, v, (a, b) = hit
    if use_index:
        els = m.tables.elements
        v, a, b = tuple(els[j] for j in v), els[a], els[b]
    return Verdict(subject, FAILS, i + 1, _witness(m, job.names, v, a, b))


def equation_names(eq: Equation) -> tuple[str, ...]:
    return tuple(sorted(free_vars(eq.lhs) | free_vars(eq.rhs)))


def check_equation(
    m: Meadow, eq: Equation, mode: Mode = EXHAUSTIVE, consts: Mapping[str, Any] | None = None
) -> Verdict:
    names = equation_names(eq)
    job = _Job(m, "eq", eq, names, False, dict(consts or {}))
    verdict = _run(m, job, mode, str(eq))
    if not verdict.holds:
        _recheck(m, eq, verdict, names, consts)
    return verdict


def _recheck(m: Meadow, eq: Equation, verdict: Verdict, names, consts) -> None:
    # independent re-evaluation of the witness by the structural evaluator
    env = {n: m.parse_value(verdict.witness["assignment"][n]) for n in names}
    env.update(consts or {})
    a, b = eval_term(eq.lhs, m, env), eval_term(eq.rhs, m, env)
    if a == b or m.fmt(a) != verdict.witness["lhs"] or m.fmt(b) != verdict.witness["rhs"]:
        raise AssertionError(f"witness for {eq} does not re-evaluate: {verdict.witness}")


def check_equivalence(
    m: Meadow, system: Sequence[Equation], single: Equation, mode: Mode = EXHAUSTIVE
) -> Verdict:
    """Per assignment, ``single`` holds exactly when every equation of ``system`` does."""
    names = tuple(
        sorted(set(equation_names(single)).union(*(equation_names(e) for e in system)))
    )
    job = _Job(m, "equiv", single, names, False, system=tuple(system))
    subject = "(" + " and ".join(str(e) for e in system) + ") <-> " + str(single)
    verdict = _run(m, job, mode, subject)
    if not verdict.holds:
        env = {n: m.parse_value(verdict.witness["assignment"][n]) for n in names}
        verdict.witness["system_holds"] = all(
            eval_term(e.lhs, m, env) == eval_term(e.rhs, m, env) for e in system
        )
    return verdict


IL_SUBJECT = "x != 0 -> x * x^-1 = 1"


def check_il(m: Meadow, mode: Mode = EXHAUSTIVE) -> Verdict:
    """The inverse law, tested only at assignments with x nonzero."""
    job = _Job(m, "il", None, ("x",), False)
    return _run(m, job, mode, IL_SUBJECT)


@dataclass
class TheoryReport:
    theory: str
    verdicts: list[Verdict]

    @property
    def holds(self) -> bool:
        return all(v.holds for v in self.verdicts)


def check_theory(m: Meadow, theory: Theory | Iterable[Equation], mode: Mode = EXHAUSTIVE) -> TheoryReport:
    name = theory.name if isinstance(theory, Theory) else "equations"
    eqs = list(theory)
    verdicts = []
    for eq in eqs:
        eq_mode = mode
        if mode.kind == "closed" or not equation_names(eq):
            eq_mode = CLOSED
        verdicts.append(check_equation(m, eq, eq_mode))
    return TheoryReport(name, verdicts)


def report(
    operation: str,
    meadow: Meadow | str,
    subject: str,
    mode: Mode | str,
    verdicts: Sequence[Verdict],
    seed: int | None = None,
    **extra,
) -> dict:
    """JSON report in the shared schema; key order is fixed."""
    out: dict = {
        "operation": operation,
        "meadow": str(meadow),
        "theory": subject,
        "mode": mode.describe() if isinstance(mode, Mode) else mode,
    }
    if seed is None and isinstance(mode, Mode) and mode.kind == "sample":
        seed = mode.seed
    if seed is not None:
        out["seed"] = seed
    out["verdicts"] = [v.to_json() for v in verdicts]
    out.update(extra)
    out["passed"] = all(v.holds for v in verdicts) and extra.get("passed", True)
    return out


# ----------------------------------------------------------- combining laws


def combine_pair(r: Term, t: Term) -> Equation:
    """(1 - t*t^-1) * (1 - r*r^-1) = 1, equivalent to r = 0 together with t = 0."""
    one_minus = lambda u: Add(ONE, Neg(Mul(u, Inv(u))))  # noqa: E731
    return Equation(Mul(one_minus(t), one_minus(r)), ONE)


def to_zero_form(eq: Equation) -> Term:
    """The term s - t of an equation s = t (just s when t is 0)."""
    return eq.lhs if eq.rhs == ZERO else Add(eq.lhs, Neg(eq.rhs))


def reduce_to_single(eqs: Sequence[Equation]) -> Equation:
    """Fold a finite list of equations into one equivalent equation.

    A single equation is returned unchanged, so Md plus the result never
    needs more than eleven equations.
    """
    eqs = list(eqs)
    if not eqs:
        raise ValueError("reduce_to_single needs at least one equation")
    if len(eqs) == 1:
        return eqs[0]
    acc = to_zero_form(eqs[0])
    combined = None
    for eq in eqs[1:]:
        combined = combine_pair(acc, to_zero_form(eq))
        acc = Add(combined.lhs, Neg(ONE))
    return combined


# ------------------------------------------------------ initial algebra tools


def _pool_map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


@dataclass
class _PrimeModelJob:
    equations: tuple

    def __call__(self, p: int) -> dict:
        m = ModMeadow(p, prime=True)
        for i, eq in enumerate(self.equations):
            mode = EXHAUSTIVE if equation_names(eq) else CLOSED
            v = check_equation(m, eq, mode)
            if not v.holds:
                return {"p": p, "models": False, "failing_equation": i, "witness": v.witness}
        return {"p": p, "models": True}


def initial_spec_check(eqs: Theory | Sequence[Equation], prime_bound: int, workers: int = 1) -> dict:
    """Per-prime test of whether (Z/pZ)0 satisfies E, for p <= prime_bound.

    A prime field satisfying E refutes "Md + E specifies Q0" outright; E
    failing at every prime up to the bound is only evidence.
    """
    eqs = tuple(eqs)
    rows = _pool_map(_PrimeModelJob(eqs), primes_upto(prime_bound), workers)
    models = [r["p"] for r in rows if r["models"]]
    return {
        "operation": "initial",
        "equations": [str(e) for e in eqs],
        "prime_bound": prime_bound,
        "primes": rows,
        "conclusion": "refuted" if models else "consistent_up_to_bound",
        "refuting_primes": models,
        "passed": not models,
    }


def inverse_law_for(q: int) -> Equation:
    return Equation(Mul(numeral(q), Inv(numeral(q))), ONE)


def separating_prime(R: Iterable[int], bound: int) -> int | None:
    """Least prime p <= bound, p not in R, with every q in R invertible mod p
    while p itself is not."""
    R = sorted(set(R))
    for q in R:
        if not is_prime(q):
            raise ValueError(f"{q} is not prime")
    for p in primes_upto(bound):
        if p in R:
            continue
        m = ModMeadow(p, prime=True)
        if all(check_equation(m, inverse_law_for(q), CLOSED).holds for q in R) and not check_equation(
            m, inverse_law_for(p), CLOSED
        ).holds:
            return p
    return None


def check_ek(k: int, p: int, seed: int = 0) -> dict:
    """Evaluate each clause of E_k in Z/2pZ with the constant a read as p."""
    if p == 2 or not is_prime(p) or p <= k:
        raise ValueError(f"check_ek needs an odd prime p > k, got k={k}, p={p}")
    m = ModMeadow(2 * p)
    env = {"a": p}
    a = Const("a")
    clauses = [{"clause": "a != 0", "holds": eval_term(a, m, env) != m.zero}]
    for n in range(1, k):
        nn = numeral(n)
        clauses.append({"clause": f"{n} != 0", "holds": eval_term(nn, m) != m.zero})
        eq = Equation(Mul(nn, Inv(nn)), ONE)
        v = check_equation(m, eq, CLOSED)
        row = {"clause": str(eq), "holds": v.holds}
        if not v.holds:
            row["lhs"] = v.witness["lhs"]
        clauses.append(row)
    two_a = Equation(Mul(numeral(2), a), ZERO)
    clauses.append({"clause": "2 * a = 0", "holds": check_equation(m, two_a, CLOSED, env).holds})
    md_mode = EXHAUSTIVE if m.size**3 <= 10**6 else sample(2000, seed)
    md_rep = check_theory(m, theories.md(), md_mode)
    clauses.append({"clause": f"Md ({md_mode.describe()})", "holds": md_rep.holds})
    return {
        "operation": "ek-check",
        "meadow": m.descriptor,
        "k": k,
        "p": p,
        "clauses": clauses,
        "passed": all(c["holds"] for c in clauses),
    }


def bounded_initial_equality(s: Term, t: Term, prime_bound: int) -> dict:
    """Compare closed terms in Q0 and every (Z/pZ)0 with p <= prime_bound."""
    if free_vars(s) or free_vars(t):
        raise ValueError("bounded_initial_equality needs closed terms")
    for m in [RationalMeadow()] + [ModMeadow(p, prime=True) for p in primes_upto(prime_bound)]:
        a, b = eval_term(s, m), eval_term(t, m)
        if a != b:
            return {
                "verdict": "distinct",
                "witness": {"meadow": m.descriptor, "lhs": m.fmt(a), "rhs": m.fmt(b)},
            }
    return {"verdict": "equal_up_to_bound", "prime_bound": prime_bound}
