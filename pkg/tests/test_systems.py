import json
import random
from collections import Counter
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from weylforge.algebra import WEYL, Signature, commutator
from weylforge.cli.printer import format_coefficient
from weylforge.coeffring import CPoly
from weylforge.dixmier import build_identity_battery, decompose_pair, family_instantiate
from weylforge.systems import (
    DEGLEX, LEX, CapReached, EqSystem, caps_from_env, check_assignment, generate_dixmier_system,
    generate_skew_system, generic_weyl_pair, groebner_basis, ideal_contains_one, linear_solve_exact,
    normal_form, s_polynomial,
)

from oracles import sign_normalized, sympy_groebner, to_sympy, weyl_commutator_oracle
from strategies import nonzero_rationals, rationals

GOLDEN = Path(__file__).parent / "data" / "dixmier_system_2_2.txt"
P = CPoly.param


def golden_equations():
    lines = [l for l in GOLDEN.read_text().splitlines() if l and not l.startswith("#")]
    return [to_sympy(l) for l in lines]


def normalized_multiset(exprs):
    return Counter(str(sign_normalized(e)) for e in exprs)


class TestDixmierSystem:
    def test_golden_2_2(self):
        catalog, system = generate_dixmier_system(2, 2)
        assert len(system) == 15
        ours = [to_sympy(format_coefficient(e)) for e in system.equations]
        assert normalized_multiset(ours) == normalized_multiset(golden_equations())

    def test_golden_first_equation_is_the_unit_one(self):
        _, system = generate_dixmier_system(2, 2)
        assert system.labels[-1] == (0, 0)
        assert sign_normalized(to_sympy(format_coefficient(system.equations[-1]))) == \
            sign_normalized(golden_equations()[0])

    def test_1_1(self):
        catalog, system = generate_dixmier_system(1, 1)
        assert catalog == ("p0_1", "p1_0", "p1_1", "q0_1", "q1_0", "q1_1")
        expected = {
            P("q1_0") * P("p0_1") - P("p1_0") * P("q0_1") - 1,
            P("q1_1") * P("p0_1") - P("p1_1") * P("q0_1"),
            P("q1_0") * P("p1_1") - P("p1_0") * P("q1_1"),
        }
        got = set(system.equations) | {-e for e in system.equations}
        assert expected <= got and len(system) == 3

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_table1_case1_solves_the_system(self, m):
        rng = random.Random(m)
        env = {f"l{k}": Fraction(rng.randint(1, 9), rng.randint(1, 4)) for k in range(m + 2)}
        p, q = family_instantiate("table1.case1", env, index=m)
        _, system = generate_dixmier_system(1, m)
        values = {}
        for name in system.unknowns:
            i, j = (int(v) for v in name[1:].split("_"))
            values[name] = (p if name[0] == "p" else q).coefficient((j, i))
        assert all(e.substitute(values) == 0 for e in system.equations)

    def test_json(self):
        _, system = generate_dixmier_system(1, 1)
        data = system.to_json()
        assert json.loads(json.dumps(data)) == data
        assert len(data["equations"]) == 3

    def test_bad_sizes(self):
        with pytest.raises(ValueError):
            generate_dixmier_system(0, 2)


@given(st.integers(1, 2), st.integers(1, 2), st.data())
def test_system_soundness(n, m, data):
    catalog, system = generate_dixmier_system(n, m)
    values = {u: data.draw(rationals) for u in catalog}
    p, q = (f.substitute(values) for f in generic_weyl_pair(n, m))
    oracle = weyl_commutator_oracle(dict(q.terms), dict(p.terms))
    oracle[(0, 0)] = oracle.get((0, 0), 0) - 1
    for label, eq in zip(system.labels, system.equations):
        assert eq.substitute(values) == oracle.get(label, 0)
    assert {l for l, v in oracle.items() if v} <= set(system.labels)


@pytest.mark.parametrize("n,m", [(1, 1), (1, 3), (2, 2), (3, 2)])
def test_battery_scalarizes_to_the_system(n, m):
    p, q = generic_weyl_pair(n, m)
    battery = build_identity_battery(decompose_pair(p, q))
    scalar = []
    for r in battery.residuals:
        for _, part in CPoly.coerce(r).coefficients_in("t").items():
            if not part.is_zero():
                scalar.append(to_sympy(format_coefficient(part)))
    _, system = generate_dixmier_system(n, m)
    ours = [to_sympy(format_coefficient(e)) for e in system.equations]
    assert normalized_multiset(scalar) == normalized_multiset(ours)


class TestSkewSystem:
    def test_case14_solution(self):
        from weylforge.corpus import Instance, find_record

        record = find_record("skew.csd3.case14")
        sig = Signature.csd(3, [2, 3, 2])
        _, system = generate_skew_system(sig, (1, 1, 1))
        for params in record["params"]:
            tuple_ = Instance(record, params).polys("tuple")
            values = {name: Fraction(0) for name in system.unknowns}
            for k, f in enumerate(tuple_):
                for mono, c in f.items():
                    values[f"c{k + 1}_" + "_".join(map(str, mono))] = c
            assert all(e.substitute(values) == 0 for e in system.equations)

    def test_contains_theorem_block(self):
        sig = Signature.csd(3)
        x1, x2, _ = sig.gens()
        # p3 restricted to the span of x1, x2 (and x1 x2): the theorem's setting
        bounds = [(1, 1, 1), (1, 1, 1), (1, 1, 0)]
        catalog, system = generate_skew_system(sig, bounds, fixed={0: x1, 1: x2})
        assert catalog == ("c3_0_1_0", "c3_1_0_0", "c3_1_1_0")
        nonzero = [e for e in system.equations if not e.is_zero()]
        res = linear_solve_exact(EqSystem(catalog, tuple(nonzero)))
        assert res.outcome == "assignment"
        d12, d13, d23 = P("d12"), P("d13"), P("d23")
        assert res.assignment["c3_1_0_0"] == -d23 / d12
        assert res.assignment["c3_0_1_0"] == d13 / d12
        assert res.assignment["c3_1_1_0"] == 0

    def test_csd2_reduces_to_weyl(self):
        sig = Signature.csd(2, [1])
        t = sig.gen(0)
        catalog, system = generate_skew_system(sig, (1, 1), fixed={0: t})
        assert catalog == ("c2_0_1", "c2_1_0", "c2_1_1")
        assert set(system.equations) == {P("c2_0_1") - 1, P("c2_1_1")}


class TestLinear:
    def test_trivial(self):
        res = linear_solve_exact(EqSystem(("a",), (P("a") - 1,)))
        assert res.assignment == {"a": 1} and not res.assumptions

    def test_free_unknowns(self):
        res = linear_solve_exact(EqSystem(("a", "b"), (P("a") + P("b") - 2,)))
        assert res.outcome == "assignment" and res.free == ("b",)
        assert res.assignment["a"] == 2 - P("b")

    def test_inconsistent(self):
        res = linear_solve_exact(EqSystem(("a",), (P("a") - 1, P("a") - 2)))
        assert res.outcome == "inconsistent"

    def test_symbolic_pivot(self):
        res = linear_solve_exact(EqSystem(("a",), (P("l0") * P("a") - 1,)))
        assert res.assignment["a"] == 1 / P("l0")
        assert res.assumptions == frozenset({P("l0")})

    def test_constant_pivots_preferred(self):
        eqs = (P("l0") * P("a") + P("b") - 1, P("a") - 3)
        res = linear_solve_exact(EqSystem(("a", "b"), eqs))
        assert res.assignment == {"a": 3, "b": 1 - 3 * P("l0")}
        assert not res.assumptions

    def test_nonlinear_rejected(self):
        with pytest.raises(ValueError):
            linear_solve_exact(EqSystem(("a",), (P("a") ** 2 - 1,)))

    @given(st.lists(st.lists(st.integers(-4, 4), min_size=4, max_size=4), min_size=1, max_size=4),
           st.lists(nonzero_rationals, min_size=2, max_size=2))
    def test_assignment_solves_the_system(self, rows, params):
        names = ("a", "b", "c")
        eqs = []
        for r in rows:
            eq = CPoly.coerce(r[3]) * P("l0")
            for name, coeff in zip(names, r[:3]):
                eq = eq + P(name) * (coeff + (P("l1") if coeff == 1 else 0))
            eqs.append(eq)
        system = EqSystem(names, tuple(eqs))
        res = linear_solve_exact(system)
        if res.outcome == "assignment":
            assert check_assignment(system, res)


X, Y, Z = P("x"), P("y"), P("z")


def _as_sympy(basis):
    return {to_sympy(format_coefficient(b)) for b in basis}


def _monic(exprs, variables, order):
    import sympy

    order = "grlex" if order == DEGLEX else order
    syms = sympy.symbols(variables)
    return {sympy.expand(e / sympy.Poly(e, *syms).LC(order=order)) for e in exprs}


class TestGroebner:
    def test_circle_line(self):
        basis = groebner_basis([X**2 + Y**2 - 1, X - Y], LEX)
        assert basis == [Y**2 - Fraction(1, 2), X - Y]

    def test_single_generator(self):
        assert groebner_basis([X]) == [X]

    def test_unit_ideal(self):
        assert groebner_basis([X, X + 1]) == [CPoly.coerce(1)]
        assert ideal_contains_one([X, X + 1]) is True
        assert ideal_contains_one([X - Y]) is False

    def test_weyl_specialization_is_inconsistent(self):
        _, system = generate_dixmier_system(1, 1)
        zero = {"p0_1": 0, "q0_1": 0, "p1_0": 0}
        gens = [e.substitute(zero) for e in system.equations]
        assert ideal_contains_one([CPoly.coerce(g) for g in gens]) is True

    def test_normal_form(self):
        assert normal_form(X**2 * Y, [X * Y - 1], LEX) == X
        f = X**3 - Y
        assert normal_form(f, [f]) == 0
        assert normal_form(CPoly.coerce(7), [X]) == 7

    def test_cap(self):
        gens = [X**3 - 2 * X * Y, X**2 * Y - 2 * Y**2 + X]
        res = groebner_basis(gens, DEGLEX, (2, 20))
        assert isinstance(res, CapReached)
        assert ideal_contains_one(gens, (2, 20)) is None

    def test_caps_from_env(self, monkeypatch):
        monkeypatch.setenv("WEYLFORGE_GROEBNER_CAPS", "5,7")
        assert caps_from_env() == (5, 7)
        monkeypatch.setenv("WEYLFORGE_GROEBNER_CAPS", "oops")
        with pytest.raises(ValueError):
            caps_from_env()

    @pytest.mark.parametrize("order", [LEX, DEGLEX])
    @pytest.mark.parametrize("gens", [
        ["x^2 + y^2 - 1", "x - y"],
        ["x^2 - y", "x*y - 1"],
        ["x^2*y - z", "y^2 - x*z", "x*z - 1"],
        ["x^3 - 2*x*y", "x^2*y - 2*y^2 + x"],
    ])
    def test_agrees_with_sympy(self, order, gens):
        from weylforge.cli.parser import parse_coefficient

        polys = [CPoly.coerce(parse_coefficient(g)) for g in gens]
        basis = groebner_basis(polys, order, variables=["x", "y", "z"])
        variables = ["x", "y", "z"]
        assert _as_sympy(basis) == _monic(sympy_groebner(gens, variables, order), variables, order)


polys3 = st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2)),
                  min_size=1, max_size=3)


@given(st.lists(polys3, min_size=1, max_size=3), st.sampled_from([LEX, DEGLEX]))
def test_groebner_correctness(gens_data, order):
    gens = []
    for terms in gens_data:
        g = CPoly.coerce(0)
        for c, a, b, e in terms:
            g = g + X**a * Y**b * Z**e * c
        if not g.is_zero():
            gens.append(g)
    if not gens:
        return
    variables = ["x", "y", "z"]
    basis = groebner_basis(gens, order, (2000, 12), variables=variables)
    if isinstance(basis, CapReached):
        return
    for i, f in enumerate(basis):
        for g in basis[i + 1:]:
            assert normal_form(s_polynomial(f, g, order, variables), basis, order, variables) == 0
    for g in gens:
        assert normal_form(g, basis, order, variables) == 0
