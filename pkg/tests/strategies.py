"""Hypothesis strategies for coefficients, parameter polynomials and NCPoly."""

from fractions import Fraction

from hypothesis import strategies as st

from weylforge.algebra import WEYL, NCPoly, Signature
from weylforge.coeffring import CPoly

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
nonzero_rationals = rationals.filter(lambda q: q != 0)

PARAMS = ("a", "b", "l0", "l1")


@st.composite
def cpolys(draw, names=PARAMS, max_degree=4, max_terms=4):
    out = CPoly.coerce(0)
    for _ in range(draw(st.integers(0, max_terms))):
        c = draw(rationals)
        mono = CPoly.const(c)
        budget = max_degree
        for name in names:
            e = draw(st.integers(0, budget))
            budget -= e
            if e:
                mono = mono * CPoly.param(name, e)
        out = out + mono
    return out


CSD3 = Signature.csd(3, [Fraction(2), Fraction(3), Fraction(-1, 2)])


@st.composite
def ncpolys(draw, sig=WEYL, max_degree=3, max_terms=5, coeffs=rationals):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = []
        budget = max_degree
        for _ in range(sig.n):
            e = draw(st.integers(0, budget))
            budget -= e
            exps.append(e)
        terms[tuple(exps)] = draw(coeffs)
    return NCPoly(sig, terms)


def monomial_exponents(n, max_exp):
    return st.tuples(*[st.integers(0, max_exp)] * n)
