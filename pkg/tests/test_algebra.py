from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from weylforge.algebra import (
    WEYL, NCPoly, Signature, SignatureMismatch, commutator, deglex_key, is_central, leading_data,
    mass, nc_mul,
)
from weylforge.coeffring import CPoly

from oracles import rewrite_product
from strategies import CSD3, monomial_exponents, ncpolys, nonzero_rationals

t, x = WEYL.gens()


class TestMultiplication:
    def test_defining_relation(self):
        assert nc_mul(x, t) == t * x + 1

    def test_one_rewrite(self):
        assert (t + x) * t == t**2 + t * x + 1

    def test_two_rewrites(self):
        assert x * t**2 == t**2 * x + 2 * t

    def test_symbolic_constant(self):
        sig = Signature.csd(3)
        x1, x2, _ = sig.gens()
        assert x2 * x1 == x1 * x2 + CPoly.param("d12")

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            t * CSD3.gen(0)

    def test_zero_constant_rejected(self):
        with pytest.raises(ValueError):
            Signature.csd(2, [0])

    def test_n_at_least_two(self):
        with pytest.raises(ValueError):
            Signature.csd(1, [])


class TestCommutator:
    def test_generators(self):
        assert commutator(x, t) == 1
        assert commutator(t, t) == 0
        assert commutator(t + x, t) == 1


class TestLeadingData:
    def test_degree_wins(self):
        ld = leading_data(t + x**2)
        assert ld.lm == (0, 2) and ld.deg == 2

    def test_leftmost_exponent_breaks_ties(self):
        assert leading_data(t * x + t**2).lm == (2, 0)

    def test_constant(self):
        ld = leading_data(WEYL.const(5))
        assert ld.lm == (0, 0) and ld.deg == 0 and ld.lc == 5

    def test_zero(self):
        assert leading_data(WEYL.zero()) is None


class TestMass:
    def test_examples(self):
        assert mass(t + x) == 2
        assert mass(WEYL.one()) == 1
        assert mass(t * x + 3) == 1

    def test_errors(self):
        with pytest.raises(ValueError):
            mass(WEYL.zero())
        with pytest.raises(ValueError):
            mass(CSD3.gen(0))


class TestCentral:
    def test_examples(self):
        assert is_central(WEYL.const(5))
        assert not is_central(t)
        assert not is_central(CSD3.gen(0))

    def test_scalars_in_csd3(self):
        for c in (Fraction(0), Fraction(1), Fraction(-7, 3)):
            assert is_central(CSD3.const(c))


@given(monomial_exponents(3, 6), monomial_exponents(3, 6))
def test_closed_form_matches_rewriting(alpha, beta):
    d = {(1, 2): Fraction(2), (1, 3): Fraction(3), (2, 3): Fraction(-1, 2)}
    assert dict(CSD3.mono_mul(alpha, beta)) == rewrite_product(alpha, beta, d)


@given(ncpolys(CSD3), ncpolys(CSD3), ncpolys(CSD3))
def test_associativity(f, g, h):
    assert (f * g) * h == f * (g * h)


@given(ncpolys(CSD3), ncpolys(CSD3))
def test_degree_is_additive(f, g):
    if f and g:
        assert (f * g).degree() == f.degree() + g.degree()


@given(ncpolys(CSD3), ncpolys(CSD3))
def test_commutator_drops_degree(f, g):
    if f.degree() > 0 and g.degree() > 0:
        c = commutator(f, g)
        assert c.is_zero() or c.degree() < f.degree() + g.degree()


@given(ncpolys(CSD3))
def test_central_means_scalar(f):
    if is_central(f):
        assert f.is_constant()


@given(monomial_exponents(3, 3), monomial_exponents(3, 3), monomial_exponents(3, 2), monomial_exponents(3, 2))
def test_leading_monomial_is_monotone(a, b, g, l):
    if a == b:
        return
    if deglex_key(a) < deglex_key(b):
        a, b = b, a
    mono = lambda e: CSD3.monomial(e)
    left = leading_data(mono(g) * mono(a) * mono(l)).lm
    right = leading_data(mono(g) * mono(b) * mono(l)).lm
    assert deglex_key(left) > deglex_key(right)


@given(ncpolys(WEYL, coeffs=nonzero_rationals))
def test_mass_counts_graded_components(f):
    if f:
        assert mass(f) == len({a - b for a, b in f.terms})
