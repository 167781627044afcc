"""Independent reference implementations used only by the tests.

None of these import the library's arithmetic; they work on plain dicts,
Fractions and sympy objects so that agreement with the library is evidence
rather than a tautology.
"""

from __future__ import annotations

from fractions import Fraction

import sympy


# -- multiplication by iterated rewriting --------------------------------

def rewrite_product(alpha, beta, d):
    """Product of standard monomials x^alpha * x^beta in CSD_n by rewriting.

    ``d`` maps (i, j), 1-based with i < j, to a Fraction. Letters of x^beta
    are appended one at a time; a letter x_i arriving after a larger letter
    x_j uses only the defining relation x_j x_i = x_i x_j + d_ij, recursively.
    """
    n = len(alpha)
    cache: dict = {}

    def times_letter(exps, i):
        key = (exps, i)
        if key in cache:
            return cache[key]
        j = max((k for k in range(n) if exps[k]), default=-1)
        if j <= i:
            bumped = list(exps)
            bumped[i] += 1
            out = {tuple(bumped): Fraction(1)}
        else:
            # m = m' x_j, so m x_i = (m' x_i) x_j + d_ij m'
            rest = list(exps)
            rest[j] -= 1
            rest = tuple(rest)
            out = {}
            for mono, c in times_letter(rest, i).items():
                grown = list(mono)
                grown[j] += 1
                out[tuple(grown)] = out.get(tuple(grown), 0) + c
            out[rest] = out.get(rest, 0) + d[(i + 1, j + 1)]
            out = {k: v for k, v in out.items() if v != 0}
        cache[key] = out
        return out

    current = {tuple(alpha): Fraction(1)}
    for i, b in enumerate(beta):
        for _ in range(b):
            nxt: dict = {}
            for mono, c in current.items():
                for m2, c2 in times_letter(mono, i).items():
                    nxt[m2] = nxt.get(m2, 0) + c * c2
            current = {k: v for k, v in nxt.items() if v != 0}
    return current


# -- A_1 as differential operators ---------------------------------------

T = sympy.Symbol("t")
_F = sympy.Function("f")(T)


def as_operator(terms):
    """The A_1 element sum c t^a x^b as a function acting on sympy expressions.

    In A_1 the relation x t = t x + 1 is realized by t = multiplication by t
    and x = d/dt.
    """
    def act(g):
        out = 0
        for (a, b), c in terms.items():
            out += sympy.Rational(c.numerator, c.denominator) * T**a * sympy.diff(g, T, b)
        return sympy.expand(out)
    return act


def weyl_commutator_oracle(q_terms, p_terms):
    """[q, p] computed by acting on a generic function; returns {(a, b): c}.

    The result of [q, p] applied to f(t) is sum c_{a,b} t^a f^{(b)}(t); the
    coefficients are read back off the derivatives of f.
    """
    q, p = as_operator(q_terms), as_operator(p_terms)
    expr = sympy.expand(q(p(_F)) - p(q(_F)))
    order = max([b for _, b in q_terms] + [b for _, b in p_terms] + [0]) * 2
    out = {}
    for b in range(order + 1, -1, -1):
        deriv = sympy.diff(_F, T, b) if b else _F
        coeff = sympy.expand(expr.coeff(deriv))
        expr = sympy.expand(expr - coeff * deriv)
        poly = sympy.Poly(coeff, T)
        for (a,), c in poly.terms():
            if c != 0:
                out[(a, b)] = Fraction(int(c.p), int(c.q))
    assert expr == 0, "leftover terms in the operator expansion"
    return out


# -- Groebner bases ------------------------------------------------------

def sympy_groebner(polys_text, variables, order="lex"):
    """Reduced Groebner basis from sympy, as a set of expanded expressions."""
    syms = sympy.symbols(variables)
    exprs = [sympy.sympify(s.replace("^", "**")) for s in polys_text]
    order = "grlex" if order == "deglex" else order
    basis = sympy.groebner(exprs, *syms, order=order)
    return {sympy.expand(g) for g in basis.exprs}


def to_sympy(text):
    return sympy.expand(sympy.sympify(text.replace("^", "**")))


def sign_normalized(expr):
    """Fix the sign so the leading coefficient (sympy's default order) is positive."""
    expr = sympy.expand(expr)
    if expr == 0:
        return expr
    lead = sympy.Poly(expr, *sorted(expr.free_symbols, key=str)).LC()
    return expr if lead > 0 else -expr
