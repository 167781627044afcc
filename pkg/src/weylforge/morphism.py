"""Endomorphisms given by generator images, elementary automorphisms and words.

Conventions:

* ``endo_compose(outer, inner)`` maps ``x_i`` to ``outer(inner(x_i))``.
* An elementary word ``A B C`` is the composite ``A o B o C``; the rightmost
  letter is applied first.
* ``Phi(n, lam)`` sends ``t -> t + lam*x^n`` and fixes ``x``; ``Psi(n, lam)``
  fixes ``t`` and sends ``x -> x + lam*t^n``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .algebra import WEYL, NCPoly, Signature, SignatureMismatch, commutator, deglex_key
from .coeffring import CPoly, FracElem, reduce_assumptions, simplify_coeff
from .systems import (
    LEX, CapReached, EqSystem, SolveResult, groebner_basis, linear_solve_exact,
    matrix_rank, solve_linear_rows,
)


class IllDefinedEndomorphism(ValueError):
    pass


class Endomorphism:
    """The algebra map sending generator ``x_i`` to ``images[i]``."""

    def __init__(self, sig: Signature, images: Sequence[NCPoly]):
        if len(images) != sig.n:
            raise ValueError(f"expected {sig.n} images, got {len(images)}")
        for img in images:
            if img.sig != sig:
                raise SignatureMismatch("image lives in a different algebra")
        self.sig = sig
        self.images = tuple(images)

    @classmethod
    def identity(cls, sig: Signature = WEYL) -> "Endomorphism":
        return cls(sig, sig.gens())

    @classmethod
    def from_pair(cls, p: NCPoly, q: NCPoly) -> "Endomorphism":
        return cls(p.sig, [p, q])

    @cached_property
    def well_defined(self) -> bool:
        return endo_check(self)

    def __call__(self, f: NCPoly) -> NCPoly:
        return endo_apply(self, f)

    def __eq__(self, other) -> bool:
        return isinstance(other, Endomorphism) and self.sig == other.sig and self.images == other.images

    __hash__ = None

    def __repr__(self) -> str:
        inner = ", ".join(f"{n} -> {img}" for n, img in zip(self.sig.names, self.images))
        return f"Endomorphism({inner})"


def endo_check(e: Endomorphism) -> bool:
    """True iff the images satisfy every defining relation of the algebra."""
    sig = e.sig
    for i in range(sig.n):
        for j in range(i + 1, sig.n):
            if commutator(e.images[j], e.images[i]) != sig.d(i + 1, j + 1):
                return False
    return True


class _Applier:
    """Applies one endomorphism to many polynomials, sharing image powers."""

    def __init__(self, e: Endomorphism):
        self.e = e
        self.powers: dict[tuple[int, int], NCPoly] = {}
        self.monos: dict[tuple, NCPoly] = {}

    def power(self, k: int, a: int) -> NCPoly:
        key = (k, a)
        if key not in self.powers:
            if a == 0:
                val = self.e.sig.one()
            elif a == 1:
                val = self.e.images[k]
            else:
                half = self.power(k, a // 2)
                val = half * half
                if a % 2:
                    val = val * self.e.images[k]
            self.powers[key] = val
        return self.powers[key]

    def monomial(self, exps: tuple) -> NCPoly:
        if exps not in self.monos:
            val = self.e.sig.one()
            for k, a in enumerate(exps):
                if a:
                    val = val * self.power(k, a)
            self.monos[exps] = val
        return self.monos[exps]

    def __call__(self, f: NCPoly) -> NCPoly:
        if f.sig != self.e.sig:
            raise SignatureMismatch("polynomial and endomorphism live in different algebras")
        out = self.e.sig.zero()
        for exps, c in f.items():
            out = out + self.monomial(exps).scale(c)
        return out


def endo_apply(e: Endomorphism, f: NCPoly) -> NCPoly:
    """Image of f: each standard monomial maps to the ordered product of image powers."""
    if not e.well_defined:
        raise IllDefinedEndomorphism("images do not satisfy the defining relations")
    return _Applier(e)(f)


def endo_compose(outer: Endomorphism, inner: Endomorphism) -> Endomorphism:
    """``outer o inner``: x_i maps to outer(inner(x_i))."""
    if outer.sig != inner.sig:
        raise SignatureMismatch("cannot compose endomorphisms of different algebras")
    if not outer.well_defined:
        raise IllDefinedEndomorphism("outer map is not well defined")
    apply = _Applier(outer)
    return Endomorphism(outer.sig, [apply(img) for img in inner.images])


def is_identity(e: Endomorphism) -> bool:
    return all(img == g for img, g in zip(e.images, e.sig.gens()))


# -- elementary automorphisms and words ------------------------------------

PHI = "Phi"
PSI = "Psi"


def elementary(kind: str, exponent: int, lam, sig: Signature = WEYL) -> Endomorphism:
    """``Phi``: t -> t + lam*x^n; ``Psi``: x -> x + lam*t^n (A_1 only)."""
    if not sig.is_weyl():
        raise ValueError("elementary automorphisms are defined on A_1")
    if exponent < 0:
        raise ValueError("exponent must be a natural number")
    t, x = sig.gens()
    lam = simplify_coeff(lam)
    kind = kind.capitalize()
    if kind == PHI:
        return Endomorphism(sig, [t + (x ** exponent).scale(lam), x])
    if kind == PSI:
        return Endomorphism(sig, [t, x + (t ** exponent).scale(lam)])
    raise ValueError(f"unknown elementary kind {kind!r}")


@dataclass(frozen=True)
class Letter:
    kind: str
    exponent: int
    lam: object

    def __str__(self) -> str:
        from .cli.printer import format_coefficient

        return f"{self.kind}({self.exponent}, {format_coefficient(simplify_coeff(self.lam))})"


@dataclass(frozen=True)
class ElementaryWord:
    letters: tuple = ()

    @classmethod
    def of(cls, *letters: tuple) -> "ElementaryWord":
        return cls(tuple(Letter(k, e, simplify_coeff(lam)) for k, e, lam in letters))

    @classmethod
    def parse(cls, text: str) -> "ElementaryWord":
        from .cli.parser import parse_word

        return cls.of(*parse_word(text))

    def params(self) -> set[str]:
        out: set[str] = set()
        for letter in self.letters:
            lam = letter.lam
            if isinstance(lam, (CPoly, FracElem)):
                out |= lam.params()
        return out

    def substitute(self, env: Mapping[str, object]) -> "ElementaryWord":
        from .coeffring import substitute_coeff

        return ElementaryWord(tuple(Letter(l.kind, l.exponent, substitute_coeff(l.lam, env))
                                    for l in self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(str(letter) for letter in self.letters)


def word_evaluate(w: ElementaryWord, sig: Signature = WEYL) -> Endomorphism:
    """Fold the letters into one endomorphism; the rightmost letter acts first."""
    acc = Endomorphism.identity(sig)
    for letter in w.letters:
        lam = letter.lam
        # acc o letter: only the moved generator changes
        t_img, x_img = acc.images
        if letter.kind == PHI:
            t_img = t_img + (x_img ** letter.exponent).scale(lam)
        else:
            x_img = x_img + (t_img ** letter.exponent).scale(lam)
        acc = Endomorphism(sig, [t_img, x_img])
    return acc


def verify_factorization(w: ElementaryWord, target: Endomorphism) -> bool:
    return word_evaluate(w, target.sig).images == target.images


def _div(a, b):
    b = simplify_coeff(b)
    if isinstance(b, Fraction):
        if b == 0:
            raise ZeroDivisionError("zero denominator in a word coefficient")
        return simplify_coeff(a * (1 / b))
    return simplify_coeff(FracElem.coerce(a) / b)


def _lams(params: Mapping, count: int) -> list:
    out = []
    for k in range(count):
        name = f"l{k}"
        if name not in params:
            raise KeyError(f"missing parameter {name}")
        v = params[name]
        out.append(Fraction(v) if isinstance(v, int) else v)
    return out


def upsilon_word(mu) -> ElementaryWord:
    """Word for t -> mu*t, x -> x/mu."""
    mu = simplify_coeff(mu)
    return ElementaryWord.of((PSI, 1, mu - mu * mu), (PHI, 1, _div(-1, mu)),
                             (PSI, 1, mu - 1), (PHI, 1, 1))


def upsilon(mu) -> Endomorphism:
    t, x = WEYL.gens()
    return Endomorphism(WEYL, [t.scale(mu), x.scale(_div(1, mu))])


def table1_word(case: int, m: int, params: Mapping) -> ElementaryWord:
    """Closed-form factorization of the ``table1.case{case}`` family of size m."""
    if m < 1:
        raise ValueError("m must be positive")
    if case == 1:
        lam = _lams(params, m + 2)
        l0, top = lam[0], lam[m + 1]
        letters = [(PSI, 1, _div(l0 * lam[1] - top + 1, l0 * top))]
        letters += [(PSI, k, _div(lam[k], top)) for k in range(2, m + 1)]
        letters += [(PHI, 1, l0), (PSI, 1, _div(top - 1, l0))]
        return ElementaryWord.of(*letters)
    if case == 2:
        lam = _lams(params, m + 1)
        if m == 1:
            l0, l1 = lam
            return ElementaryWord.of((PSI, 1, -l0 * l1 + l1), (PHI, 1, _div(-1, l1)), (PSI, 1, l1))
        top = lam[m]
        letters = [(PSI, 1, _div(lam[0] - 1, top))]
        letters += [(PSI, k, _div(lam[k - 1], top)) for k in range(2, m + 1)]
        letters += [(PHI, 1, top), (PSI, 1, _div(-1, top))]
        return ElementaryWord.of(*letters)
    raise ValueError("case must be 1 or 2")


def table2_word(case: int, n: int, params: Mapping) -> ElementaryWord:
    """Closed-form factorization of the ``table2.case{case}`` family of size n."""
    if n < 1:
        raise ValueError("n must be positive")
    if case == 1:
        lam = _lams(params, n + 2)
        l0, top = lam[0], lam[n + 1]
        letters = [(PHI, 1, _div(lam[1] * top - l0 + 1, l0 * top))]
        letters += [(PHI, k, _div(lam[k], l0)) for k in range(2, n + 1)]
        letters += [(PSI, 1, top), (PHI, 1, _div(l0 - 1, top))]
        return ElementaryWord.of(*letters)
    if case == 2:
        lam = _lams(params, n + 1)
        l0 = lam[0]
        letters = [(PHI, 1, -l0 * lam[1] + l0)]
        letters += [(PHI, k, -l0 * lam[k]) for k in range(2, n + 1)]
        letters += [(PSI, 1, _div(-1, l0)), (PHI, 1, l0)]
        return ElementaryWord.of(*letters)
    raise ValueError("case must be 1 or 2")


# -- inversion ---------------------------------------------------------------

@dataclass(frozen=True)
class InverseResult:
    outcome: str  # "found" or "not_found"
    bounds: tuple
    inverse: Endomorphism | None = None
    assumptions: frozenset = frozenset()

    @property
    def found(self) -> bool:
        return self.outcome == "found"


def _coefficient_rows(images: Sequence[NCPoly], names: Sequence[str], target: NCPoly) -> list:
    """Rows of sum_k c_k images[k] - target = 0, one per standard monomial."""
    monos = set(target.terms)
    for img in images:
        monos |= set(img.terms)
    rows = []
    for mono in sorted(monos, key=deglex_key, reverse=True):
        row = {}
        for name, img in zip(names, images):
            c = img.coefficient(mono)
            if c != 0:
                row[name] = c
        rows.append((row, simplify_coeff(-target.coefficient(mono))))
    return rows


def bounded_monomials(bounds: Sequence[int]) -> list[tuple]:
    return sorted(itertools.product(*(range(b + 1) for b in bounds)), key=deglex_key, reverse=True)


def endo_invert_ansatz(e: Endomorphism, bounds: Sequence[int]) -> InverseResult:
    """Look for an inverse whose images have per-variable degrees within ``bounds``."""
    bounds = tuple(bounds)
    sig = e.sig
    if len(bounds) != sig.n:
        raise ValueError("need one degree cap per variable")
    if not e.well_defined:
        raise IllDefinedEndomorphism("images do not satisfy the defining relations")
    monos = bounded_monomials(bounds)
    apply = _Applier(e)
    mapped = [apply(sig.monomial(m)) for m in monos]
    names = [f"_c{k}" for k in range(len(monos))]
    images, assumptions = [], set()
    for g in sig.gens():
        res = solve_linear_rows(_coefficient_rows(mapped, names, g), names)
        if res.outcome != "assignment":
            return InverseResult("not_found", bounds)
        assumptions |= res.assumptions
        terms = {}
        for name, mono in zip(names, monos):
            v = res.assignment.get(name, 0)
            v = simplify_coeff(v.substitute({u: 0 for u in res.free}) if isinstance(v, (CPoly, FracElem)) else v)
            if v != 0:
                terms[mono] = v
        images.append(NCPoly(sig, terms))
    inv = Endomorphism(sig, images)
    if not (inv.well_defined and is_identity(endo_compose(e, inv)) and is_identity(endo_compose(inv, e))):
        return InverseResult("not_found", bounds)
    return InverseResult("found", bounds, inv, reduce_assumptions(assumptions))


def linear_part_rank(e: Endomorphism):
    """Rank of the coefficient matrix of homogeneous linear images and whether it is full."""
    n = e.sig.n
    units = [tuple(1 if k == j else 0 for k in range(n)) for j in range(n)]
    rows = []
    for img in e.images:
        if img.degree() > 1 or img.constant_term() != 0:
            raise ValueError("linear_part_rank needs homogeneous linear images")
        rows.append([img.coefficient(u) for u in units])
    rank, _ = matrix_rank(rows)
    return rank, rank == n


# -- solving for word parameters --------------------------------------------

def _numerator(c) -> CPoly:
    c = simplify_coeff(c)
    if isinstance(c, FracElem):
        return c.num
    return CPoly.coerce(c)


def factorization_system(template: ElementaryWord, target: Endomorphism) -> EqSystem:
    """Coefficient-match ``word_evaluate(template)`` against ``target``."""
    unknowns = sorted(template.params() - _endo_params(target))
    composed = word_evaluate(template, target.sig)
    eqs, labels = [], []
    for k, (got, want) in enumerate(zip(composed.images, target.images)):
        diff = got - want
        for mono, c in diff.sorted_terms():
            num = _numerator(c)
            if not num.is_zero():
                eqs.append(num)
                labels.append((k, mono))
    return EqSystem(tuple(unknowns), tuple(eqs), tuple(labels))


def _endo_params(e: Endomorphism) -> set[str]:
    out: set[str] = set()
    for img in e.images:
        out |= img.params()
    return out


def _is_linear(eqs: Sequence[CPoly], unknowns: set[str]) -> bool:
    for eq in eqs:
        for mono, _ in eq.items():
            if sum(k for n, k in mono if n in unknowns) > 1:
                return False
    return True


def _single_unknown_step(eqs: list[CPoly], unknowns: set[str]):
    """Find an equation a*u + b with a, b free of unknowns; prefer constant a."""
    best = None
    for eq in eqs:
        present = eq.params() & unknowns
        if len(present) != 1:
            continue
        (u,) = present
        if eq.degree_in(u) != 1:
            continue
        parts = eq.coefficients_in(u)
        a, b = parts.get(1, CPoly.coerce(0)), parts.get(0, CPoly.coerce(0))
        cand = (u, a, b)
        if a.is_constant():
            return cand
        if best is None:
            best = cand
    return best


def solve_factorization_params(template: ElementaryWord, target: Endomorphism,
                               caps: tuple[int, int] | None = None) -> SolveResult:
    """Solve for the symbolic lambdas of ``template`` so that it evaluates to ``target``.

    Unknowns are the template parameters that do not occur in the target.
    Equations with a single linearly occurring unknown are solved and
    propagated first; a remaining linear block goes to exact elimination and a
    remaining nonlinear block with rational coefficients to Groebner bases.
    """
    system = factorization_system(template, target)
    remaining = set(system.unknowns)
    eqs = list(system.equations)
    assignment: dict = {}
    assumptions: set = set()
    used_groebner = False
    while True:
        eqs = [e for e in eqs if not e.is_zero()]
        for e in eqs:
            if not (e.params() & remaining):
                return SolveResult("inconsistent", assumptions=frozenset(assumptions))
        if not eqs:
            break
        step = _single_unknown_step(eqs, remaining)
        if step is not None:
            u, a, b = step
            value = _div(-b, a)
            if not a.is_constant():
                assumptions |= (FracElem.coerce(1) / a).assumptions
            assignment[u] = value
            remaining.discard(u)
            eqs = [_numerator(e.substitute({u: value})) for e in eqs]
            continue
        if _is_linear(eqs, remaining):
            order = [u for u in system.unknowns if u in remaining]
            res = linear_solve_exact(EqSystem(tuple(order), tuple(eqs)))
            if res.outcome != "assignment":
                return SolveResult(res.outcome, assumptions=frozenset(assumptions | res.assumptions))
            assignment.update(res.assignment)
            assumptions |= res.assumptions
            remaining = set(res.free)
            eqs = []
            break
        extra = set().union(*(e.params() for e in eqs)) - remaining
        if used_groebner or extra:
            return SolveResult("unknown", assumptions=frozenset(assumptions))
        order = [u for u in system.unknowns if u in remaining]
        basis = groebner_basis(eqs, LEX, caps, variables=order)
        if isinstance(basis, CapReached):
            return SolveResult("unknown", assumptions=frozenset(assumptions))
        if any(b.is_constant() for b in basis):
            return SolveResult("inconsistent", assumptions=frozenset(assumptions))
        eqs = list(basis)
        used_groebner = True
    # back-substitute values that mention unknowns solved later
    for _ in range(len(assignment)):
        changed = False
        for u, v in list(assignment.items()):
            if isinstance(v, (CPoly, FracElem)) and v.params() & set(assignment):
                assignment[u] = simplify_coeff(v.substitute({k: w for k, w in assignment.items() if k != u}))
                changed = True
        if not changed:
            break
    ordered = {u: assignment[u] for u in system.unknowns if u in assignment}
    free = tuple(u for u in system.unknowns if u in remaining)
    return SolveResult("assignment", ordered, frozenset(assumptions), free)
