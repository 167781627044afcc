"""Coefficient-matching equation systems and their exact solvers.

* :func:`generate_dixmier_system` and :func:`generate_skew_system` build the
  polynomial equations in unknown coefficients whose solutions are Dixmier
  pairs (resp. skew tuples).
* :func:`linear_solve_exact` runs Gaussian elimination over the fraction field
  of the remaining parameters and records every symbolic pivot as an
  assumption.
* :func:`groebner_basis` is a plain Buchberger algorithm with caps, used for
  small nonlinear consistency questions.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import WEYL, NCPoly, Signature, commutator, deglex_key
from .coeffring import (CPoly, FracElem, NotDivisible, cancel_factors, param_key,
                        reduce_assumptions, simplify_coeff)

DEFAULT_MAX_PAIRS = 10_000
DEFAULT_MAX_DEGREE = 20
CAPS_ENV = "WEYLFORGE_GROEBNER_CAPS"


@dataclass(frozen=True)
class EqSystem:
    """Equations (each required to vanish) in the listed unknowns."""

    unknowns: tuple
    equations: tuple
    labels: tuple = ()

    def to_json(self) -> dict:
        return {"unknowns": list(self.unknowns), "equations": [str(e) for e in self.equations]}

    def __len__(self) -> int:
        return len(self.equations)


@dataclass(frozen=True)
class SolveResult:
    outcome: str  # "assignment", "inconsistent" or "unknown"
    assignment: dict = field(default_factory=dict)
    assumptions: frozenset = frozenset()
    free: tuple = ()

    @property
    def ok(self) -> bool:
        return self.outcome == "assignment"


def _coefficient_equations(f: NCPoly) -> tuple[list[CPoly], list[tuple]]:
    """One equation per standard monomial of f, deglex-descending."""
    eqs, labels = [], []
    for m, c in f.sorted_terms():
        if isinstance(c, FracElem):
            c = c.num  # the denominator is asserted nonzero
        eqs.append(CPoly.coerce(c))
        labels.append(m)
    return eqs, labels


def weyl_unknowns(n: int, m: int) -> tuple[list[str], list[str]]:
    """Names p{i}_{j}, q{i}_{j} for the t^j x^i coefficients, without (0, 0)."""
    ps, qs = [], []
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            ps.append(f"p{i}_{j}")
            qs.append(f"q{i}_{j}")
    return ps, qs


def generic_weyl_pair(n: int, m: int) -> tuple[NCPoly, NCPoly]:
    """p, q with unknown coefficients p_{i,j} t^j x^i (constant terms omitted)."""
    ps, qs = weyl_unknowns(n, m)
    p_terms, q_terms = {}, {}
    for name_p, name_q in zip(ps, qs):
        i, j = (int(v) for v in name_p[1:].split("_"))
        p_terms[(j, i)] = CPoly.param(name_p)
        q_terms[(j, i)] = CPoly.param(name_q)
    return NCPoly(WEYL, p_terms), NCPoly(WEYL, q_terms)


def generate_dixmier_system(n: int, m: int) -> tuple[tuple, EqSystem]:
    """Equations for [q, p] = 1 with deg_x <= n, deg_t <= m."""
    if n < 1 or m < 1:
        raise ValueError("need n, m >= 1")
    p, q = generic_weyl_pair(n, m)
    ps, qs = weyl_unknowns(n, m)
    eqs, labels = _coefficient_equations(commutator(q, p) - 1)
    catalog = tuple(ps + qs)
    return catalog, EqSystem(catalog, tuple(eqs), tuple(labels))


def _bounded_monomials(caps: Sequence[int], with_constant: bool) -> list[tuple]:
    monos = [m for m in itertools.product(*(range(c + 1) for c in caps))]
    if not with_constant:
        monos = [m for m in monos if any(m)]
    return sorted(monos, key=deglex_key)


def generate_skew_system(sig: Signature, bounds, fixed: Mapping[int, NCPoly] | None = None) -> tuple[tuple, EqSystem]:
    """Equations for [p_j, p_i] = d_ij with p_k having unknown coefficients.

    ``bounds`` is either one per-variable cap sequence shared by all p_k or a
    list of such sequences, one per p_k.  ``fixed`` pins some p_k (0-based) to
    given polynomials.  Unknowns are named ``c{k}_{e1}_..._{en}``.
    """
    fixed = dict(fixed or {})
    n = sig.n
    if bounds and isinstance(bounds[0], int):
        bounds = [tuple(bounds)] * n
    if len(bounds) != n:
        raise ValueError("need one bound vector per polynomial")
    polys, catalog = [], []
    for k in range(n):
        if k in fixed:
            polys.append(fixed[k])
            continue
        if len(bounds[k]) != n:
            raise ValueError("each bound vector needs one cap per variable")
        terms = {}
        for mono in _bounded_monomials(bounds[k], with_constant=False):
            name = f"c{k + 1}_" + "_".join(str(e) for e in mono)
            catalog.append(name)
            terms[mono] = CPoly.param(name)
        polys.append(NCPoly(sig, terms))
    eqs, labels = [], []
    for i in range(n):
        for j in range(i + 1, n):
            e, lab = _coefficient_equations(commutator(polys[j], polys[i]) - sig.d(i + 1, j + 1))
            eqs.extend(e)
            labels.extend((i + 1, j + 1, m) for m in lab)
    return tuple(catalog), EqSystem(tuple(catalog), tuple(eqs), tuple(labels))


# -- exact linear elimination ----------------------------------------------

def _to_field(c: CPoly):
    return c.constant_value() if c.is_constant() else FracElem.coerce(c)


def _is_constant(c) -> bool:
    return isinstance(c, Fraction) or (isinstance(c, FracElem) and c.is_constant())


def linear_rows(sys: EqSystem) -> list[tuple[dict, object]]:
    """Split each equation into ``({unknown: coefficient}, constant)``."""
    unknowns = set(sys.unknowns)
    rows = []
    for eq in sys.equations:
        eq = CPoly.coerce(eq)
        coeffs: dict = {}
        const = {}
        for mono, c in eq.items():
            hits = [(n, e) for n, e in mono if n in unknowns]
            if not hits:
                const[mono] = c
                continue
            if len(hits) > 1 or hits[0][1] > 1:
                raise ValueError(f"equation is not linear in the unknowns: {eq}")
            name = hits[0][0]
            rest = tuple((n, e) for n, e in mono if n != name)
            coeffs.setdefault(name, {})[rest] = c
        row = {name: _to_field(CPoly(t)) for name, t in coeffs.items()}
        rows.append(({k: v for k, v in row.items() if v != 0}, _to_field(CPoly(const))))
    return rows


def _pivot_assumptions(c) -> frozenset:
    if isinstance(c, FracElem) and not c.is_constant():
        return (FracElem.coerce(1) / c).assumptions
    return frozenset()


def _is_rational_rows(rows) -> bool:
    return all(isinstance(v, Fraction) for r, c in rows for v in (*r.values(), c))


def _clear_denominators(row: dict, const) -> tuple[dict, CPoly, set]:
    """Scale a row by a common denominator so every entry is a CPoly."""
    dens: list[CPoly] = []
    for v in (*row.values(), const):
        if isinstance(v, FracElem) and not v.den.is_constant():
            if not any(_divides(v.den, d) for d in dens):
                dens.append(v.den)
    mult = CPoly.coerce(1)
    for d in dens:
        mult = mult * d

    def lift(v) -> CPoly:
        if isinstance(v, FracElem):
            return (mult * v.num).divide_exact(v.den) if not v.den.is_constant() else (mult * v.num).scale(1 / v.den.constant_value())
        return mult * CPoly.coerce(v)

    assumed = set()
    for d in dens:
        assumed |= (FracElem.coerce(1) / d).assumptions
    return {k: lift(v) for k, v in row.items()}, lift(const), assumed


def _divides(a: CPoly, b: CPoly) -> bool:
    try:
        b.divide_exact(a)
    except NotDivisible:
        return False
    return True


def _eliminate_fraction_free(rows, columns):
    """Fraction-free Gauss-Jordan (Bareiss style) over polynomial rows.

    Entries stay polynomials: each update ``(p*r_i - r_i[col]*r_k) / prev``
    divides exactly by the previous pivot.  Rows are returned normalized to a
    unit pivot with fraction-field entries, matching :func:`eliminate`.
    """
    work, assumptions = [], set()
    for r, c in rows:
        pr, pc, assumed = _clear_denominators(r, c)
        assumptions |= assumed
        work.append(({k: v for k, v in pr.items() if not v.is_zero()}, pc))
    pivots: dict[str, int] = {}
    used: set[int] = set()
    prev = CPoly.coerce(1)
    for col in columns:
        best = None
        for idx, (r, _) in enumerate(work):
            if idx in used or col not in r:
                continue
            if r[col].is_constant():
                best = idx
                break
            if best is None or len(r[col]) < len(work[best][0][col]):
                best = idx
        if best is None:
            continue
        pr, pc = work[best]
        piv = pr[col]
        if not piv.is_constant():
            assumptions |= (FracElem.coerce(1) / piv).assumptions
        zero = CPoly.coerce(0)
        for idx, (r, c) in enumerate(work):
            if idx == best:
                continue
            # every other row is updated, so each entry stays a minor of the
            # original matrix and the division by the previous pivot is exact
            f = r.get(col, zero)
            new = {}
            for k in set(r) | set(pr):
                v = _exact(piv * r.get(k, zero) - f * pr.get(k, zero), prev)
                if not v.is_zero():
                    new[k] = v
            work[idx] = (new, _exact(piv * c - f * pc, prev))
        used.add(best)
        pivots[col] = best
        prev = piv
    assumptions = reduce_assumptions(assumptions)
    out = []
    for idx, (r, c) in enumerate(work):
        col = next((k for k, v in pivots.items() if v == idx), None)
        if col is None:
            out.append(({k: simplify_coeff(v) for k, v in r.items()}, simplify_coeff(c)))
            continue
        piv = r[col]

        def unit(v, piv=piv):
            return cancel_factors(FracElem(v, piv), assumptions)

        out.append(({k: unit(v) for k, v in r.items()}, unit(c)))
    return pivots, out, assumptions


def _exact(a: CPoly, b: CPoly) -> CPoly:
    if b.is_constant():
        return a.scale(1 / b.constant_value())
    return a.divide_exact(b)


def eliminate(rows: list[tuple[dict, object]], columns: Sequence[str]):
    """Reduced row echelon form over the parameter fraction field.

    Purely rational rows use ordinary elimination; rows with symbolic entries
    go through a fraction-free variant that keeps intermediate entries small.


    Returns ``(pivots, rows, assumptions)`` where ``pivots`` maps a column to
    the index of its normalized row.  Constant pivots are preferred; each
    symbolic pivot adds its numerator factors to the assumptions.
    """
    if not _is_rational_rows(rows):
        return _eliminate_fraction_free(rows, columns)
    rows = [(dict(r), c) for r, c in rows]
    pivots: dict[str, int] = {}
    assumptions: set = set()
    used: set[int] = set()
    for col in columns:
        best = None
        for idx, (r, _) in enumerate(rows):
            if idx in used or r.get(col, 0) == 0:
                continue
            if _is_constant(r[col]):
                best = idx
                break
            if best is None:
                best = idx
        if best is None:
            continue
        r, c = rows[best]
        piv = r[col]
        assumptions |= _pivot_assumptions(piv)
        inv = (1 / piv) if isinstance(piv, Fraction) else FracElem.coerce(1) / piv
        r = {k: simplify_coeff(v * inv) for k, v in r.items()}
        c = simplify_coeff(c * inv)
        rows[best] = (r, c)
        used.add(best)
        pivots[col] = best
        for idx, (r2, c2) in enumerate(rows):
            if idx == best or r2.get(col, 0) == 0:
                continue
            f = r2[col]
            new = dict(r2)
            for k, v in r.items():
                w = new.get(k, 0) - f * v
                if w == 0:
                    new.pop(k, None)
                else:
                    new[k] = simplify_coeff(w)
            rows[idx] = (new, simplify_coeff(c2 - f * c))
    return pivots, rows, frozenset(assumptions)


def linear_solve_exact(sys: EqSystem) -> SolveResult:
    """Solve an affine system exactly; symbolic pivots become assumptions."""
    return solve_linear_rows(linear_rows(sys), sys.unknowns)


def solve_linear_rows(rows: list[tuple[dict, object]], unknowns: Sequence[str]) -> SolveResult:
    """Solve rows ``sum coeff*u + const = 0`` whose entries lie in the fraction field."""
    pivots, rows, assumptions = eliminate(rows, unknowns)
    pivot_rows = set(pivots.values())
    for idx, (r, c) in enumerate(rows):
        if idx not in pivot_rows and not r and c != 0:
            return SolveResult("inconsistent", assumptions=assumptions)
    free = tuple(u for u in unknowns if u not in pivots)
    assignment = {}
    for col, idx in pivots.items():
        r, c = rows[idx]
        value = -c
        for k, v in r.items():
            if k != col:
                value = value - v * CPoly.param(k)
        value = simplify_coeff(value)
        assignment[col] = value
        if isinstance(value, FracElem):
            assumptions |= value.assumptions
    ordered = {u: assignment[u] for u in unknowns if u in assignment}
    return SolveResult("assignment", ordered, reduce_assumptions(assumptions), free)


def substitute_assignment(eq: CPoly, assignment: Mapping[str, object]):
    return simplify_coeff(CPoly.coerce(eq).substitute(assignment))


def check_assignment(sys: EqSystem, result: SolveResult) -> bool:
    """Every equation vanishes identically after substituting the assignment."""
    return all(substitute_assignment(e, result.assignment) == 0 for e in sys.equations)


def matrix_rank(rows: Sequence[Sequence]) -> tuple[int, frozenset]:
    """Rank over the parameter fraction field and the pivot assumptions."""
    cols = [f"c{j}" for j in range(len(rows[0]) if rows else 0)]
    data = []
    for row in rows:
        entries = {}
        for j, v in enumerate(row):
            v = simplify_coeff(v)
            if isinstance(v, CPoly):
                v = FracElem.coerce(v)
            if v != 0:
                entries[cols[j]] = v
        data.append((entries, Fraction(0)))
    pivots, _, assumptions = eliminate(data, cols)
    return len(pivots), assumptions


# -- Groebner bases over Q --------------------------------------------------

LEX = "lex"
DEGLEX = "deglex"


@dataclass(frozen=True)
class CapReached:
    """Buchberger stopped at a cap; the answer is unknown."""

    reason: str
    pairs_processed: int


def caps_from_env(default: tuple[int, int] = (DEFAULT_MAX_PAIRS, DEFAULT_MAX_DEGREE)) -> tuple[int, int]:
    raw = os.environ.get(CAPS_ENV)
    if not raw:
        return default
    try:
        pairs, degree = (int(v) for v in raw.split(","))
    except ValueError as exc:
        raise ValueError(f"{CAPS_ENV} must look like 'pairs,degree', got {raw!r}") from exc
    return pairs, degree


def _key(order: str):
    if order == LEX:
        return lambda m: m
    if order == DEGLEX:
        return lambda m: (sum(m), m)
    raise ValueError(f"unknown monomial order {order!r}")


class _Dense:
    """Polynomials as ``{exponent tuple: Fraction}`` over a fixed variable list."""

    def __init__(self, variables: Sequence[str], order: str):
        self.vars = list(variables)
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.key = _key(order)

    def from_cpoly(self, f: CPoly) -> dict:
        out = {}
        for mono, c in CPoly.coerce(f).items():
            e = [0] * len(self.vars)
            for name, k in mono:
                if name not in self.index:
                    raise ValueError(f"parameter {name} is not among the variables")
                e[self.index[name]] = k
            out[tuple(e)] = c
        return out

    def to_cpoly(self, f: dict) -> CPoly:
        terms = {}
        for e, c in f.items():
            mono = tuple(sorted(((self.vars[i], k) for i, k in enumerate(e) if k),
                                key=lambda kv: param_key(kv[0])))
            terms[mono] = c
        return CPoly(terms)

    def lm(self, f: dict) -> tuple:
        return max(f, key=self.key)

    def monic(self, f: dict) -> dict:
        lc = f[self.lm(f)]
        return {m: c / lc for m, c in f.items()}

    def reduce(self, f: dict, basis: list[dict]) -> dict:
        """Full multivariate division remainder of f by basis."""
        f = dict(f)
        rem: dict = {}
        leads = [(self.lm(g), g) for g in basis]
        while f:
            m = self.lm(f)
            c = f[m]
            for lg, g in leads:
                if all(a >= b for a, b in zip(m, lg)):
                    shift = tuple(a - b for a, b in zip(m, lg))
                    factor = c / g[lg]
                    for mg, cg in g.items():
                        mm = tuple(a + b for a, b in zip(mg, shift))
                        v = f.get(mm, 0) - factor * cg
                        if v:
                            f[mm] = v
                        else:
                            f.pop(mm, None)
                    break
            else:
                rem[m] = c
                del f[m]
        return rem

    def spoly(self, f: dict, g: dict) -> dict:
        lf, lg = self.lm(f), self.lm(g)
        lcm = tuple(max(a, b) for a, b in zip(lf, lg))
        sf = tuple(a - b for a, b in zip(lcm, lf))
        sg = tuple(a - b for a, b in zip(lcm, lg))
        out: dict = {}
        for m, c in f.items():
            mm = tuple(a + b for a, b in zip(m, sf))
            out[mm] = out.get(mm, 0) + c / f[lf]
        for m, c in g.items():
            mm = tuple(a + b for a, b in zip(m, sg))
            v = out.get(mm, 0) - c / g[lg]
            if v:
                out[mm] = v
            else:
                out.pop(mm, None)
        return {m: c for m, c in out.items() if c}


def _variables(gens: Iterable[CPoly], variables: Sequence[str] | None) -> list[str]:
    if variables is not None:
        return list(variables)
    names: set[str] = set()
    for g in gens:
        names |= CPoly.coerce(g).params()
    return sorted(names, key=param_key)


def groebner_basis(gens: Sequence[CPoly], order: str = LEX, caps: tuple[int, int] | None = None,
                   variables: Sequence[str] | None = None):
    """Reduced Groebner basis (monic, sorted by leading monomial) or :class:`CapReached`.

    ``variables`` fixes the variable order, largest first; by default the
    parameter names are sorted.  ``caps`` is ``(max_pairs, max_degree)``.
    """
    max_pairs, max_degree = caps or caps_from_env()
    gens = [CPoly.coerce(g) for g in gens]
    ring = _Dense(_variables(gens, variables), order)
    basis = [ring.monic(ring.from_cpoly(g)) for g in gens if not g.is_zero()]
    if not basis:
        return []
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    processed = 0
    while pairs:
        i, j = pairs.pop(0)
        f, g = basis[i], basis[j]
        lf, lg = ring.lm(f), ring.lm(g)
        if all(a == 0 or b == 0 for a, b in zip(lf, lg)):
            continue  # coprime leading monomials: S-polynomial reduces to zero
        processed += 1
        if processed > max_pairs:
            return CapReached("max_pairs", processed - 1)
        r = ring.reduce(ring.spoly(f, g), basis)
        if not r:
            continue
        r = ring.monic(r)
        if sum(ring.lm(r)) > max_degree:
            return CapReached("max_degree", processed)
        basis.append(r)
        k = len(basis) - 1
        pairs.extend((a, k) for a in range(k))
        if all(v == 0 for v in ring.lm(r)):
            break  # the ideal is the whole ring
    return [ring.to_cpoly(g) for g in _interreduce(ring, basis)]


def _interreduce(ring: _Dense, basis: list[dict]) -> list[dict]:
    # drop elements whose leading monomial is divisible by another's
    minimal: list[dict] = []
    for g in sorted(basis, key=lambda h: ring.key(ring.lm(h))):
        lg = ring.lm(g)
        if any(all(a >= b for a, b in zip(lg, ring.lm(h))) for h in minimal):
            continue
        minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        lg = ring.lm(g)
        tail = {m: c for m, c in g.items() if m != lg}
        r = ring.reduce(tail, others) if others else tail
        r[lg] = g[lg]
        reduced.append(ring.monic(r))
    return sorted(reduced, key=lambda h: ring.key(ring.lm(h)))


def normal_form(f: CPoly, basis: Sequence[CPoly], order: str = LEX,
                variables: Sequence[str] | None = None) -> CPoly:
    """Remainder of f on division by ``basis``."""
    basis = [CPoly.coerce(b) for b in basis]
    if any(b.is_zero() for b in basis):
        raise ValueError("basis elements must be nonzero")
    ring = _Dense(_variables([CPoly.coerce(f)] + basis, variables), order)
    return ring.to_cpoly(ring.reduce(ring.from_cpoly(f), [ring.from_cpoly(b) for b in basis]))


def s_polynomial(f: CPoly, g: CPoly, order: str = LEX, variables: Sequence[str] | None = None) -> CPoly:
    ring = _Dense(_variables([f, g], variables), order)
    return ring.to_cpoly(ring.spoly(ring.from_cpoly(f), ring.from_cpoly(g)))


def ideal_contains_one(gens: Sequence[CPoly], caps: tuple[int, int] | None = None) -> bool | None:
    """True/False when decided; ``None`` when a cap was reached."""
    basis = groebner_basis(gens, LEX, caps)
    if isinstance(basis, CapReached):
        return None
    return any(b.is_constant() and not b.is_zero() for b in basis)
