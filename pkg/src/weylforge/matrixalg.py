"""Matrices with noncommuting polynomial entries.

The main use is the 2x2 "condition (iii)" matrix of a pair p, q in A_1: when
t divides the x-free parts p_0 = b(t) t and q_0 = d(t) t, the pair factors as

    [p]   [b(t)  p_1 + p_2 x + ... + p_n x^(n-1)] [t]
    [q] = [d(t)  q_1 + q_2 x + ... + q_n x^(n-1)] [x]

and an inverse of that matrix expresses t and x through p and q.  Matrix
rings over A_1 are Dedekind finite, so a left inverse is already two-sided;
we still check both products.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import WEYL, NCPoly, Signature, SignatureMismatch, from_t_coefficients
from .coeffring import CPoly, FracElem, NotDivisible, simplify_coeff
from .dixmier import (T, check_dixmier_pair, decompose_pair, family_instantiate, _poly_in, _param,
                      _nonzero, _inv)
from .morphism import bounded_monomials
from .systems import solve_linear_rows


class NCMatrix:
    """A rows x cols matrix of NCPoly entries over one signature."""

    def __init__(self, entries: Sequence[Sequence[NCPoly]], sig: Signature | None = None):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix needs at least one entry")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix rows")
        if sig is None:
            sig = next((e.sig for r in rows for e in r if isinstance(e, NCPoly)), WEYL)
        self.sig = sig
        self.entries = tuple(tuple(_lift(sig, e) for e in r) for r in rows)
        self.rows = len(rows)
        self.cols = width

    @classmethod
    def identity(cls, k: int, sig: Signature = WEYL) -> "NCMatrix":
        return cls([[sig.one() if i == j else sig.zero() for j in range(k)] for i in range(k)], sig)

    def __getitem__(self, ij: tuple[int, int]) -> NCPoly:
        i, j = ij
        return self.entries[i][j]

    def __mul__(self, other: "NCMatrix") -> "NCMatrix":
        return mat_mul(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, NCMatrix) and self.sig == other.sig and self.entries == other.entries

    __hash__ = None

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == NCMatrix.identity(self.rows, self.sig)

    def to_text(self) -> list[list[str]]:
        return [[str(e) for e in r] for r in self.entries]

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(r) + "]" for r in self.to_text()) + "]"

    def __repr__(self) -> str:
        return f"NCMatrix({self})"


def _lift(sig: Signature, e) -> NCPoly:
    if isinstance(e, NCPoly):
        if e.sig != sig:
            raise SignatureMismatch("matrix entries must share one signature")
        return e
    return sig.const(simplify_coeff(e))


def mat_mul(A: NCMatrix, B: NCMatrix) -> NCMatrix:
    """Entry (i, k) is sum_j A(i, j) * B(j, k), multiplied in that order."""
    if A.cols != B.rows:
        raise ValueError(f"shape mismatch: {A.rows}x{A.cols} times {B.rows}x{B.cols}")
    if A.sig != B.sig:
        raise SignatureMismatch("matrices live over different algebras")
    out = []
    for i in range(A.rows):
        row = []
        for k in range(B.cols):
            acc = A.sig.zero()
            for j in range(A.cols):
                acc = acc + A.entries[i][j] * B.entries[j][k]
            row.append(acc)
        out.append(row)
    return NCMatrix(out, A.sig)


@dataclass(frozen=True)
class Inapplicable:
    """t does not divide the x-free part of p or q."""

    reason: str


@dataclass(frozen=True)
class NotFoundWithinBounds:
    bounds: tuple


def _divide_by_t(c):
    t = CPoly.param(T)
    if isinstance(c, FracElem):
        # decompose_pair keeps t out of denominators
        return simplify_coeff(FracElem.coerce(c.num.divide_exact(t)) / c.den)
    return CPoly.coerce(c).divide_exact(t)


def build_condition_iii_matrix(p: NCPoly, q: NCPoly):
    """The 2x2 matrix [[b, p_1 + ... + p_n x^(n-1)], [d, q_1 + ...]] or :class:`Inapplicable`."""
    dec = decompose_pair(p, q)
    try:
        b = _divide_by_t(dec.p_coeffs[0])
    except NotDivisible:
        return Inapplicable("t does not divide the x-free part of p")
    try:
        d = _divide_by_t(dec.q_coeffs[0])
    except NotDivisible:
        return Inapplicable("t does not divide the x-free part of q")
    row_p = from_t_coefficients(WEYL, dec.p_coeffs[1:], T)
    row_q = from_t_coefficients(WEYL, dec.q_coeffs[1:], T)
    return NCMatrix([[from_t_coefficients(WEYL, [b], T), row_p],
                     [from_t_coefficients(WEYL, [d], T), row_q]])


def _normalize_bounds(bounds, n: int) -> tuple:
    if isinstance(bounds, int):
        return (bounds,) * n
    bounds = tuple(bounds)
    if len(bounds) != n:
        raise ValueError("need one degree cap per variable")
    return bounds


def left_inverse_ansatz(M: NCMatrix, bounds):
    """Search N with N*M = I among entries of bounded degree; return N or NotFoundWithinBounds.

    ``bounds`` is a per-variable degree cap (one int for all variables, or a
    sequence).  Each row of N is solved separately as an exact linear system.
    """
    if M.rows != M.cols:
        raise ValueError("left_inverse_ansatz needs a square matrix")
    sig = M.sig
    bounds = _normalize_bounds(bounds, sig.n)
    k = M.rows
    monos = bounded_monomials(bounds)
    # X_m * M(j, c) for every unknown entry position j and monomial m
    names, products = [], []
    for j in range(k):
        for idx, mono in enumerate(monos):
            names.append(f"_n{j}_{idx}")
            xm = sig.monomial(mono)
            products.append((j, mono, [xm * M.entries[j][c] for c in range(k)]))
    rows_out = []
    for i in range(k):
        eq_rows = []
        for c in range(k):
            target = sig.one() if i == c else sig.zero()
            support = set(target.terms)
            for _, _, prods in products:
                support |= set(prods[c].terms)
            for mono in sorted(support):
                row = {}
                for name, (_, _, prods) in zip(names, products):
                    v = prods[c].coefficient(mono)
                    if v != 0:
                        row[name] = v
                eq_rows.append((row, simplify_coeff(-target.coefficient(mono))))
        res = solve_linear_rows(eq_rows, names)
        if res.outcome != "assignment":
            return NotFoundWithinBounds(bounds)
        entries = [dict() for _ in range(k)]
        for name, (j, mono, _) in zip(names, products):
            v = res.assignment.get(name, 0)
            if isinstance(v, (CPoly, FracElem)):
                v = simplify_coeff(v.substitute({u: 0 for u in res.free}))
            if v != 0:
                entries[j][mono] = v
        rows_out.append([NCPoly(sig, e) for e in entries])
    N = NCMatrix(rows_out, sig)
    if not (mat_mul(N, M).is_identity() and mat_mul(M, N).is_identity()):
        return NotFoundWithinBounds(bounds)
    return N


def recover_generators(p: NCPoly, q: NCPoly, Minv: NCMatrix) -> tuple[NCPoly, NCPoly]:
    """Rows of Minv applied to (p, q); they must come out as t and x."""
    if Minv.rows != 2 or Minv.cols != 2:
        raise ValueError("expected a 2x2 inverse")
    first = Minv[0, 0] * p + Minv[0, 1] * q
    second = Minv[1, 0] * p + Minv[1, 1] * q
    t, x = p.sig.gens()
    if first != t or second != x:
        raise ValueError("the supplied matrix does not invert the condition (iii) matrix")
    return first, second


@dataclass(frozen=True)
class ConditionReport:
    """Independent flags for the three sufficient conditions for an automorphism.

    ``invertible_matrix`` is ``None`` when the matrix is not defined or no
    inverse was found within the search bounds (which proves nothing).
    """

    dixmier: bool
    t_divides: bool
    invertible_matrix: bool | None
    inverse: NCMatrix | None = None

    @property
    def certifies_automorphism(self) -> bool:
        return self.dixmier and self.t_divides and bool(self.invertible_matrix)


def automorphism_conditions(p: NCPoly, q: NCPoly, bounds=2) -> ConditionReport:
    dixmier = check_dixmier_pair(p, q)
    M = build_condition_iii_matrix(p, q)
    if isinstance(M, Inapplicable):
        return ConditionReport(dixmier, False, None)
    N = left_inverse_ansatz(M, bounds)
    if isinstance(N, NotFoundWithinBounds):
        return ConditionReport(dixmier, True, None)
    return ConditionReport(dixmier, True, True, N)


# -- the matrices stated for the Type I-IV families --------------------------

def family_matrices(family: str, params: Mapping, fdata=None, index: int | None = None) -> tuple[NCMatrix, NCMatrix]:
    """The condition (iii) matrix of a family pair and its closed-form inverse.

    Type I-IV take ``fdata`` like :func:`family_instantiate`; the table
    families take ``index``.  For the table families every matrix has two
    entries from one commutative subring K[t] or K[x] on each diagonal, so
    the inverse is the adjugate of a matrix with determinant 1.
    """
    if family.startswith("table"):
        return _table_matrices(family, params, index)
    sig = WEYL
    t, x = sig.gens()
    one = sig.one()
    lam = _nonzero(params, "lambda")
    inv = _inv(lam)
    if family == "type1":
        alpha = _param(params, "alpha")
        f = _poly_in(fdata, x)
        top = (f * alpha - 1) * inv
        return (NCMatrix([[one * alpha, top], [one * lam, f]]),
                NCMatrix([[f, -top], [-(one * lam), one * alpha]]))
    if family == "type2":
        alpha = _param(params, "alpha")
        f = _poly_in(fdata, t)
        low = (f * alpha + 1) * inv
        return (NCMatrix([[-f, -(one * lam)], [low, one * alpha]]),
                NCMatrix([[one * alpha, one * lam], [-low, -f]]))
    if family == "type3":
        g = _poly_in(fdata, x)
        return (NCMatrix([[one * lam, g], [sig.zero(), one * inv]]),
                NCMatrix([[one * inv, -g], [sig.zero(), one * lam]]))
    if family == "type4":
        g = _poly_in(fdata, t)
        return (NCMatrix([[one * inv, sig.zero()], [g, one * lam]]),
                NCMatrix([[one * lam, sig.zero()], [-g, one * inv]]))
    raise ValueError(f"no stated matrix for family {family!r}")


def _table_matrices(family: str, params: Mapping, index: int | None) -> tuple[NCMatrix, NCMatrix]:
    if index is None or index < 1:
        raise ValueError("table families need a positive index")
    p, q = family_instantiate(family, params, index=index)
    M = build_condition_iii_matrix(p, q)
    if isinstance(M, Inapplicable):
        raise ValueError(f"{family} at index {index} has no condition (iii) matrix")
    (a, b), (c, d) = M.entries
    # [[a, b], [c, d]] with a d - b c = 1 and commuting entries in each product
    return M, NCMatrix([[d, -b], [-c, a]])
