"""Dixmier pairs in A_1, skew tuples in CSD_n, and closed-form families.

A pair (p, q) in A_1 is a Dixmier pair when q p = p q + 1, i.e. when
t -> p, x -> q defines an endomorphism.  Writing p = sum_i p_i(t) x^i and
q = sum_i q_i(t) x^i, the rule x^j a(t) = sum_r C(j, r) a^(r)(t) x^(j-r) turns
[q, p] = 1 into 2n polynomial identities in t (the "identity battery").
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from .algebra import WEYL, NCPoly, Signature, commutator
from .coeffring import CPoly, FracElem, coeff_derivative, simplify_coeff
from .systems import EqSystem, SolveResult, linear_solve_exact

T = "t"  # parameter name used for the coefficient polynomials p_i(t)


@dataclass(frozen=True)
class PairDecomposition:
    n: int
    m: int
    p_coeffs: tuple
    q_coeffs: tuple

    def reassemble(self) -> tuple[NCPoly, NCPoly]:
        from .algebra import from_t_coefficients

        return (from_t_coefficients(WEYL, self.p_coeffs, T),
                from_t_coefficients(WEYL, self.q_coeffs, T))


@dataclass(frozen=True)
class IdentityBattery:
    residuals: tuple

    def vanishes(self) -> bool:
        return all(r == 0 for r in self.residuals)


@dataclass(frozen=True)
class SkewLinearSystem:
    M: tuple  # rows of coefficients
    b: tuple

    def to_eqsystem(self, prefix: str = "a") -> EqSystem:
        """The equations M a - b = 0 with unknowns a1, ..., a_{n-1}."""
        k = len(self.b)
        names = [f"{prefix}{i + 1}" for i in range(k)]
        eqs = []
        for i in range(k):
            e = CPoly.coerce(0)
            for j in range(k):
                e = e + CPoly.param(names[j]) * _as_cpoly(self.M[i][j])
            eqs.append(e - _as_cpoly(self.b[i]))
        return EqSystem(tuple(names), tuple(eqs))


def _as_cpoly(c) -> CPoly:
    if isinstance(c, FracElem):
        return c.as_cpoly()
    return CPoly.coerce(c)


def _require_weyl(*polys: NCPoly) -> None:
    for f in polys:
        if not f.sig.is_weyl():
            raise ValueError("expected elements of A_1")


def check_dixmier_pair(p: NCPoly, q: NCPoly) -> bool:
    """True iff q p - p q = 1."""
    _require_weyl(p, q)
    return commutator(q, p) == 1


def decompose_pair(p: NCPoly, q: NCPoly) -> PairDecomposition:
    """Write p, q as sums of p_i(t) x^i with a common length n + 1."""
    _require_weyl(p, q)
    for f in (p, q):
        if T in f.params():
            raise ValueError("coefficient parameters may not be named 't'")
    n = max(1, p.degree_in(1), q.degree_in(1))
    m = max(0, p.degree_in(0), q.degree_in(0))

    def split(f: NCPoly):
        parts = [CPoly.coerce(0) for _ in range(n + 1)]
        for (a, b), c in f.items():
            parts[b] = simplify_coeff(parts[b] + c * CPoly.param(T, a))
        return tuple(parts)

    return PairDecomposition(n, m, split(p), split(q))


def _nth_derivative(a, r: int):
    for _ in range(r):
        a = coeff_derivative(a, T)
    return a


def build_identity_battery(d: PairDecomposition) -> IdentityBattery:
    """Residual s is the x^s coefficient of [q, p] minus the required delta_{s,0}."""
    n = d.n
    p, q = d.p_coeffs, d.q_coeffs
    dp = {(i, r): _nth_derivative(p[i], r) for i in range(n + 1) for r in range(n + 1)}
    dq = {(i, r): _nth_derivative(q[i], r) for i in range(n + 1) for r in range(n + 1)}
    residuals = []
    for s in range(2 * n):
        total = CPoly.coerce(-1 if s == 0 else 0)
        for r in range(1, n + 1):
            for j in range(r, n + 1):
                i = s + r - j
                if 0 <= i <= n:
                    c = comb(j, r)
                    total = total + (q[j] * dp[(i, r)] - p[j] * dq[(i, r)]) * c
        residuals.append(simplify_coeff(total))
    return IdentityBattery(tuple(residuals))


def linear_pair_det(p: NCPoly, q: NCPoly):
    """Determinant of [[b, a], [d, c]] for p = b t + a x, q = d t + c x."""
    _require_weyl(p, q)
    for f in (p, q):
        if f.degree() > 1 or f.constant_term() != 0:
            raise ValueError("linear_pair_det needs homogeneous linear input")
    b, a = p.coefficient((1, 0)), p.coefficient((0, 1))
    d, c = q.coefficient((1, 0)), q.coefficient((0, 1))
    return simplify_coeff(b * c - a * d)


def check_skew_tuple(ps: Sequence[NCPoly], sig: Signature) -> bool:
    """True iff [p_j, p_i] = d_ij for every i < j."""
    if len(ps) != sig.n:
        raise ValueError(f"expected {sig.n} polynomials, got {len(ps)}")
    for i in range(sig.n):
        for j in range(i + 1, sig.n):
            if commutator(ps[j], ps[i]) != sig.d(i + 1, j + 1):
                return False
    return True


def build_skew_linear_system(sig: Signature) -> SkewLinearSystem:
    """The linear system for completing x_1, ..., x_{n-1} by p_n = sum a_k x_k.

    M_ik = -d_ki (k < i), 0 (k = i), d_ik (k > i); b = (d_1n, ..., d_{n-1,n}).
    """
    k = sig.n - 1
    rows = []
    for i in range(1, k + 1):
        row = []
        for j in range(1, k + 1):
            if j < i:
                row.append(simplify_coeff(-sig.d(j, i)))
            elif j == i:
                row.append(Fraction(0))
            else:
                row.append(sig.d(i, j))
        rows.append(tuple(row))
    b = tuple(sig.d(i, sig.n) for i in range(1, k + 1))
    return SkewLinearSystem(tuple(rows), b)


def solve_skew_completion(sig: Signature) -> SolveResult:
    """Solve the skew linear system exactly (assumptions record pivots)."""
    return linear_solve_exact(build_skew_linear_system(sig).to_eqsystem())


def skew_completion_tuple(sig: Signature, result: SolveResult) -> list[NCPoly]:
    """(x_1, ..., x_{n-1}, sum a_k x_k) from a solved completion system."""
    if result.outcome != "assignment":
        raise ValueError("the completion system has no solution")
    gens = sig.gens()
    last = sig.zero()
    for k in range(sig.n - 1):
        a = result.assignment.get(f"a{k + 1}", Fraction(0))
        last = last + gens[k] * a
    return gens[:-1] + [last]


# -- closed-form families --------------------------------------------------

FAMILIES = ("type1", "type2", "type3", "type4",
            "table1.case1", "table1.case2", "table2.case1", "table2.case2")


def _param(params: Mapping, name: str):
    if name not in params:
        raise KeyError(f"missing parameter {name}")
    v = params[name]
    return Fraction(v) if isinstance(v, int) else v


def _nonzero(params: Mapping, name: str):
    v = _param(params, name)
    if isinstance(v, Fraction) and v == 0:
        raise ZeroDivisionError(f"parameter {name} appears in a denominator and must be nonzero")
    return v


def _poly_in(fdata, var: NCPoly) -> NCPoly:
    """Evaluate a univariate polynomial (CPoly or coefficient list) at ``var``."""
    sig = var.sig
    if fdata is None:
        return sig.zero()
    if isinstance(fdata, CPoly):
        names = fdata.params()
        if len(names) > 1:
            raise ValueError("the free polynomial must be univariate")
        name = next(iter(names), None)
        coeffs = {}
        if name is None:
            coeffs[0] = fdata.constant_value()
        else:
            for e, c in fdata.coefficients_in(name).items():
                coeffs[e] = c.constant_value()
        items = coeffs.items()
    else:
        items = enumerate(fdata)
    out = sig.zero()
    for e, c in items:
        out = out + (var ** e) * c
    return out


def _inv(v):
    if isinstance(v, Fraction):
        return 1 / v
    return FracElem.coerce(1) / v


def family_instantiate(family: str, params: Mapping, fdata=None, index: int | None = None) -> tuple[NCPoly, NCPoly]:
    """Instantiate a closed-form family of Dixmier pairs.

    ``type1`` .. ``type4`` take parameters ``alpha`` and ``lambda`` (types III
    and IV only ``lambda``) and a free univariate polynomial ``fdata``.  The
    table families take ``l0, l1, ...`` and the size ``index`` (m for
    ``table1.*``, n for ``table2.*``).
    """
    sig = WEYL
    t, x = sig.gens()
    if family in ("type1", "type2", "type3", "type4"):
        lam = _nonzero(params, "lambda")
        inv = _inv(lam)
        if family == "type1":
            alpha = _param(params, "alpha")
            f = _poly_in(fdata, x)
            p = t * alpha + (f * alpha - 1) * x * inv
            q = t * lam + f * x
        elif family == "type2":
            alpha = _param(params, "alpha")
            f = _poly_in(fdata, t)
            p = -(f * t) - x * lam
            q = (f * alpha + 1) * t * inv + x * alpha
        elif family == "type3":
            g = _poly_in(fdata, x)
            p = t * lam + g * x
            q = x * inv
        else:
            g = _poly_in(fdata, t)
            p = t * inv
            q = g * t + x * lam
        return p, q

    if index is None or index < 1:
        raise ValueError("table families need a positive index")
    lam = [None] * (index + 2)
    for k in range(index + 2):
        if f"l{k}" in params:
            lam[k] = _param(params, f"l{k}")
    k = index
    if family == "table1.case1":
        top = _nonzero(params, f"l{k + 1}")
        l0 = _param(params, "l0")
        inv = _inv(top)
        p = t * ((1 + l0 * _param(params, "l1")) * inv) + x * l0
        for e in range(2, k + 1):
            p = p + (t ** e) * (l0 * _param(params, f"l{e}") * inv)
        q = x * top
        for e in range(1, k + 1):
            q = q + (t ** e) * _param(params, f"l{e}")
        return p, q
    if family == "table1.case2":
        top = _nonzero(params, f"l{k}")
        if k == 1:
            # printed with a different normalization at m = 1
            p = t * _param(params, "l0") - x * _inv(top)
            q = t * top
            return p, q
        p = x * top
        for e in range(1, k + 1):
            p = p + (t ** e) * _param(params, f"l{e - 1}")
        q = -(t * _inv(top))
        return p, q
    if family == "table2.case1":
        l0 = _nonzero(params, "l0")
        top = _param(params, f"l{k + 1}")
        inv = _inv(l0)
        p = t * l0
        for e in range(1, k + 1):
            p = p + (x ** e) * _param(params, f"l{e}")
        q = t * top + x * ((1 + _param(params, "l1") * top) * inv)
        for e in range(2, k + 1):
            q = q + (x ** e) * (_param(params, f"l{e}") * top * inv)
        return p, q
    if family == "table2.case2":
        l0 = _nonzero(params, "l0")
        p = x * l0
        q = -(t * _inv(l0))
        for e in range(1, k + 1):
            q = q + (x ** e) * _param(params, f"l{e}")
        return p, q
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def family_parameter_names(family: str, index: int | None = None) -> list[str]:
    if family in ("type1", "type2"):
        return ["alpha", "lambda"]
    if family in ("type3", "type4"):
        return ["lambda"]
    if family in ("table1.case1", "table2.case1"):
        return [f"l{k}" for k in range(index + 2)]
    if family == "table1.case2":
        return [f"l{k}" for k in range(index + 1)]
    if family == "table2.case2":
        return [f"l{k}" for k in range(index + 1)]
    raise ValueError(f"unknown family {family!r}")
