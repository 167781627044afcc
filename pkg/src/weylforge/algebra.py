"""Canonical-form arithmetic in the algebras CSD_n(K).

CSD_n(K) is generated by x_1, ..., x_n subject to x_j x_i = x_i x_j + d_ij for
i < j, with nonzero central constants d_ij.  Every element has a unique
expansion over the standard monomials x_1^a_1 ... x_n^a_n, which is how
:class:`NCPoly` stores it.  The first Weyl algebra A_1(K) is the case n = 2,
d_12 = 1, printed with the aliases t = x_1 and x = x_2, so that x t = t x + 1.

Products of standard monomials are computed with the reordering formula

    x_j^b x_i^a = sum_k k! C(a, k) C(b, k) d_ij^k x_i^(a-k) x_j^(b-k),

which follows from the defining relation because [x_j, x_i] is central.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Iterator, Mapping, Sequence

from .coeffring import (
    CPoly,
    FracElem,
    coeff_assumptions,
    simplify_coeff,
    substitute_coeff,
)

Exponents = tuple  # tuple[int, ...] of length n

_CACHE_LIMIT = 200_000


class SignatureMismatch(ValueError):
    """Raised when polynomials from different algebras are combined."""


class Signature:
    """The algebra CSD_n(K): a variable count and the constants d_ij.

    ``d`` maps 1-based index pairs ``(i, j)`` with ``i < j`` to coefficients.
    Symbolic constants are allowed and are asserted nonzero.
    """

    def __init__(self, n: int, d: Mapping[tuple[int, int], object], names: Sequence[str] | None = None):
        if n < 2:
            raise ValueError("CSD_n needs n >= 2")
        table = {}
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                if (i, j) not in d:
                    raise ValueError(f"missing structure constant d{i}{j}")
                v = simplify_coeff(d[(i, j)])
                if isinstance(v, Fraction) and v == 0:
                    raise ValueError(f"structure constant d{i}{j} must be nonzero")
                table[(i, j)] = v
        self.n = n
        self._d = table
        if names is None:
            names = tuple(f"x{i}" for i in range(1, n + 1))
        if len(names) != n or len(set(names)) != n:
            raise ValueError("need n distinct variable names")
        self.names = tuple(names)
        self._index = {name: k for k, name in enumerate(self.names)}
        self._assumptions = frozenset(
            p for v in table.values() if isinstance(v, (CPoly, FracElem))
            for p in ([v] if isinstance(v, CPoly) else [v.num])
        )
        self._var_cache: dict = {}
        self._mono_cache: dict = {}

    @classmethod
    def weyl(cls) -> "Signature":
        """A_1(K): x t = t x + 1."""
        return cls(2, {(1, 2): Fraction(1)}, names=("t", "x"))

    @classmethod
    def csd(cls, n: int, d: Mapping[tuple[int, int], object] | Sequence | None = None) -> "Signature":
        """CSD_n with the given constants, or symbolic d12, d13, ... when omitted.

        ``d`` may be a mapping ``(i, j) -> value`` or a flat sequence listed in
        the order (1,2), (1,3), ..., (1,n), (2,3), ....
        """
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        if d is None:
            table = {(i, j): CPoly.param(f"d{i}{j}") for i, j in pairs}
        elif isinstance(d, Mapping):
            table = dict(d)
        else:
            values = list(d)
            if len(values) != len(pairs):
                raise ValueError(f"CSD_{n} needs {len(pairs)} constants, got {len(values)}")
            table = dict(zip(pairs, values))
        return cls(n, table)

    def d(self, i: int, j: int):
        """Structure constant d_ij (1-based, i < j)."""
        return self._d[(i, j)]

    def constants(self) -> dict[tuple[int, int], object]:
        return dict(self._d)

    @property
    def assumptions(self) -> frozenset:
        return self._assumptions

    def is_weyl(self) -> bool:
        return self.n == 2 and self._d[(1, 2)] == 1

    def index(self, name: str) -> int:
        return self._index[name]

    def gen(self, k: int) -> "NCPoly":
        """The generator x_{k+1} (0-based index)."""
        e = [0] * self.n
        e[k] = 1
        return NCPoly(self, {tuple(e): Fraction(1)})

    def gens(self) -> list["NCPoly"]:
        return [self.gen(k) for k in range(self.n)]

    def var(self, name: str) -> "NCPoly":
        return self.gen(self._index[name])

    def const(self, c) -> "NCPoly":
        return NCPoly(self, {(0,) * self.n: c})

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def one(self) -> "NCPoly":
        return self.const(Fraction(1))

    def monomial(self, exps: Sequence[int], c=Fraction(1)) -> "NCPoly":
        return NCPoly(self, {tuple(exps): c})

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        if self is other:
            return True
        return (self.n == other.n and self.names == other.names
                and all(self._d[k] == other._d[k] for k in self._d))

    def __hash__(self):
        return hash((self.n, self.names))

    def __repr__(self):
        if self.is_weyl():
            return "Signature.weyl()"
        ds = ", ".join(f"d{i}{j}={v}" for (i, j), v in self._d.items())
        return f"Signature(n={self.n}, {ds})"

    # -- monomial products ---------------------------------------------
    def _mono_times_var(self, alpha: Exponents, i: int, b: int) -> dict:
        """x^alpha * x_i^b in canonical form (0-based i)."""
        key = (alpha, i, b)
        cached = self._var_cache.get(key)
        if cached is not None:
            return cached
        j = None
        for k in range(self.n - 1, i, -1):
            if alpha[k]:
                j = k
                break
        if j is None:
            new = list(alpha)
            new[i] += b
            result = {tuple(new): 1}
        else:
            aj = alpha[j]
            prefix = list(alpha)
            prefix[j] = 0
            prefix = tuple(prefix)
            dij = self._d[(i + 1, j + 1)]
            result: dict = {}
            for k in range(min(aj, b) + 1):
                scalar = factorial(k) * comb(aj, k) * comb(b, k)
                c = scalar if k == 0 else scalar * dij ** k
                for m, v in self._mono_times_var(prefix, i, b - k).items():
                    m = list(m)
                    m[j] = aj - k
                    m = tuple(m)
                    acc = result.get(m, 0) + v * c
                    if acc == 0:
                        result.pop(m, None)
                    else:
                        result[m] = acc
        if len(self._var_cache) > _CACHE_LIMIT:
            self._var_cache.clear()
        self._var_cache[key] = result
        return result

    def mono_mul(self, alpha: Exponents, beta: Exponents) -> dict:
        """Canonical expansion of x^alpha * x^beta as ``{exponents: coefficient}``."""
        key = (alpha, beta)
        cached = self._mono_cache.get(key)
        if cached is not None:
            return cached
        current: dict = {alpha: 1}
        for i, b in enumerate(beta):
            if not b:
                continue
            nxt: dict = {}
            for m, c in current.items():
                for m2, c2 in self._mono_times_var(m, i, b).items():
                    acc = nxt.get(m2, 0) + c * c2
                    if acc == 0:
                        nxt.pop(m2, None)
                    else:
                        nxt[m2] = acc
            current = nxt
        if len(self._mono_cache) > _CACHE_LIMIT:
            self._mono_cache.clear()
        self._mono_cache[key] = current
        return current


def deglex_key(exps: Exponents) -> tuple:
    """Sort key realizing deglex: total degree, then leftmost larger exponent."""
    return (sum(exps), exps)


class NCPoly:
    """Element of CSD_n(K) in standard-monomial form. Immutable."""

    __slots__ = ("sig", "_terms")

    def __init__(self, sig: Signature, terms: Mapping[Exponents, object] | None = None):
        self.sig = sig
        clean = {}
        if terms:
            for m, c in terms.items():
                m = tuple(m)
                if len(m) != sig.n or any(e < 0 for e in m):
                    raise ValueError(f"bad exponent vector {m} for n={sig.n}")
                if isinstance(c, int):
                    c = Fraction(c)
                if c != 0:
                    clean[m] = c
        self._terms = clean

    @classmethod
    def _raw(cls, sig: Signature, terms: dict) -> "NCPoly":
        obj = cls.__new__(cls)
        obj.sig = sig
        obj._terms = terms
        return obj

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Exponents, object]]:
        return iter(self._terms.items())

    def sorted_terms(self) -> list[tuple[Exponents, object]]:
        """Terms in deglex-descending order."""
        return sorted(self._terms.items(), key=lambda kv: deglex_key(kv[0]), reverse=True)

    def coefficient(self, exps: Sequence[int]):
        return self._terms.get(tuple(exps), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        zero = (0,) * self.sig.n
        return all(m == zero for m in self._terms)

    def constant_term(self):
        return self._terms.get((0,) * self.sig.n, Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for zero."""
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def degree_in(self, k: int) -> int:
        if not self._terms:
            return -1
        return max(m[k] for m in self._terms)

    def params(self) -> set[str]:
        out: set[str] = set()
        for c in self._terms.values():
            if isinstance(c, (CPoly, FracElem)):
                out |= c.params()
        return out

    def assumptions(self) -> frozenset:
        out: frozenset = frozenset()
        for c in self._terms.values():
            out |= coeff_assumptions(c)
        return out

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "NCPoly") -> None:
        if self.sig is not other.sig and self.sig != other.sig:
            raise SignatureMismatch("polynomials belong to different algebras")

    def _coerce(self, other):
        if isinstance(other, NCPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, CPoly, FracElem)):
            return self.sig.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for m, c in o._terms.items():
            if m in terms:
                v = terms[m] + c
                if v == 0:
                    del terms[m]
                else:
                    terms[m] = v
            else:
                terms[m] = c
        return NCPoly._raw(self.sig, terms)

    __radd__ = __add__

    def __neg__(self) -> "NCPoly":
        return NCPoly._raw(self.sig, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "NCPoly":
        if c == 0:
            return self.sig.zero()
        terms = {}
        for m, v in self._terms.items():
            w = v * c
            if w != 0:
                terms[m] = w
        return NCPoly._raw(self.sig, terms)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CPoly, FracElem)):
            return self.scale(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        self._check(other)
        sig = self.sig
        acc: dict = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                cab = ca * cb
                for m, c in sig.mono_mul(a, b).items():
                    v = cab if c == 1 else cab * c
                    if m in acc:
                        acc[m] = acc[m] + v
                    else:
                        acc[m] = v
        return NCPoly._raw(sig, {m: c for m, c in acc.items() if c != 0})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CPoly, FracElem)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CPoly, FracElem)):
            if isinstance(other, (CPoly, FracElem)):
                return self.scale(FracElem.coerce(1) / other)
            return self.scale(1 / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int) -> "NCPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result = self.sig.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CPoly, FracElem)):
            other = self.sig.const(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        if self.sig is not other.sig and self.sig != other.sig:
            return False
        if self._terms.keys() != other._terms.keys():
            return False
        return all(self._terms[m] == other._terms[m] for m in self._terms)

    __hash__ = None

    # -- coefficient maps -----------------------------------------------
    def map_coeffs(self, fn) -> "NCPoly":
        terms = {}
        for m, c in self._terms.items():
            v = fn(c)
            if v != 0:
                terms[m] = v
        return NCPoly._raw(self.sig, terms)

    def substitute(self, env: Mapping[str, object]) -> "NCPoly":
        """Instantiate coefficient parameters."""
        return self.map_coeffs(lambda c: substitute_coeff(c, env))

    def __str__(self) -> str:
        from .cli.printer import format_canonical

        return format_canonical(self)

    def __repr__(self) -> str:
        return f"NCPoly({str(self)!r})"


@dataclass(frozen=True)
class LeadingData:
    lm: Exponents
    lc: object
    deg: int


def nc_mul(f: NCPoly, g: NCPoly) -> NCPoly:
    return f * g


def commutator(f: NCPoly, g: NCPoly) -> NCPoly:
    """[f, g] = f g - g f."""
    return f * g - g * f


def leading_data(f: NCPoly) -> LeadingData | None:
    """Leading monomial, coefficient and degree under deglex; ``None`` for zero."""
    if f.is_zero():
        return None
    lm = max(f._terms, key=deglex_key)
    return LeadingData(lm, f._terms[lm], sum(lm))


def mass(f: NCPoly) -> int:
    """Number of nonzero homogeneous components of f in A_1.

    The grading puts t^a x^b in degree a - b (the eigenvalue of ad(x t)), so
    the mass is the number of distinct values of a - b among f's monomials.
    """
    if not f.sig.is_weyl():
        raise ValueError("mass is defined on A_1 only")
    if f.is_zero():
        raise ValueError("mass of the zero polynomial is undefined")
    return len({a - b for a, b in f._terms})


def is_central(f: NCPoly) -> bool:
    """True iff f commutes with every generator."""
    return all(commutator(x, f).is_zero() for x in f.sig.gens())


def from_t_coefficients(sig: Signature, coeffs: Iterable, var: str = "t") -> NCPoly:
    """Assemble sum_i c_i(t) x^i from coefficients polynomial in the parameter ``var``.

    A :class:`FracElem` coefficient is accepted when ``var`` does not occur in
    its denominator.
    """
    terms: dict = {}
    for i, c in enumerate(coeffs):
        den = None
        if isinstance(c, FracElem):
            if var in c.den.params():
                raise ValueError(f"{var} occurs in a denominator")
            c, den = c.num, c.den
        c = CPoly.coerce(c) if not isinstance(c, CPoly) else c
        for e, part in c.coefficients_in(var).items():
            terms[(e, i)] = simplify_coeff(part if den is None else FracElem.coerce(part) / den)
    return NCPoly(sig, terms)


WEYL = Signature.weyl()
