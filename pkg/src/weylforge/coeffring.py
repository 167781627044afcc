"""Coefficient tower: rationals, commutative parameter polynomials, and their
fraction field.

Three coefficient kinds coexist and coerce upward automatically:

* ``int`` / :class:`fractions.Fraction` (the base field, exact rationals),
* :class:`CPoly`, a sparse commutative polynomial in named parameters,
* :class:`FracElem`, a quotient of two ``CPoly`` values that also carries the
  set of polynomials asserted to be nonzero along the way.

Arithmetic between a lower and a higher kind produces the higher kind, so code
working with "coefficients" can stay agnostic about which one it holds.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

Rational = Fraction
Mono = tuple  # tuple[tuple[str, int], ...], sorted by parameter order


class NotDivisible(ArithmeticError):
    """Raised when an exact polynomial division leaves a remainder."""


@lru_cache(maxsize=None)
def param_key(name: str) -> tuple:
    """Sort key for parameter names.

    Digit runs compare numerically, so ``l2`` sorts before ``l10``.
    """
    parts = re.findall(r"\d+|\D+", name)
    return tuple((1, int(p), "") if p.isdigit() else (0, 0, p) for p in parts)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for name, e in b:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items(), key=lambda kv: param_key(kv[0])))


def _mono_divides(a: Mono, b: Mono) -> bool:
    """True if monomial ``a`` divides monomial ``b``."""
    exps = dict(b)
    return all(exps.get(name, 0) >= e for name, e in a)


def _mono_div(b: Mono, a: Mono) -> Mono:
    exps = dict(b)
    for name, e in a:
        exps[name] -= e
    return tuple((n, e) for n, e in exps.items() if e)


def _mono_str(m: Mono) -> str:
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


def _as_fraction(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class CPoly:
    """Sparse commutative polynomial over the rationals in named parameters.

    Terms map a monomial (sorted tuple of ``(name, exponent)`` pairs) to a
    nonzero :class:`Fraction`. Instances are immutable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Mono, object] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "CPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "CPoly":
        return cls({(): c})

    @classmethod
    def param(cls, name: str, exponent: int = 1) -> "CPoly":
        if exponent == 0:
            return cls.const(1)
        return cls._raw({((name, exponent),): Fraction(1)})

    @classmethod
    def coerce(cls, value) -> "CPoly":
        if isinstance(value, CPoly):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot coerce {type(value).__name__} to CPoly")

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Mono, Fraction]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        """The constant term (the value when the polynomial is constant)."""
        return self._terms.get((), Fraction(0))

    def params(self) -> set[str]:
        return {name for m in self._terms for name, _ in m}

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e for _, e in m) for m in self._terms)

    def degree_in(self, name: str) -> int:
        if not self._terms:
            return -1
        return max(dict(m).get(name, 0) for m in self._terms)

    def coefficient(self, mono: Mono) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def coefficients_in(self, name: str) -> dict[int, "CPoly"]:
        """Split as a polynomial in ``name``: exponent -> coefficient CPoly."""
        out: dict[int, dict] = {}
        for m, c in self._terms.items():
            exps = dict(m)
            e = exps.pop(name, 0)
            rest = tuple(sorted(exps.items(), key=lambda kv: param_key(kv[0])))
            out.setdefault(e, {})[rest] = c
        return {e: CPoly._raw(t) for e, t in out.items()}

    def sorted_terms(self, order: Iterable[str] | None = None) -> list[tuple[Mono, Fraction]]:
        """Terms in deglex-descending order over the given parameter order."""
        names = list(order) if order is not None else sorted(self.params(), key=param_key)
        index = {n: i for i, n in enumerate(names)}

        def key(item):
            vec = [0] * len(names)
            for n, e in item[0]:
                vec[index[n]] = e
            return (sum(vec), vec)

        return sorted(self._terms.items(), key=key, reverse=True)

    def leading_coefficient(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        return self.sorted_terms()[0][1]

    def leading_monomial(self) -> Mono:
        return self.sorted_terms()[0][0]

    def content(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        num = 0
        den = 1
        for c in self._terms.values():
            num = _gcd(num, c.numerator)
            den = den * c.denominator // _gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    def monomial_content(self) -> Mono:
        """Largest monomial dividing every term."""
        common: dict[str, int] | None = None
        for m in self._terms:
            exps = dict(m)
            if common is None:
                common = exps
            else:
                common = {n: min(e, exps[n]) for n, e in common.items() if n in exps}
            if not common:
                return ()
        if not common:
            return ()
        return tuple(sorted(common.items(), key=lambda kv: param_key(kv[0])))

    def primitive(self) -> "CPoly":
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if not self._terms:
            return self
        scale = 1 / self.content()
        if self.leading_coefficient() < 0:
            scale = -scale
        return self.scale(scale)

    # -- arithmetic -----------------------------------------------------
    def scale(self, c) -> "CPoly":
        c = _as_fraction(c)
        if not c:
            return CPoly._raw({})
        return CPoly._raw({m: v * c for m, v in self._terms.items()})

    def __neg__(self) -> "CPoly":
        return CPoly._raw({m: -v for m, v in self._terms.items()})

    def __pos__(self) -> "CPoly":
        return self

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CPoly.const(other)
        elif not isinstance(other, CPoly):
            return NotImplemented
        terms = dict(self._terms)
        for m, c in other._terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return CPoly._raw(terms)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CPoly.const(other)
        elif not isinstance(other, CPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return CPoly.const(other) - self
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, CPoly):
            return NotImplemented
        terms: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                v = terms.get(m, 0) + c1 * c2
                if v:
                    terms[m] = v
                else:
                    terms.pop(m, None)
        return CPoly._raw(terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CPoly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a natural number")
        result = CPoly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self.scale(1 / Fraction(other))
        if isinstance(other, (CPoly, FracElem)):
            return FracElem(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return FracElem(CPoly.const(other)) / self
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if isinstance(other, CPoly):
            return self._terms == other._terms
        if isinstance(other, FracElem):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus and evaluation ----------------------------------------
    def derivative(self, name: str) -> "CPoly":
        terms: dict = {}
        for m, c in self._terms.items():
            exps = dict(m)
            e = exps.get(name, 0)
            if not e:
                continue
            if e == 1:
                del exps[name]
            else:
                exps[name] = e - 1
            key = tuple(sorted(exps.items(), key=lambda kv: param_key(kv[0])))
            terms[key] = terms.get(key, 0) + c * e
        return CPoly(terms)

    def substitute(self, env: Mapping[str, object]):
        """Evaluate the parameters named in ``env``; others stay symbolic.

        Values may be rationals or any coefficient (CPoly, FracElem). The
        result is a CPoly unless a FracElem value was substituted.
        """
        if not env or not (self.params() & env.keys()):
            return self
        result = CPoly._raw({})
        power_cache: dict = {}
        for m, c in self._terms.items():
            kept = []
            factor = Fraction(1)
            for name, e in m:
                if name in env:
                    key = (name, e)
                    if key not in power_cache:
                        power_cache[key] = _coeff_pow(env[name], e)
                    factor = factor * power_cache[key]
                else:
                    kept.append((name, e))
            term = CPoly._raw({tuple(kept): c})
            result = result + term * factor
        return result

    def divide_exact(self, other) -> "CPoly":
        """Return ``q`` with ``self == q * other`` or raise :class:`NotDivisible`."""
        other = CPoly.coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        order = sorted(self.params() | other.params(), key=param_key)
        lm_b, lc_b = other.sorted_terms(order)[0]
        quotient: dict = {}
        rem = self
        while rem:
            lm_r, lc_r = rem.sorted_terms(order)[0]
            if not _mono_divides(lm_b, lm_r):
                raise NotDivisible(f"{other} does not divide {self}")
            m = _mono_div(lm_r, lm_b)
            m = tuple(sorted(m, key=lambda kv: param_key(kv[0])))
            c = lc_r / lc_b
            quotient[m] = c
            rem = rem - other * CPoly._raw({m: c})
        return CPoly._raw(quotient)

    # -- printing -------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for m, c in self.sorted_terms():
            pieces.append(_term_str(c, _mono_str(m)))
        return _join_terms(pieces)

    def __repr__(self) -> str:
        return f"CPoly({str(self)!r})"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _term_str(c: Fraction, mono: str) -> tuple[bool, str]:
    negative = c < 0
    a = -c if negative else c
    if not mono:
        return negative, str(a)
    if a == 1:
        return negative, mono
    return negative, f"{a}*{mono}"


def _join_terms(pieces: list[tuple[bool, str]]) -> str:
    out = []
    for i, (neg, body) in enumerate(pieces):
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _normal_assumption(poly: CPoly) -> list[CPoly]:
    """Split a nonzero-asserted polynomial into its recorded factors.

    Each parameter of the monomial content is recorded on its own, and the
    remaining cofactor (if non-constant) is recorded in primitive form.
    """
    if poly.is_constant():
        return []
    mono = poly.monomial_content()
    out = [CPoly.param(name) for name, _ in mono]
    rest = poly
    if mono:
        rest = poly.divide_exact(CPoly._raw({mono: Fraction(1)}))
    if not rest.is_constant():
        out.append(rest.primitive())
    return out


class FracElem:
    """Element of the fraction field of :class:`CPoly`.

    The representation is normalized only up to rational content, a common
    monomial factor and exact divisibility of numerator by denominator;
    equality is decided by cross-multiplication. ``assumptions`` collects the
    polynomials asserted nonzero by divisions performed so far.
    """

    __slots__ = ("num", "den", "assumptions")

    def __init__(self, num, den=1, assumptions: Iterable[CPoly] = ()):
        num = CPoly.coerce(num)
        den = CPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("FracElem with zero denominator")
        recorded = set(assumptions)
        recorded.update(_normal_assumption(den))
        self.num, self.den = _normalize(num, den)
        self.assumptions = frozenset(recorded)

    @classmethod
    def _raw(cls, num: CPoly, den: CPoly, assumptions: frozenset) -> "FracElem":
        obj = cls.__new__(cls)
        obj.num, obj.den = _normalize(num, den)
        obj.assumptions = assumptions
        return obj

    @classmethod
    def coerce(cls, value) -> "FracElem":
        if isinstance(value, FracElem):
            return value
        return cls._raw(CPoly.coerce(value), CPoly.const(1), frozenset())

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value() / self.den.constant_value()

    def as_cpoly(self) -> CPoly:
        if not self.den.is_constant():
            raise ValueError(f"{self} is not a polynomial")
        return self.num.scale(1 / self.den.constant_value())

    def params(self) -> set[str]:
        return self.num.params() | self.den.params()

    # -- arithmetic -----------------------------------------------------
    def _lift(self, other):
        if isinstance(other, FracElem):
            return other
        if isinstance(other, (int, Fraction, CPoly)):
            return FracElem.coerce(other)
        return None

    def __neg__(self):
        return FracElem._raw(-self.num, self.den, self.assumptions)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a = self.assumptions | o.assumptions
        if self.den == o.den:
            return FracElem._raw(self.num + o.num, self.den, a)
        return FracElem._raw(self.num * o.den + o.num * self.den, self.den * o.den, a)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return FracElem._raw(self.num * o.num, self.den * o.den, self.assumptions | o.assumptions)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero")
        a = set(self.assumptions | o.assumptions)
        a.update(_normal_assumption(o.num))
        return FracElem._raw(self.num * o.den, self.den * o.num, frozenset(a))

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("exponent must be an integer")
        if k < 0:
            return FracElem.coerce(1) / self ** (-k)
        return FracElem._raw(self.num ** k, self.den ** k, self.assumptions)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    __hash__ = None  # equality is not structural

    def substitute(self, env: Mapping[str, object]):
        """Evaluate parameters; a fully numeric result collapses to Fraction."""
        num = _to_frac(self.num.substitute(env))
        den = _to_frac(self.den.substitute(env))
        if den.is_zero():
            raise ZeroDivisionError(f"denominator {self.den} vanishes under substitution")
        kept = set()
        for a in self.assumptions:
            v = a.substitute(env)
            if isinstance(v, FracElem):
                v = v.num
            if v.is_zero():
                raise ZeroDivisionError(f"assumption {a} != 0 violated by substitution")
            if not v.is_constant():
                kept.add(v.primitive())
        out = FracElem._raw(num.num * den.den, num.den * den.num,
                            frozenset(kept) | num.assumptions | den.assumptions)
        return simplify_coeff(out)

    def derivative(self, name: str) -> "FracElem":
        n, d = self.num, self.den
        return FracElem._raw(n.derivative(name) * d - n * d.derivative(name), d * d, self.assumptions)

    def __str__(self) -> str:
        from .cli.printer import format_coefficient

        return format_coefficient(self)

    def __repr__(self) -> str:
        return f"FracElem({str(self)!r})"


def _to_frac(v) -> FracElem:
    return v if isinstance(v, FracElem) else FracElem.coerce(v)


def _normalize(num: CPoly, den: CPoly) -> tuple[CPoly, CPoly]:
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return num, CPoly.const(1)
    if den.is_constant():
        return num.scale(1 / den.constant_value()), CPoly.const(1)
    mono = den.monomial_content()
    if mono:
        nmono = dict(num.monomial_content())
        common = tuple((n, min(e, nmono[n])) for n, e in mono if n in nmono)
        if common:
            divisor = CPoly._raw({common: Fraction(1)})
            num = num.divide_exact(divisor)
            den = den.divide_exact(divisor)
            if den.is_constant():
                return num.scale(1 / den.constant_value()), CPoly.const(1)
    if num.degree() >= den.degree():
        try:
            q = num.divide_exact(den)
        except NotDivisible:
            pass
        else:
            return q, CPoly.const(1)
    scale = 1 / den.content()
    if den.leading_coefficient() < 0:
        scale = -scale
    return num.scale(scale), den.scale(scale)


def cancel_factors(value, factors: Iterable[CPoly]):
    """Cancel every known factor that divides both numerator and denominator.

    Without a multivariate GCD this is the practical way to keep quotients
    small: callers pass the polynomials they divided by along the way.
    """
    if not isinstance(value, FracElem) or value.den.is_constant():
        return value
    num, den = value.num, value.den
    for f in sorted(set(factors), key=lambda g: (g.degree(), len(g))):
        if f.is_constant():
            continue
        while not den.is_constant():
            try:
                n2, d2 = num.divide_exact(f), den.divide_exact(f)
            except NotDivisible:
                break
            num, den = n2, d2
    return simplify_coeff(FracElem._raw(num, den, value.assumptions))


def reduce_assumptions(assumptions: Iterable[CPoly]) -> frozenset:
    """Drop recorded polynomials that are products of smaller recorded ones."""
    polys = sorted(set(assumptions), key=lambda g: (g.degree(), len(g)))
    kept: list[CPoly] = []
    for g in polys:
        rest = g
        for f in kept:
            while not rest.is_constant():
                try:
                    rest = rest.divide_exact(f)
                except NotDivisible:
                    break
        if not rest.is_constant():
            rest = rest.primitive()
            if rest.leading_coefficient() < 0:
                rest = -rest
            if rest not in kept:
                kept.append(rest)
    return frozenset(kept)


Coefficient = Union[int, Fraction, CPoly, FracElem]


def _coeff_pow(value, e: int):
    if isinstance(value, int):
        return Fraction(value) ** e
    return value ** e


def is_zero(c) -> bool:
    return not c


def simplify_coeff(c):
    """Demote a coefficient to the lowest kind that represents it exactly.

    Demotion drops recorded assumptions, so callers use it only when a value
    is fully numeric or when assumptions are tracked elsewhere.
    """
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, FracElem):
        if c.is_constant():
            return c.constant_value()
        if c.is_polynomial() and not c.assumptions:
            return c.as_cpoly()
        return c
    if isinstance(c, CPoly) and c.is_constant():
        return c.constant_value()
    return c


def substitute_coeff(c, env: Mapping[str, object]):
    """Substitute into any coefficient kind, demoting numeric results."""
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, CPoly):
        return simplify_coeff(c.substitute(env))
    return c.substitute(env)


def coeff_params(c) -> set[str]:
    if isinstance(c, (CPoly, FracElem)):
        return c.params()
    return set()


def coeff_assumptions(c) -> frozenset:
    if isinstance(c, FracElem):
        return c.assumptions
    return frozenset()


def coeff_derivative(c, name: str):
    if isinstance(c, (CPoly, FracElem)):
        return c.derivative(name)
    return Fraction(0)


def coeff_str(c) -> str:
    if isinstance(c, (int, Fraction)):
        return str(c)
    return str(c)


# Operation names used by the rest of the package ----------------------------

def cpoly_mul(a: CPoly, b: CPoly) -> CPoly:
    return CPoly.coerce(a) * CPoly.coerce(b)


def cpoly_derivative(a: CPoly, v: str) -> CPoly:
    return CPoly.coerce(a).derivative(v)


def cpoly_substitute(a: CPoly, env: Mapping[str, object]):
    return CPoly.coerce(a).substitute(env)


def cpoly_divide_exact(a: CPoly, b: CPoly) -> CPoly:
    return CPoly.coerce(a).divide_exact(b)
