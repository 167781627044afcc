"""Canonical text for coefficients and algebra elements.

The output is deterministic (deglex-descending terms) and re-parseable by
:mod:`weylforge.cli.parser`.
"""

from __future__ import annotations

from fractions import Fraction

from ..coeffring import CPoly, FracElem


def _mono_text(names, exps) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _is_bare_denominator(den: CPoly) -> bool:
    """A denominator can be printed without parentheses only if it is a
    single parameter power; anything longer would re-associate on parsing."""
    if len(den) != 1:
        return False
    ((mono, c),) = den.items()
    return c == 1 and len(mono) == 1


def _signed_coefficient(c) -> tuple[bool, str, bool]:
    """Split a coefficient into (negative, body, is_one).

    ``body`` is safe to follow with ``*monomial``.
    """
    if isinstance(c, int):
        c = Fraction(c)
    if isinstance(c, Fraction):
        neg = c < 0
        a = -c if neg else c
        return neg, str(a), a == 1
    if isinstance(c, FracElem) and c.den == 1:
        c = c.num
    if isinstance(c, CPoly):
        if c.is_constant():
            return _signed_coefficient(c.constant_value())
        if len(c) == 1:
            lc = c.leading_coefficient()
            neg = lc < 0
            return neg, str(-c if neg else c), False
        return False, f"({c})", False
    if isinstance(c, FracElem):
        num, den = c.num, c.den
        neg = False
        if len(num) == 1 and num.leading_coefficient() < 0:
            neg = True
            num = -num
        num_text = str(num) if len(num) == 1 else f"({num})"
        den_text = str(den) if _is_bare_denominator(den) else f"({den})"
        return neg, f"{num_text}/{den_text}", False
    raise TypeError(f"unsupported coefficient {c!r}")


def _wrapped(body: str) -> bool:
    """True if ``body`` is one parenthesized group, e.g. ``(a + 1)`` but not ``(a)/(b)``."""
    if not (body.startswith("(") and body.endswith(")")):
        return False
    depth = 0
    for i, ch in enumerate(body):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and i < len(body) - 1:
            return False
    return True


def format_coefficient(c) -> str:
    neg, body, _ = _signed_coefficient(c)
    if _wrapped(body):
        body = body[1:-1]
    return f"-{body}" if neg else body


def format_terms(names, terms) -> str:
    """Render ``[(exponents, coefficient), ...]`` already in display order."""
    pieces = []
    for exps, c in terms:
        mono = _mono_text(names, exps)
        neg, body, one = _signed_coefficient(c)
        if not mono:
            # a sum may lose its parentheses unless it would start with a sign
            if _wrapped(body) and (not pieces or not body.startswith("(-")):
                body = body[1:-1]
            text = body
        elif one:
            text = mono
        else:
            text = f"{body}*{mono}"
        pieces.append((neg, text))
    if not pieces:
        return "0"
    out = []
    for i, (neg, text) in enumerate(pieces):
        if i == 0:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(f" - {text}" if neg else f" + {text}")
    return "".join(out)


def format_canonical(f) -> str:
    """Canonical text of an :class:`~weylforge.algebra.NCPoly`."""
    return format_terms(f.sig.names, f.sorted_terms())
