"""Expression parser for algebra elements, coefficients and elementary words.

Grammar::

    expr   := ["+"|"-"] term (("+"|"-") term)*
    term   := factor (("*" | "/" | <juxtaposition>) factor)*
    factor := atom ("^" nat)?
    atom   := int | ident | "(" expr ")"
    ident  := letter (letter | digit | "_")*

Products keep their written order, which matters because the algebra is
noncommutative. ``a/b`` requires ``b`` to be free of algebra variables; a
rational literal such as ``3/2`` is just that case.  Identifiers naming a
variable of the signature (``t``, ``x`` or ``x1``...) are generators; every
other identifier is a coefficient parameter (``l0``, ``d12``, ...).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..algebra import NCPoly, Signature
from ..coeffring import CPoly, FracElem, simplify_coeff

MAX_EXPONENT = 1000

# names reserved for algebra variables; outside their algebra they are errors
# rather than silently becoming parameters
_VARIABLE_SHAPED = re.compile(r"t|x|x\d+")


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


# -- abstract syntax ------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Ident, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def expr(self) -> Expr:
        kind, text, _ = self.peek()
        node: Expr
        if kind == "op" and text in "+-":
            self.take()
            node = self.term()
            if text == "-":
                node = Neg(node)
        else:
            node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.take()
                node = BinOp(text, node, self.term())
            else:
                return node

    def _starts_atom(self) -> bool:
        kind, text, _ = self.peek()
        return kind in ("num", "ident") or (kind == "op" and text == "(")

    def term(self) -> Expr:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.take()
                node = BinOp(text, node, self.factor())
            elif self._starts_atom():
                node = BinOp("*", node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.take()
            kind, text, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a natural number", pos)
            k = int(text)
            if k > MAX_EXPONENT:
                raise ParseError(f"exponent {k} exceeds the limit {MAX_EXPONENT}", pos)
            return Pow(base, k)
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Num(int(text))
        if kind == "ident":
            return Ident(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse_ast(src: str) -> Expr:
    parser = _Parser(src)
    node = parser.expr()
    kind, text, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing {text!r}", pos)
    return node


# -- evaluation -----------------------------------------------------------

def _eval(node: Expr, leaf, div):
    if isinstance(node, Num):
        return leaf(node)
    if isinstance(node, Ident):
        return leaf(node)
    if isinstance(node, Neg):
        return -_eval(node.arg, leaf, div)
    if isinstance(node, Pow):
        return _eval(node.base, leaf, div) ** node.exponent
    left = _eval(node.left, leaf, div)
    right = _eval(node.right, leaf, div)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return div(left, right)


def _coeff_div(a, b):
    b = simplify_coeff(b)
    if isinstance(b, Fraction):
        if b == 0:
            raise ParseError("division by zero")
        return a * (1 / b)
    if isinstance(a, (int, Fraction)):
        a = FracElem.coerce(a)
    return a / b


def parse_coefficient(src: str):
    """Parse a parameter expression into the coefficient tower."""
    def leaf(node):
        if isinstance(node, Num):
            return Fraction(node.value)
        return CPoly.param(node.name)

    try:
        return simplify_coeff(_eval(parse_ast(src), leaf, _coeff_div))
    except ZeroDivisionError as exc:
        raise ParseError(str(exc)) from exc


def parse_expression(src: str, sig: Signature) -> NCPoly:
    """Parse text into a canonical element of the algebra ``sig``."""
    def leaf(node):
        if isinstance(node, Num):
            return sig.const(Fraction(node.value))
        if node.name in sig.names:
            return sig.var(node.name)
        if _VARIABLE_SHAPED.fullmatch(node.name):
            raise ParseError(f"unknown identifier {node.name!r}: not a variable of this algebra "
                             f"({', '.join(sig.names)})")
        return sig.const(CPoly.param(node.name))

    def div(a: NCPoly, b: NCPoly) -> NCPoly:
        if not b.is_constant():
            raise ParseError("division by an expression involving algebra variables")
        c = b.constant_term()
        if c == 0:
            raise ParseError("division by zero")
        return a.map_coeffs(lambda v: simplify_coeff(_coeff_div(v, c)))

    try:
        return _eval(parse_ast(src), leaf, div)
    except ZeroDivisionError as exc:
        raise ParseError(str(exc)) from exc


# -- elementary words -----------------------------------------------------

_LETTER = re.compile(r"\s*(Phi|Psi)\s*\(\s*(\d+)\s*,", re.IGNORECASE)


def parse_word(src: str) -> list[tuple[str, int, object]]:
    """Parse ``"Psi(1, l0) Phi(2, -1/l1) ..."`` into ``(kind, exponent, lambda)``.

    Letters may be separated by whitespace or ``*``; the rightmost letter is
    applied first when the word is evaluated.
    """
    letters = []
    pos = 0
    src = src.strip()
    while pos < len(src):
        while pos < len(src) and src[pos] in " *\t\n":
            pos += 1
        if pos >= len(src):
            break
        m = _LETTER.match(src, pos)
        if m is None:
            raise ParseError("expected Phi(n, lambda) or Psi(n, lambda)", pos)
        depth = 1
        j = m.end()
        start = j
        while j < len(src) and depth:
            if src[j] == "(":
                depth += 1
            elif src[j] == ")":
                depth -= 1
            j += 1
        if depth:
            raise ParseError("unbalanced parentheses in elementary letter", pos)
        lam = parse_coefficient(src[start:j - 1])
        letters.append((m.group(1).capitalize(), int(m.group(2)), lam))
        pos = j
    return letters
