"""Recursive-descent parser for the shared expression grammar.

Grammar (whitespace insignificant):

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' exponent)?
    atom   := NUMBER | IDENT | FUNC '(' expr ')' | '(' expr ')'

NUMBER is a nonnegative rational literal (3, 0.5, 7/2 arises as division);
IDENT is x<k> for state variables or a declared parameter name matching
[a-z][a-z0-9_]*; FUNC is one of exp, ln, sin, cos. Exponents are literal
(optionally parenthesized, optionally signed) integers.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from ..errors import ExprSyntaxError, UnknownIdentifierError
from .nodes import Add, Const, Expr, Func, FUNCTION_NAMES, Mul, Param, Pow, Var, neg
from .normalize import normalize

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>[0-9]+(?:\.[0-9]+)?(?:[eE][-+]?[0-9]+)?)"
    r"|(?P<ident>[a-z][a-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)

_VAR_RE = re.compile(r"^x([0-9]+)$")


class _Token:
    __slots__ = ("kind", "text", "offset")

    def __init__(self, kind, text, offset):
        self.kind = kind
        self.text = text
        self.offset = offset


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ExprSyntaxError(f"unexpected character {text[bad_at]!r}", bad_at)
        for kind in ("number", "ident", "op"):
            if m.group(kind) is not None:
                tokens.append(_Token(kind, m.group(kind), m.start(kind)))
                break
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int, params: Iterable[str]):
        self.text = text
        self.n = n
        self.params = frozenset(params)
        for name in self.params:
            if _VAR_RE.match(name) or name in FUNCTION_NAMES:
                raise ExprSyntaxError(f"parameter name {name!r} is reserved", 0)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        tok = self.advance()
        if tok.kind != "op" or tok.text != op:
            raise ExprSyntaxError(f"expected {op!r}", tok.offset)

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {tok.text!r}", tok.offset)
        return e

    def expr(self) -> Expr:
        terms = [self.term()]
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                t = self.term()
                terms.append(t if tok.text == "+" else neg(t))
            else:
                break
        return terms[0] if len(terms) == 1 else Add(tuple(terms))

    def term(self) -> Expr:
        factors = [self.unary()]
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in "*/":
                self.advance()
                f = self.unary()
                factors.append(f if tok.text == "*" else Pow(f, -1))
            else:
                break
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        tok = self.peek()
        sign = 1
        parens = False
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            parens = True
            tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            sign = -1
            tok = self.peek()
        if tok.kind != "number" or "." in tok.text or "e" in tok.text or "E" in tok.text:
            raise ExprSyntaxError("exponent must be an integer literal", tok.offset)
        self.advance()
        if parens:
            self.expect_op(")")
        return sign * int(tok.text)

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "number":
            return Const(Fraction(tok.text))
        if tok.kind == "ident":
            if tok.text in FUNCTION_NAMES:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Func(tok.text, arg)
            m = _VAR_RE.match(tok.text)
            if m:
                index = int(m.group(1))
                if index < 1 or index > self.n:
                    raise UnknownIdentifierError(
                        f"x{index} (state dimension is {self.n})", tok.offset
                    )
                return Var(index)
            if tok.text in self.params:
                return Param(tok.text)
            raise UnknownIdentifierError(tok.text, tok.offset)
        if tok.kind == "op" and tok.text == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(f"expected a value, got {tok.text!r}" if tok.text else "unexpected end of input", tok.offset)


def parse(text: str, n: int, params: Iterable[str] = ()) -> Expr:
    """Parse expression text over states x1..xn and the given parameter names.

    Returns the normalized expression. Raises ExprSyntaxError (with byte
    offset), UnknownIdentifierError, or ExprDomainError for degenerate
    constants such as a literal division by zero.
    """
    return normalize(_Parser(text, n, params).parse())
