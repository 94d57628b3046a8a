"""Problem-file and expression parsing.

Expression grammar (no implicit multiplication)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*      # "/" only by a nonzero constant
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | IDENT | "(" expr ")"

Problem files are line oriented (``key: value``; ``#`` starts a comment)::

    vars: x y
    eta: (2*x) dx + (3*y^2) dy
    poles: (x^2 + y^3)^1
    point: (0,0 0,0)
    expected: lambdas = 1; G = 0
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..algebra import Poly
from ..forms import MeroOneForm, OneForm, PoleDivisor


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),=;]))")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str, line: int = 1, offset: int = 0) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + bad]!r}", line, offset + pos + bad + 1)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), offset + start + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], variables: Sequence[str], line: int, end_col: int):
        self.tokens = tokens
        self.i = 0
        self.vars = list(variables)
        self.line = line
        self.end_col = end_col

    def peek(self) -> Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok if tok is not None else self.peek()
        return ParseError(message, self.line, tok.col if tok else self.end_col)

    def take(self, text: str | None = None, kind: str | None = None) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error(f"expected {text or kind}, found end of input")
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            raise self.error(f"expected {text or kind}, found {tok.text!r}")
        self.i += 1
        return tok

    def at(self, *texts: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "op" and tok.text in texts

    def expr(self) -> Poly:
        value = self.term()
        while self.at("+", "-"):
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Poly:
        value = self.unary()
        while self.at("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                value = value * rhs
            else:
                if rhs.variables() or rhs.is_zero():
                    raise self.error("division is only allowed by a nonzero constant", op)
                value = value.scale(1 / rhs.constant_term())
        return value

    def unary(self) -> Poly:
        if self.at("-"):
            self.take()
            return -self.unary()
        if self.at("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.at("^"):
            self.take()
            exp = self.take(kind="num")
            base = base ** int(exp.text)
        return base

    def atom(self) -> Poly:
        tok = self.peek()
        n = len(self.vars)
        if tok is None:
            raise self.error("expected an expression, found end of input")
        if tok.kind == "num":
            self.i += 1
            return Poly.const(int(tok.text), n)
        if tok.kind == "ident":
            if tok.text not in self.vars:
                raise self.error(f"unknown variable {tok.text}", tok)
            self.i += 1
            return Poly.var(self.vars.index(tok.text), n)
        if self.at("("):
            self.take("(")
            value = self.expr()
            self.take(")")
            return value
        raise self.error(f"unexpected token {tok.text!r}", tok)

    def done(self) -> None:
        if self.peek() is not None:
            raise self.error(f"unexpected trailing token {self.peek().text!r}")


def parse_polynomial(text: str, variables: Sequence[str], line: int = 1, offset: int = 0) -> Poly:
    parser = _Parser(tokenize(text, line, offset), variables, line, offset + len(text) + 1)
    value = parser.expr()
    parser.done()
    return value


def parse_one_form(text: str, variables: Sequence[str], line: int = 1, offset: int = 0) -> OneForm:
    """Parse ``(<expr>) d<var>`` terms joined by ``+``/``-``."""
    parser = _Parser(tokenize(text, line, offset), variables, line, offset + len(text) + 1)
    n = len(variables)
    coeffs = [Poly.zero(n) for _ in range(n)]
    first = True
    while parser.peek() is not None:
        sign = 1
        if parser.at("+", "-"):
            sign = -1 if parser.take().text == "-" else 1
        elif not first:
            raise parser.error("expected '+' or '-' between 1-form terms")
        if parser.at("("):
            parser.take("(")
            coeff = parser.expr()
            parser.take(")")
        else:
            coeff = Poly.const(1, n)
        tok = parser.take(kind="ident")
        name = tok.text
        if not name.startswith("d") or name[1:] not in variables:
            raise parser.error(f"unknown differential {name}", tok)
        k = list(variables).index(name[1:])
        coeffs[k] = coeffs[k] + coeff.scale(sign)
        first = False
    if first:
        raise parser.error("empty 1-form")
    return OneForm(tuple(coeffs))


def parse_poles(text: str, variables: Sequence[str], line: int = 1, offset: int = 0) -> list[tuple[Poly, int]]:
    parser = _Parser(tokenize(text, line, offset), variables, line, offset + len(text) + 1)
    poles = []
    while True:
        start = parser.take("(")
        f = parser.expr()
        parser.take(")")
        mult = 1
        if parser.at("^"):
            parser.take("^")
            sign = 1
            if parser.at("-"):
                parser.take("-")
                sign = -1
            mult = sign * int(parser.take(kind="num").text)
        if mult < 1:
            raise ParseError(f"multiplicity must be >= 1, got {mult}", line, start.col)
        if f.is_zero():
            raise ParseError("pole component is zero", line, start.col)
        if f.constant_term():
            raise ParseError("pole component is a unit (nonzero at the origin)", line, start.col)
        poles.append((f, mult))
        if parser.peek() is None:
            break
        parser.take(",")
    return poles


_COMPLEX = re.compile(r"^\s*([-+]?[0-9.eE+-]+)\s*(?:,\s*([-+]?[0-9.eE+-]+))?\s*$")


def parse_point(text: str, nvars: int, line: int = 1, offset: int = 0) -> tuple[complex, ...]:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ParseError("point must be written as (re,im re,im ...)", line, offset + 1)
    entries = body[1:-1].split()
    if len(entries) != nvars:
        raise ParseError(f"point needs {nvars} coordinates, got {len(entries)}", line, offset + 1)
    out = []
    for entry in entries:
        m = _COMPLEX.match(entry)
        if not m:
            raise ParseError(f"bad complex coordinate {entry!r}", line, offset + text.find(entry) + 1)
        try:
            out.append(complex(float(m.group(1)), float(m.group(2) or 0)))
        except ValueError:
            raise ParseError(f"bad complex coordinate {entry!r}", line, offset + text.find(entry) + 1) from None
    return tuple(out)


@dataclass(frozen=True)
class Expected:
    lambdas: tuple[Fraction, ...] | None = None
    G: Poly | None = None


def parse_expected(text: str, variables: Sequence[str], line: int = 1, offset: int = 0) -> Expected:
    lambdas = None
    G = None
    pos = offset
    for chunk in text.split(";"):
        key, sep, value = chunk.partition("=")
        col = pos + len(key) + len(sep) + 1
        name = key.strip()
        if not sep:
            if chunk.strip():
                raise ParseError("expected 'lambdas = ...' or 'G = ...'", line, pos + 1)
        elif name == "lambdas":
            items = [v for v in value.split(",")]
            vals = []
            for item in items:
                p = parse_polynomial(item, variables, line, col - 1)
                if p.variables():
                    raise ParseError("residues must be constants", line, col)
                vals.append(p.constant_term())
                col += len(item) + 1
            lambdas = tuple(vals)
        elif name == "G":
            G = parse_polynomial(value, variables, line, col - 1)
        else:
            raise ParseError(f"unknown expected field {name!r}", line, pos + 1)
        pos += len(chunk) + 1
    return Expected(lambdas, G)


@dataclass(frozen=True)
class ProblemFile:
    vars: tuple[str, ...]
    eta: OneForm
    poles: tuple[tuple[Poly, int], ...]
    points: tuple[tuple[complex, ...], ...] = ()
    expected: Expected | None = None
    extras: dict = field(default_factory=dict)

    def form(self) -> MeroOneForm:
        return MeroOneForm(self.eta, PoleDivisor(self.poles))


_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")
_KEYS = ("vars", "eta", "poles", "point", "expected")


def parse_problem(text: str) -> ProblemFile:
    """Parse a problem file; errors carry line and column."""
    if text.startswith("﻿"):
        text = text[1:]
    entries: list[tuple[str, str, int, int]] = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        key, sep, value = content.partition(":")
        if not sep:
            raise ParseError("expected 'key: value'", lineno, 1)
        key = key.strip()
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, 1)
        entries.append((key, value, lineno, len(content) - len(value)))
    var_lines = [e for e in entries if e[0] == "vars"]
    if not var_lines:
        raise ParseError("missing 'vars:' line", 1, 1)
    if len(var_lines) > 1:
        raise ParseError("duplicate 'vars:' line", var_lines[1][2], 1)
    _, value, lineno, offset = var_lines[0]
    names = value.split()
    if not names:
        raise ParseError("no variables declared", lineno, offset + 1)
    for name in names:
        if not _IDENT.match(name):
            raise ParseError(f"invalid variable name {name!r}", lineno, offset + value.find(name) + 1)
        if name.startswith("d") and name[1:] in names:
            raise ParseError(f"variable name {name!r} clashes with the differential of {name[1:]!r}",
                             lineno, offset + value.find(name) + 1)
    if len(set(names)) != len(names):
        raise ParseError("variable names must be distinct", lineno, offset + 1)
    eta = None
    poles = None
    points = []
    expected = None
    for key, value, lineno, offset in entries:
        if key == "eta":
            if eta is not None:
                raise ParseError("duplicate 'eta:' line", lineno, 1)
            eta = parse_one_form(value, names, lineno, offset)
        elif key == "poles":
            if poles is not None:
                raise ParseError("duplicate 'poles:' line", lineno, 1)
            poles = parse_poles(value, names, lineno, offset)
        elif key == "point":
            points.append(parse_point(value, len(names), lineno, offset))
        elif key == "expected":
            expected = parse_expected(value, names, lineno, offset)
    if eta is None:
        raise ParseError("missing 'eta:' line", entries[-1][2], 1)
    if poles is None:
        raise ParseError("missing 'poles:' line", entries[-1][2], 1)
    return ProblemFile(tuple(names), eta, tuple(poles), tuple(points), expected)
