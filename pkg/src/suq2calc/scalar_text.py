"""Text rendering and parsing for scalars and algebra expressions.

Scalar grammar::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' ['-'] INT)?
    atom    := INT | 'q' | '{' ['-'] INT '}' | '(' sum ')'

``{n}`` denotes the q-number of n.  Whitespace is ignored.
"""

from __future__ import annotations

import re

from .qfield import ONE, QScalar, q_number, qpow, qs


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^(){}":
                raise ParseError(f"unexpected character {ch!r}", start)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class TokenStream:
    def __init__(self, text):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, value):
        kind, v, _ = self.peek()
        if kind in ("op", "name") and v == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        kind, v, pos = self.peek()
        if not self.accept(value):
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)

    def error(self, message):
        raise ParseError(message, self.peek()[2])


class ScalarParser:
    """Recursive-descent parser; ``stop_names`` end a product (e.g. generators)."""

    def __init__(self, stream, stop_names=frozenset()):
        self.s = stream
        self.stop_names = stop_names

    def sum(self):
        value = self.product()
        while True:
            if self.s.accept("+"):
                value = value + self.product()
            elif self.s.accept("-"):
                value = value - self.product()
            else:
                return value

    def product(self):
        value = self.unary()
        while True:
            kind, v, _ = self.s.peek()
            if kind == "op" and v == "*":
                nkind, nv, _ = self.s.peek(1)
                if nkind == "name" and nv in self.stop_names:
                    return value
                self.s.next()
                value = value * self.unary()
            elif kind == "op" and v == "/":
                self.s.next()
                divisor = self.unary()
                if divisor.is_zero():
                    self.s.error("division by zero")
                value = value / divisor
            else:
                return value

    def unary(self):
        if self.s.accept("-"):
            return -self.unary()
        return self.power()

    def signed_int(self):
        neg = self.s.accept("-")
        kind, v, pos = self.s.next()
        if kind != "int":
            raise ParseError("expected integer", pos)
        return -int(v) if neg else int(v)

    def power(self):
        base = self.atom()
        if self.s.accept("^"):
            k = self.signed_int()
            if base.is_zero() and k < 0:
                self.s.error("division by zero")
            base = base ** k
        return base

    def atom(self):
        kind, v, pos = self.s.peek()
        if kind == "int":
            self.s.next()
            return QScalar.from_int(int(v))
        if kind == "name" and v == "q":
            self.s.next()
            return qpow(1)
        if kind == "op" and v == "{":
            self.s.next()
            n = self.signed_int()
            self.s.expect("}")
            return q_number(n)
        if kind == "op" and v == "(":
            self.s.next()
            value = self.sum()
            self.s.expect(")")
            return value
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {v!r}", pos)


def parse_scalar(text):
    stream = TokenStream(text)
    value = ScalarParser(stream).sum()
    kind, v, pos = stream.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {v!r}", pos)
    return value


# -- formatting -------------------------------------------------------------

def _format_monomial(c, k):
    """``c * q^k`` with c a nonzero int."""
    if k == 0:
        return str(c)
    qk = "q" if k == 1 else f"q^{k}"
    if c == 1:
        return qk
    if c == -1:
        return "-" + qk
    return f"{c}*{qk}"


def format_laurent(terms):
    """Ascending exponents, e.g. ``1 + q^2 - 3*q^4``."""
    if not terms:
        return "0"
    parts = []
    for i, k in enumerate(sorted(terms)):
        c = terms[k]
        if i == 0:
            parts.append(_format_monomial(c, k))
        elif c < 0:
            parts.append(" - " + _format_monomial(-c, k))
        else:
            parts.append(" + " + _format_monomial(c, k))
    return "".join(parts)


def format_scalar(a):
    a = qs(a)
    num = format_laurent(a.numerator.terms)
    if a.is_laurent():
        return num
    den_terms = a.denominator.terms
    den = format_laurent(den_terms)
    if len(a.numerator.terms) > 1:
        num = f"({num})"
    if len(den_terms) > 1 or den.startswith("-") or "*" in den:
        den = f"({den})"
    return f"{num}/{den}"


def is_simple(a):
    """True if the rendering needs no parentheses before ``*``."""
    return qs(a).is_monomial()


__all__ = ["ParseError", "parse_scalar", "format_scalar", "format_laurent", "ONE"]
