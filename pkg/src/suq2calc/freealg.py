"""The graded free algebra on coordinates, derivatives and 1-forms.

Words are tuples of letter names; an :class:`Element` maps words to
:class:`~suq2calc.qfield.QScalar` coefficients.  No relations are applied
here -- normal forms are relative to a rule set (see :mod:`.rewrite`).
"""

from __future__ import annotations

from dataclasses import dataclass

from .qfield import ONE, ZERO, QScalar, qs
from .scalar_text import (ParseError, ScalarParser, TokenStream, format_scalar,
                          is_simple)


@dataclass(frozen=True)
class Generator:
    symbol: str
    charge: int
    form_degree: int
    sector: str
    pretty: str


GENERATORS = {g.symbol: g for g in [
    Generator("x1", 1, 0, "coordinate", "x¹"),
    Generator("x2", 1, 0, "coordinate", "x²"),
    Generator("y1", -1, 0, "coordinate", "y₁"),
    Generator("y2", -1, 0, "coordinate", "y₂"),
    Generator("d1", -1, 0, "derivative", "∂₁"),
    Generator("d2", -1, 0, "derivative", "∂₂"),
    Generator("db1", 1, 0, "derivative", "∂̄¹"),
    Generator("db2", 1, 0, "derivative", "∂̄²"),
    Generator("w0", 0, 1, "form", "ω⁰"),
    Generator("wpp", 2, 1, "form", "ω⁺⁺"),
    Generator("wmm", -2, 1, "form", "ω⁻⁻"),
]}

# letters of the abstract q-Lie algebra (not part of the wire grammar)
VECTOR_FIELDS = {g.symbol: g for g in [
    Generator("Dpp", 2, 0, "vector", "D⁺⁺"),
    Generator("Dmm", -2, 0, "vector", "D⁻⁻"),
    Generator("D0", 0, 0, "vector", "D⁰"),
]}

ALL_LETTERS = {**GENERATORS, **VECTOR_FIELDS}

COORDINATES = ("x1", "x2", "y1", "y2")
DERIVATIVES = ("d1", "d2", "db1", "db2")
FORMS = ("w0", "wpp", "wmm")

# default term order: coordinates < forms < derivatives
LETTER_ORDER = ("x1", "x2", "y1", "y2", "wpp", "wmm", "w0",
                "db1", "db2", "d1", "d2", "Dmm", "D0", "Dpp")
LETTER_RANK = {s: i for i, s in enumerate(LETTER_ORDER)}

MIXED = "mixed"


def word_charge(word):
    return sum(ALL_LETTERS[s].charge for s in word)


def word_degree(word):
    return sum(ALL_LETTERS[s].form_degree for s in word)


def default_key(word):
    return (len(word), tuple(LETTER_RANK[s] for s in word))


class Element:
    """Finite linear combination of words with Q(q) coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        out = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for w, c in items:
                c = qs(c)
                if c.is_zero():
                    continue
                w = tuple(w)
                prev = out.get(w)
                if prev is None:
                    out[w] = c
                else:
                    s = prev + c
                    if s.is_zero():
                        del out[w]
                    else:
                        out[w] = s
        self._terms = out
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        e = cls.__new__(cls)
        e._terms = terms
        e._hash = None
        return e

    @classmethod
    def letter(cls, symbol):
        if symbol not in ALL_LETTERS:
            raise KeyError(f"unknown generator {symbol!r}")
        return cls._raw({(symbol,): ONE})

    @classmethod
    def word(cls, word, coeff=ONE):
        return cls({tuple(word): coeff})

    @classmethod
    def scalar(cls, c):
        return cls({(): c})

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def one(cls):
        return cls._raw({(): ONE})

    # -- container protocol ----------------------------------------------
    def items(self):
        return self._terms.items()

    def words(self):
        return self._terms.keys()

    def coeff(self, word):
        return self._terms.get(tuple(word), ZERO)

    def terms(self, key=default_key):
        """Terms sorted by the term order (ascending)."""
        return sorted(self._terms.items(), key=lambda t: key(t[0]))

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, QScalar)):
            other = Element.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            prev = out.get(w)
            if prev is None:
                out[w] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[w]
                else:
                    out[w] = s
        return Element._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Element._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def scale(self, c):
        c = qs(c)
        if c.is_zero():
            return Element.zero()
        return Element._raw({w: v * c for w, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, QScalar)):
            return self.scale(other)
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, QScalar)):
            return self.scale(other)
        return multiply(_coerce(other), self)

    def map_coefficients(self, fn):
        return Element({w: fn(c) for w, c in self._terms.items()})

    def filter(self, pred):
        return Element._raw({w: c for w, c in self._terms.items() if pred(w)})

    def letters(self):
        return {s for w in self._terms for s in w}

    def __repr__(self):
        return f"Element({format_element(self)})"

    def __str__(self):
        return format_element(self)


def _coerce(x):
    if isinstance(x, Element):
        return x
    return Element.scalar(x)


def multiply(a, b):
    """Concatenation product, bilinear; no relations applied."""
    out = {}
    for wa, ca in a._terms.items():
        for wb, cb in b._terms.items():
            w = wa + wb
            c = ca * cb
            prev = out.get(w)
            if prev is None:
                out[w] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[w]
                else:
                    out[w] = s
    return Element._raw(out)


def product(*factors):
    out = Element.one()
    for f in factors:
        out = multiply(out, _coerce(f))
    return out


def L(symbol):
    return Element.letter(symbol)


def grade(e):
    """Common ``(charge, form_degree)``; either entry may be ``"mixed"``.

    The zero element is reported as charge 0, degree 0.
    """
    charges = {word_charge(w) for w in e.words()}
    degrees = {word_degree(w) for w in e.words()}
    charge = charges.pop() if len(charges) == 1 else (0 if not charges else MIXED)
    degree = degrees.pop() if len(degrees) == 1 else (0 if not degrees else MIXED)
    return {"charge": charge, "form_degree": degree}


def is_homogeneous(e):
    g = grade(e)
    return g["charge"] != MIXED and g["form_degree"] != MIXED


# -- text -------------------------------------------------------------------

def format_word(word):
    return "*".join(word)


def format_element(e, key=default_key):
    if e.is_zero():
        return "0"
    parts = []
    for i, (w, c) in enumerate(e.terms(key)):
        neg = False
        if c.is_monomial() and int(c.num.coeffs()[0]) < 0:
            neg, c = True, -c
        if not w:
            body = format_scalar(c)
            if not c.is_monomial() and i > 0:
                body = f"({body})"
        elif c.is_one():
            body = format_word(w)
        else:
            s = format_scalar(c)
            if not is_simple(c):
                s = f"({s})"
            body = f"{s} * {format_word(w)}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def parse_element(text, letters=None):
    """Parse the expression grammar; ``letters`` defaults to the 11 generators."""
    letters = GENERATORS if letters is None else letters
    stream = TokenStream(text)
    sp = ScalarParser(stream, stop_names=frozenset(letters))
    out = Element.zero()
    sign = ONE
    if stream.accept("-"):
        sign = -ONE
    elif stream.accept("+"):
        pass
    while True:
        out = out + _parse_term(stream, sp, letters).scale(sign)
        if stream.accept("+"):
            sign = ONE
        elif stream.accept("-"):
            sign = -ONE
        else:
            break
    kind, v, pos = stream.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {v!r}", pos)
    return out


def _parse_word(stream, letters):
    word = []
    while True:
        kind, v, pos = stream.next()
        if kind != "name":
            raise ParseError("expected generator", pos)
        if v not in letters:
            raise ParseError(f"unknown symbol {v!r}", pos)
        word.append(v)
        kind, v, _ = stream.peek()
        nkind, nv, _ = stream.peek(1)
        if kind == "op" and v == "*" and nkind == "name" and nv in letters:
            stream.next()
            continue
        return tuple(word)


def _parse_term(stream, sp, letters):
    kind, v, pos = stream.peek()
    if kind == "name" and v in letters:
        return Element.word(_parse_word(stream, letters))
    if kind == "name" and v != "q":
        raise ParseError(f"unknown symbol {v!r}", pos)
    c = sp.product()
    if stream.accept("*"):
        return Element.word(_parse_word(stream, letters), c)
    return Element.scalar(c)
