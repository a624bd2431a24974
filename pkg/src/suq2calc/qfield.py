"""Exact arithmetic in the field Q(q) of rational functions of q.

A :class:`QScalar` is stored as ``q**shift * num / den`` where ``num`` and
``den`` are integer polynomials with nonzero constant term, ``gcd(num, den)
== 1`` and ``den`` has a positive leading coefficient.  That makes equality
structural.  Polynomial gcd and exact division are delegated to FLINT.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from flint import fmpz_poly

_ONE = fmpz_poly([1])
_ZERO = fmpz_poly([])


class QFieldError(ArithmeticError):
    pass


class SingularAtOne(QFieldError):
    """Raised when a scalar has a pole at q = 1."""


def _strip_q(p):
    """Split ``p`` into ``(k, r)`` with ``p == q**k * r`` and ``r(0) != 0``."""
    coeffs = p.coeffs()
    k = 0
    while k < len(coeffs) and coeffs[k] == 0:
        k += 1
    if k == 0:
        return 0, p
    return k, fmpz_poly(coeffs[k:])


def _lead(p):
    return p.coeffs()[-1]


class LaurentPoly:
    """Finite map from integer exponents of q to nonzero integers."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        terms = dict(terms or {})
        self._terms = {int(k): int(v) for k, v in terms.items() if v != 0}

    @classmethod
    def from_poly(cls, p, shift=0):
        return cls({i + shift: int(c) for i, c in enumerate(p.coeffs()) if c != 0})

    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    def min_exp(self):
        return min(self._terms) if self._terms else 0

    def max_exp(self):
        return max(self._terms) if self._terms else 0

    def to_poly(self):
        """Return ``(shift, p)`` with ``self == q**shift * p``."""
        if not self._terms:
            return 0, _ZERO
        lo = self.min_exp()
        coeffs = [0] * (self.max_exp() - lo + 1)
        for k, v in self._terms.items():
            coeffs[k - lo] = v
        return lo, fmpz_poly(coeffs)

    def __add__(self, other):
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    def __neg__(self):
        return LaurentPoly({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for a, x in self._terms.items():
            for b, y in other._terms.items():
                out[a + b] = out.get(a + b, 0) + x * y
        return LaurentPoly(out)

    def __eq__(self, other):
        return isinstance(other, LaurentPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(sorted(self._terms.items())))

    def __repr__(self):
        return f"LaurentPoly({dict(sorted(self._terms.items()))})"


class QScalar:
    """An element of Q(q), immutable and canonical."""

    __slots__ = ("shift", "num", "den", "_key")

    def __init__(self, shift=0, num=_ZERO, den=_ONE, _canonical=False):
        if not _canonical:
            shift, num, den = _canonicalize(shift, num, den)
        self.shift = shift
        self.num = num
        self.den = den
        self._key = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_int(cls, n):
        n = int(n)
        if n == 0:
            return ZERO
        return cls(0, fmpz_poly([n]), _ONE, _canonical=True)

    @classmethod
    def from_fraction(cls, fr):
        fr = Fraction(fr)
        return cls(0, fmpz_poly([fr.numerator]), fmpz_poly([fr.denominator]))

    @classmethod
    def q_power(cls, k):
        return cls(int(k), _ONE, _ONE, _canonical=True)

    @classmethod
    def from_laurent(cls, num, den=None):
        ns, n = num.to_poly()
        if den is None:
            return cls(ns, n, _ONE)
        ds, d = den.to_poly()
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        return cls(ns - ds, n, d)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, QScalar):
            return x
        if isinstance(x, int):
            return cls.from_int(x)
        if isinstance(x, Fraction):
            return cls.from_fraction(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to QScalar")

    # -- structure --------------------------------------------------------
    @property
    def numerator(self):
        return LaurentPoly.from_poly(self.num, self.shift)

    @property
    def denominator(self):
        return LaurentPoly.from_poly(self.den)

    def is_zero(self):
        return self.num == 0

    def is_one(self):
        return self.shift == 0 and self.den == _ONE and self.num == _ONE

    def is_laurent(self):
        return self.den == _ONE

    def is_monomial(self):
        """True for ``c * q**k`` with integer c."""
        return self.den == _ONE and self.num.degree() == 0

    def key(self):
        if self._key is None:
            self._key = (self.shift, tuple(int(c) for c in self.num.coeffs()),
                         tuple(int(c) for c in self.den.coeffs()))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, QScalar):
            try:
                other = QScalar.coerce(other)
            except TypeError:
                return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = QScalar.coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        a, b = (self, other) if self.shift <= other.shift else (other, self)
        gap = b.shift - a.shift
        bnum = b.num if gap == 0 else fmpz_poly([0] * gap + [int(c) for c in b.num.coeffs()])
        if a.den == b.den:
            return QScalar(a.shift, a.num + bnum, a.den)
        return QScalar(a.shift, a.num * b.den + bnum * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return QScalar(self.shift, -self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-QScalar.coerce(other))

    def __rsub__(self, other):
        return QScalar.coerce(other) - self

    def __mul__(self, other):
        other = QScalar.coerce(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        shift = self.shift + other.shift
        if self.den == _ONE and other.den == _ONE:
            return QScalar(shift, self.num * other.num, _ONE, _canonical=True)
        n1, d2 = _cancel(self.num, other.den)
        n2, d1 = _cancel(other.num, self.den)
        num, den = n1 * n2, d1 * d2
        if _lead(den) < 0:
            num, den = -num, -den
        return QScalar(shift, num, den, _canonical=True)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero in Q(q)")
        num, den = self.den, self.num
        if _lead(den) < 0:
            num, den = -num, -den
        return QScalar(-self.shift, num, den, _canonical=True)

    def __truediv__(self, other):
        return self * QScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QScalar.coerce(other) * self.inverse()

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- evaluation -------------------------------------------------------
    def evaluate(self, value):
        """Evaluate at a rational ``q``; raises ZeroDivisionError at poles."""
        value = Fraction(value)
        num = sum(Fraction(int(c)) * value**i for i, c in enumerate(self.num.coeffs()))
        den = sum(Fraction(int(c)) * value**i for i, c in enumerate(self.den.coeffs()))
        if den == 0 or (value == 0 and self.shift < 0):
            raise ZeroDivisionError(f"pole at q={value}")
        return num / den * value**self.shift

    def classical_limit(self):
        """Value at q = 1; raises :class:`SingularAtOne` on a pole."""
        num, den = self.num, self.den
        lin = fmpz_poly([-1, 1])
        # canonical form already coprime, so q-1 cannot divide both; the
        # loop is kept for non-canonical callers of the same logic
        while num(1) == 0 and den(1) == 0 and num != 0:
            num, den = num // lin, den // lin
        if den(1) == 0:
            raise SingularAtOne(f"{self} is singular at q=1")
        return Fraction(int(num(1)), int(den(1)))

    def __repr__(self):
        from .scalar_text import format_scalar
        return f"QScalar({format_scalar(self)})"

    def __str__(self):
        from .scalar_text import format_scalar
        return format_scalar(self)


def _cancel(num, den):
    if den == _ONE or num.degree() == 0 and den.degree() == 0 and abs(int(num.coeffs()[0])) == 1:
        return num, den
    g = num.gcd(den)
    if g == _ONE or g == -_ONE:
        return num, den
    return num // g, den // g


def _canonicalize(shift, num, den):
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if num == 0:
        return 0, _ZERO, _ONE
    k, num = _strip_q(num)
    j, den = _strip_q(den)
    shift = shift + k - j
    if den != _ONE:
        g = num.gcd(den)
        if g.degree() > 0 or int(g.coeffs()[0]) not in (1, -1):
            num, den = num // g, den // g
    if _lead(den) < 0:
        num, den = -num, -den
    return shift, num, den


ZERO = QScalar(0, _ZERO, _ONE, _canonical=True)
ONE = QScalar(0, _ONE, _ONE, _canonical=True)
Q = QScalar.q_power(1)


def qs(x):
    """Shorthand coercion used throughout the package."""
    return QScalar.coerce(x)


def qpow(k):
    return QScalar.q_power(k)


@lru_cache(maxsize=None)
def q_number(n):
    """The q-number ``(1 - q^{-2n}) / (1 - q^{-2})``.

    Computed from the defining quotient for every integer n (no lookup
    table), so negative n yields e.g. ``{-2} = -q^2 - q^4``.
    """
    n = int(n)
    return (ONE - qpow(-2 * n)) / (ONE - qpow(-2))


def classical_limit(a):
    return qs(a).classical_limit()


def arith(a, b, op):
    """Field operation by name: ``add``, ``sub``, ``mul`` or ``div``."""
    a, b = qs(a), qs(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("division by zero in Q(q)")
        return a / b
    raise ValueError(f"unknown operation {op!r}")
