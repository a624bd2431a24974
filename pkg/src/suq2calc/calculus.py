"""Left-invariant vector fields on SU_q(2) and checks of their algebra."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .freealg import DERIVATIVES, Element, L, word_charge
from .qfield import ONE, ZERO, q_number, qpow, qs
from .report import Report, timed
from .rewrite import RewriteRule, RuleSet, TermOrder

_DERIV = frozenset(DERIVATIVES)
OPERATOR_NAMES = ("Dpp", "Dmm", "D0", "mu", "nu")


def _sum(it):
    out = Element.zero()
    for e in it:
        out = out + e
    return out


class Operators:
    """The differential operators of one calculus, expanded in letters."""

    def __init__(self, calc):
        self.calc = calc
        ix = calc.ix
        q2 = qpow(2)
        r = range(2)
        self.table = {
            "Dpp": _sum(ix.x_low[i] * ix.db_up[i] for i in r),
            "Dmm": -_sum(ix.y_low[i] * ix.d_up[i] for i in r),
            "D0": (-_sum(ix.x_low[i] * ix.d_up[i] for i in r)
                   - _sum(ix.y_low[i] * ix.db_up[i] for i in r).scale(q2)
                   + _sum(ix.x_low[i] * ix.y_low[k] * ix.db_up[k] * ix.d_up[i]
                          for i in r for k in r).scale(ONE - q2)),
            "mu": Element.one() + _sum(ix.y_low[i] * ix.db_up[i] for i in r).scale(q2 - ONE),
            "nu": Element.one() + _sum(ix.x_low[i] * ix.d_up[i] for i in r).scale(ONE - qpow(-2)),
        }
        self.charges = {"Dpp": 2, "Dmm": -2, "D0": 0, "mu": 0, "nu": 0}
        self._cache = {}

    def op(self, name):
        return self.table[name]

    def apply(self, op, f, reduce=True):
        """Act with ``op`` (name or Element) on the coordinate function ``f``."""
        if isinstance(op, str):
            key = (op, f, reduce)
            hit = self._cache.get(key)
            if hit is not None:
                return hit
            out = self.apply(self.table[op], f, reduce)
            self._cache[key] = out
            return out
        e = self.calc.full.normalize(op * f)
        e = e.filter(lambda w: not any(s in _DERIV for s in w))
        return self.calc.ideal.reduce(e) if reduce else e

    def chain(self, names, f, reduce=True):
        """Apply ``names[-1]`` first, then the others leftwards.

        With ``reduce=False`` intermediate results stay in the coordinate
        algebra without the unimodularity constraint and only the final
        result is reduced.
        """
        for name in reversed(names):
            f = self.apply(name, f, reduce=reduce)
        return f if reduce else self.calc.ideal.reduce(f)

    def reduce(self, e):
        return self.calc.ideal.reduce(self.calc.full.normalize(e))


def monomial_charge(word):
    return word_charge(word)


def _monomials(max_degree, min_degree=1):
    from .conventions import coordinate_monomials
    return [Element.word(w) for w in coordinate_monomials(max_degree, min_degree)]


def _charge(e):
    (w, _), = [next(iter(e.items()))]
    return word_charge(w)


def _new_report(suite, calc):
    return Report(suite, calc.fingerprint)


# -- action table, eigenvalues, Leibnitz ----------------------------------------------

def check_action_table(calc):
    """The displayed action of D^{++}, D^{--} on x^i and y_i."""
    ops = Operators(calc)
    ix = calc.ix
    rep = _new_report("action-table", calc)
    with timed(rep):
        for i in range(2):
            for name, f, target, label in (
                    ("Dpp", ix.x_up[i], Element.zero(), f"D++x^{i + 1}=0"),
                    ("Dmm", ix.x_up[i], ix.y_up[i], f"D--x^{i + 1}=y^{i + 1}"),
                    ("Dpp", ix.y_low[i], ix.x_low[i], f"D++y_{i + 1}=x_{i + 1}"),
                    ("Dmm", ix.y_low[i], Element.zero(), f"D--y_{i + 1}=0")):
                got = ops.apply(name, f)
                want = calc.ideal.reduce(target)
                rep.add(label, got == want, None if got == want else got - want, got)
    return rep


def check_eigen_D0(calc, max_degree=4):
    """D^0 m = {n}_q m modulo the ideal, for every basis monomial m."""
    if max_degree < 1:
        raise ValueError("max_degree must be at least 1")
    ops = Operators(calc)
    rep = _new_report("eigen", calc)
    with timed(rep):
        for m in _monomials(max_degree):
            n = _charge(m)
            resid = ops.apply("D0", m) - calc.ideal.reduce(m).scale(q_number(n))
            rep.add(f"D0 {m} = {{{n}}} {m}", resid.is_zero(),
                    None if resid.is_zero() else resid, q_number(n))
    return rep


def check_leibnitz(calc, max_degree=4):
    """Both twisted Leibnitz rules on all monomial pairs of total degree <= max_degree."""
    ops = Operators(calc)
    rep = _new_report("leibnitz", calc)
    mons = {d: _monomials(d, d) for d in range(1, max_degree)}
    with timed(rep):
        for da in range(1, max_degree):
            for db in range(1, max_degree - da + 1):
                for f in mons[da]:
                    m = _charge(f)
                    for g in mons[db]:
                        fg = f * g
                        for name, twist in (("Dpp", qpow(-m)), ("Dmm", qpow(-m)),
                                            ("D0", qpow(-2 * m))):
                            lhs = ops.apply(name, fg)
                            rhs = ops.reduce(ops.apply(name, f) * g
                                             + (f * ops.apply(name, g)).scale(twist))
                            resid = lhs - rhs
                            rep.add(f"{name}({f} . {g})", resid.is_zero(),
                                    None if resid.is_zero() else resid)
    return rep


# -- q-Lie algebra ----------------------------------------------------------------------

def bracket(a, b, s=0):
    """``[a, b]_{q^s} = a b - q^s b a`` in the free algebra."""
    return a * b - (b * a).scale(qpow(s))


LIE_RELATIONS = (
    # (A, B, bracket exponent, coefficient, result)
    ("D0", "Dpp", -4, q_number(2), "Dpp"),
    ("D0", "Dmm", 4, q_number(-2), "Dmm"),
    ("Dpp", "Dmm", 2, ONE, "D0"),
)

VECTOR_ORDER = TermOrder(("Dmm", "D0", "Dpp"))


def abstract_lie_rules():
    """The three bracket relations oriented by ``Dmm < D0 < Dpp``."""
    rules = []
    for a, b, s, c, res in LIE_RELATIONS:
        rel = bracket(L(a), L(b), s) - L(res).scale(c)
        lead = max((w for w, _ in rel.items()), key=VECTOR_ORDER.key)
        lc = rel.coeff(lead)
        rhs = (Element.word(lead, lc) - rel).scale(lc.inverse())
        rules.append(RewriteRule(lead, rhs, "vector", f"lie:{a}*{b}"))
    return RuleSet(rules, VECTOR_ORDER)


def jacobi_combination(outer=-2):
    """The displayed q-Jacobi combination; ``outer`` is the outer exponent of its middle term.

    As displayed ``outer = -2``; the combination then reduces to
    ``(1 + q^-2)(q^2 - q^-2) D^{--}D^{++}``.  With ``outer = 2`` it vanishes.
    """
    Dpp, Dmm, D0 = L("Dpp"), L("Dmm"), L("D0")
    return (bracket(D0, bracket(Dpp, Dmm, 2))
            + bracket(Dpp, bracket(Dmm, D0, -4), outer)
            + bracket(Dmm, bracket(D0, Dpp, -4), -2).scale(qpow(2)))


def evaluate_vector_word(ops, word_elem, f):
    """Evaluate an Element in the D-letters on the function ``f``."""
    out = Element.zero()
    for w, c in word_elem.items():
        out = out + ops.chain(list(w), f).scale(c)
    return out


def check_qlie_and_jacobi(calc, mode="representation", max_degree=4, samples=20, seed=0):
    if mode not in ("representation", "abstract"):
        raise ValueError(f"unknown mode {mode!r}")
    rep = _new_report("lie" if mode == "representation" else "jacobi", calc)
    with timed(rep):
        rules = abstract_lie_rules()
        if mode == "abstract":
            j = rules.normalize(jacobi_combination())
            rep.add("q-Jacobi identity (displayed exponents)", j.is_zero(),
                    None if j.is_zero() else j)
            jc = rules.normalize(jacobi_combination(outer=2))
            rep.add("q-Jacobi identity (middle outer exponent q^2)", jc.is_zero(),
                    None if jc.is_zero() else jc)
            ops = Operators(calc)
            for m in _monomials(2):
                r = evaluate_vector_word(ops, jacobi_combination(), m)
                if not r.is_zero():
                    rep.note("displayed Jacobi combination on functions",
                             witness=f"f={m}: {r}")
                    break
            rng = random.Random(seed)
            tests = _monomials(2)
            for k in range(samples):
                n = rng.randint(1, 3)
                w = tuple(rng.choice(("Dpp", "Dmm", "D0")) for _ in range(n))
                f = rng.choice(tests)
                direct = ops.chain(list(w), f)
                via = evaluate_vector_word(ops, rules.normalize(Element.word(w)), f)
                ok = direct == via
                rep.add(f"abstract vs representation {'*'.join(w)} on {f}", ok,
                        None if ok else direct - via)
        else:
            ops = Operators(calc)
            for m in _monomials(max_degree):
                for a, b, s, c, res in LIE_RELATIONS:
                    lhs = (ops.chain([a, b], m) - ops.chain([b, a], m).scale(qpow(s))
                           - ops.apply(res, m).scale(c))
                    rep.add(f"[{a},{b}]_q^{s} = {c} {res} on {m}", lhs.is_zero(),
                            None if lhs.is_zero() else lhs)
    return rep


# -- mu, nu and the charge-diagonal operators -------------------------------------------

MU_NU_RELATIONS = (
    # operator, vector field, exponent k in  op D = q^k D op
    ("mu", "Dmm", 2), ("mu", "Dpp", -2), ("mu", "D0", 0),
    ("nu", "Dmm", 2), ("nu", "Dpp", -2), ("nu", "D0", 0),
)


def munu_exponent_law(calc, max_degree=2):
    """Return ``s`` with ``(mu nu) f^(n) = q^(s n) f^(n)``, or None if inconsistent."""
    ops = Operators(calc)
    seen = set()
    for m in _monomials(max_degree):
        n = _charge(m)
        got = ops.chain(["mu", "nu"], m, reduce=False)
        base = calc.ideal.reduce(m)
        hits = [s for s in (-2, 2) if got == base.scale(qpow(s * n))]
        if not hits:
            return None
        if n:
            seen.add(hits[0])
    return seen.pop() if len(seen) == 1 else None


def check_mu_nu(calc, max_degree=4):
    ops = Operators(calc)
    rep = _new_report("munu", calc)
    with timed(rep):
        mons = _monomials(max_degree)
        for a, d, k in MU_NU_RELATIONS:
            bad = None
            for m in mons:
                r = (ops.chain([a, d], m, reduce=False)
                     - ops.chain([d, a], m, reduce=False).scale(qpow(k)))
                if not r.is_zero():
                    bad = f"f={m}: {r}"
                    break
            rep.add(f"{a} {d} = q^{k} {d} {a}", bad is None, bad)
        bad = None
        for m in mons:
            r = ops.chain(["mu", "nu"], m, reduce=False) - ops.chain(["nu", "mu"], m, reduce=False)
            if not r.is_zero():
                bad = f"f={m}: {r}"
                break
        rep.add("mu nu = nu mu", bad is None, bad)
        law = {}
        for m in mons:
            n = _charge(m)
            got = ops.chain(["mu", "nu"], m, reduce=False)
            base = calc.ideal.reduce(m)
            hits = [s for s in (-2, 2) if got == base.scale(qpow(s * n))]
            if n == 0:
                rep.add(f"mu nu {m} = {m}", bool(hits), None if hits else got)
                continue
            if not hits:
                rep.add("mu nu charge-diagonal", False, f"f={m}: {got}")
                continue
            law.setdefault(hits[0], m)
        consistent = len(law) == 1
        rep.add("mu nu single exponent law", consistent,
                None if consistent else f"exponents {sorted(law)}")
        if consistent:
            s = next(iter(law))
            rep.data["munu_exponent"] = s
            rep.note("mu nu exponent law", value=f"mu nu f^(n) = q^({s}n) f^(n)")
    return rep


class ChargeDiagonalOp:
    """An operator acting on charge-n functions by a Laurent polynomial in ``Z = q^n``.

    Stored as ``{power of Z: QScalar}``.
    """

    def __init__(self, terms=None):
        self.terms = {k: qs(v) for k, v in (terms or {}).items() if not qs(v).is_zero()}

    @classmethod
    def z_power(cls, k, c=ONE):
        return cls({k: c})

    @classmethod
    def constant(cls, c):
        return cls({0: c})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return ChargeDiagonalOp(out)

    def __neg__(self):
        return ChargeDiagonalOp({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, ChargeDiagonalOp):
            return ChargeDiagonalOp({k: v * qs(other) for k, v in self.terms.items()})
        out = {}
        for (a, u), (b, v) in itertools.product(self.terms.items(), other.terms.items()):
            out[a + b] = out.get(a + b, ZERO) + u * v
        return ChargeDiagonalOp(out)

    __rmul__ = __mul__

    def shift(self, dn):
        """The operator ``F(q^dn Z)``: moving F rightward past a charge-``dn`` field."""
        return ChargeDiagonalOp({k: v * qpow(k * dn) for k, v in self.terms.items()})

    def eigenvalue(self, n):
        return sum((v * qpow(k * n) for k, v in self.terms.items()), ZERO)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, ChargeDiagonalOp) and self.terms == other.terms

    def __repr__(self):
        return " + ".join(f"({v})*Z^{k}" for k, v in sorted(self.terms.items())) or "0"


Z = ChargeDiagonalOp.z_power(1)
VF_CHARGE = {"Dpp": 2, "Dmm": -2, "D0": 0}


def d0_eigen_op():
    """{n}_q as a Laurent polynomial in Z: q Z^{-1} (Z - Z^{-1}) / (q - q^{-1})."""
    c = qpow(1) / (qpow(1) - qpow(-1))
    return ChargeDiagonalOp({0: c, -2: -c})


class OpPolynomial:
    """Sums of ``ChargeDiagonalOp * (word in D letters)`` with Z-parts kept leftmost."""

    def __init__(self, terms=None):
        self.terms = {}
        for w, op in (terms or {}).items():
            self._add(w, op)

    def _add(self, w, op):
        cur = self.terms.get(w)
        new = op if cur is None else cur + op
        if new.is_zero():
            self.terms.pop(w, None)
        else:
            self.terms[w] = new

    @classmethod
    def field(cls, name):
        return cls({(name,): ChargeDiagonalOp.constant(ONE)})

    @classmethod
    def diag(cls, op):
        return cls({(): op})

    def __add__(self, other):
        out = OpPolynomial(self.terms)
        for w, op in other.terms.items():
            out._add(w, op)
        return out

    def __neg__(self):
        return OpPolynomial({w: -op for w, op in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return OpPolynomial({w: op * c for w, op in self.terms.items()})

    def __mul__(self, other):
        out = OpPolynomial()
        for (w1, a), (w2, b) in itertools.product(self.terms.items(), other.terms.items()):
            # move b leftwards past the fields of w1
            dn = sum(VF_CHARGE[s] for s in w1)
            out._add(w1 + w2, a * b.shift(-dn))
        return out

    def reduce(self, rules):
        """Reduce D-words with the bracket rules, then replace every D0 by its eigenvalue."""
        out = OpPolynomial()
        for w, op in self.terms.items():
            e = rules.normalize(Element.word(w))
            for ww, c in e.items():
                out._add(ww, op * c)
        final = OpPolynomial()
        for w, op in out.terms.items():
            kept = ()
            for j, s in enumerate(w):
                if s == "D0":
                    # on functions D0 acts diagonally; charge offset from the output
                    dn = sum(VF_CHARGE[t] for t in w[:j])
                    op = op * d0_eigen_op().shift(-dn)
                else:
                    kept += (s,)
            final._add(kept, op)
        return final

    def is_zero(self):
        return not self.terms


@dataclass
class DeltaFamily:
    p: int
    s: int = 1
    alpha: int = field(init=False)
    beta: int = field(init=False)

    def __post_init__(self):
        if self.p % 2 == 0:
            raise ValueError("p must be odd so that alpha and beta are integers")
        self.alpha = self.beta = (1 - self.p) // 2

    def dpp(self):
        return OpPolynomial.diag(ChargeDiagonalOp.z_power(self.alpha)) * OpPolynomial.field("Dpp")

    def dmm(self):
        return OpPolynomial.diag(ChargeDiagonalOp.z_power(self.beta)) * OpPolynomial.field("Dmm")

    def d0_op(self):
        c = ONE / (ONE - qpow(2 * self.s))
        return ChargeDiagonalOp({0: c, self.s: -c})

    def d0(self):
        return OpPolynomial.diag(self.d0_op())

    def first_relation(self):
        """LHS minus RHS of the quadratic Delta^{++} Delta^{--} relation."""
        p = self.p
        lhs = self.dpp() * self.dmm() - (self.dmm() * self.dpp()).scale(qpow(2 * p))
        c = qpow(p) / (qpow(1) - qpow(-1))
        rhs = ChargeDiagonalOp({1 - p: c, -1 - p: -c})
        return lhs - OpPolynomial.diag(rhs)

    def second_relation(self):
        return (self.d0() * self.dpp() - (self.dpp() * self.d0()).scale(qpow(2 * self.s))
                - self.dpp())


def _representative(n):
    if n > 0:
        return Element.word(("x1",) * n)
    if n < 0:
        return Element.word(("y1",) * (-n))
    return Element.word(("x1", "y1"))


def _apply_oppoly(ops, poly, f):
    n = _charge(f)
    out = Element.zero()
    for w, op in poly.terms.items():
        g = ops.chain(list(w), f)
        out = out + g.scale(op.eigenvalue(n + sum(VF_CHARGE[s] for s in w)))
    return out


def check_delta_family(calc, p_values=(-1, 1, 3), s=1, charge_range=5, representation=True):
    rep = _new_report("delta", calc)
    rules = abstract_lie_rules()
    ops = Operators(calc) if representation else None
    with timed(rep):
        for p in p_values:
            fam = DeltaFamily(p, s)
            rep.note(f"p={p} exponents", value=f"alpha=beta={fam.alpha}")
            for name, rel in (("quadratic", fam.first_relation()),
                              ("D0 bracket", fam.second_relation())):
                red = rel.reduce(rules)
                for n in range(-charge_range, charge_range + 1):
                    bad = [(w, op.eigenvalue(n)) for w, op in red.terms.items()
                           if not op.eigenvalue(n).is_zero()]
                    rep.add(f"p={p} s={s} {name} on f^({n})", not bad,
                            None if not bad else str(bad))
                if representation:
                    for n in range(-charge_range, charge_range + 1):
                        f = _representative(n)
                        r = _apply_oppoly(ops, rel, f)
                        rep.add(f"p={p} s={s} {name} applied to {f}", r.is_zero(),
                                None if r.is_zero() else r)
    return rep


def check_ideal_stability(calc, max_degree=3):
    ops = Operators(calc)
    rep = _new_report("ideal", calc)
    with timed(rep):
        g = calc.ix.det - Element.one()
        for m in [Element.one()] + _monomials(max_degree):
            for name in ("Dpp", "Dmm", "D0"):
                r = ops.apply(name, calc.full.normalize(g * m))
                rep.add(f"{name}((det-1) {m}) ~ 0", r.is_zero(), None if r.is_zero() else r)
    return rep


def dj_d0(calc, charge_range=5):
    """Eigenvalues of (1/q) mu nu D^0, reported beside the symmetric q-integer."""
    rep = _new_report("dj-d0", calc)
    with timed(rep):
        s = munu_exponent_law(calc)
        rep.add("mu nu exponent law established", s is not None, value=s)
        if s is None:
            return rep
        q, qi = qpow(1), qpow(-1)
        for n in range(-charge_range, charge_range + 1):
            ev = qi * qpow(s * n) * q_number(n)
            sym = (qpow(n) - qpow(-n)) / (q - qi)
            rep.note(f"DJ D0 eigenvalue n={n}", value=ev,
                     witness=f"symmetric q-integer {sym}; equal={ev == sym}")
            rep.data.setdefault("eigenvalues", {})[n] = str(ev)
        lim = (qi * qpow(s * 3) * q_number(3)).classical_limit()
        rep.add("DJ D0 eigenvalue classical limit n=3", lim == 3, value=lim)
    return rep


# -- braiding data ----------------------------------------------------------------------

VF_BASIS = ("Dpp", "Dmm", "D0")


class BBracketData:
    """Braiding B and structure constants C on the basis (D^{++}, D^{--}, D^0)."""

    def __init__(self):
        q = qpow
        base = {("D0", "Dpp"): q(-4), ("D0", "Dmm"): q(4), ("Dpp", "Dmm"): q(2)}
        self.swap = {}
        for (a, b), c in base.items():
            self.swap[a, b] = c
            self.swap[b, a] = c.inverse()
        for a in VF_BASIS:
            self.swap[a, a] = ONE
        consts = {("Dpp", "Dmm"): {"D0": ONE},
                  ("D0", "Dpp"): {"Dpp": q_number(2)},
                  ("D0", "Dmm"): {"Dmm": q_number(-2)}}
        self.C = {}
        for (a, b), img in consts.items():
            self.C[a, b] = dict(img)
            self.C[b, a] = {k: -self.swap[b, a] * v for k, v in img.items()}
        for a in VF_BASIS:
            self.C[a, a] = {}

    def B(self, a, b):
        """B(D^a D^b) as ``{(c, d): coefficient}``."""
        return {(b, a): self.swap[a, b]}

    def B_squared_is_identity(self):
        for a, b in itertools.product(VF_BASIS, repeat=2):
            out = {}
            for (c, d), u in self.B(a, b).items():
                for (e, f), v in self.B(c, d).items():
                    out[e, f] = out.get((e, f), ZERO) + u * v
            out = {k: v for k, v in out.items() if not v.is_zero()}
            if out != {(a, b): ONE}:
                return False
        return True

    def structure(self, a, b, c):
        return self.C[a, b].get(c, ZERO)


def check_b_bracket(calc):
    rep = _new_report("b-bracket", calc)
    bd = BBracketData()
    with timed(rep):
        rep.add("B^2 = identity", bd.B_squared_is_identity())
        ops = Operators(calc)
        for a, b in itertools.product(VF_BASIS, repeat=2):
            bad = None
            for m in _monomials(2):
                lhs = ops.chain([a, b], m)
                for (c, d), u in bd.B(a, b).items():
                    lhs = lhs - ops.chain([c, d], m).scale(u)
                for c in VF_BASIS:
                    k = bd.structure(a, b, c)
                    if not k.is_zero():
                        lhs = lhs - ops.apply(c, m).scale(k)
                if not lhs.is_zero():
                    bad = f"f={m}: {lhs}"
                    break
            rep.add(f"[{a},{b}]_B = C^({a}{b}c) D^c", bad is None, bad)
    return rep
