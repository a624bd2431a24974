"""R-matrix data, index conventions and the convention solver.

Tensors on V (x) V are 4x4 nested lists indexed ``[2*i + j][2*k + l]`` for
the component ``A^{ij}_{kl}`` (indices 0-based here, 1-based in names).
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field, replace

from .freealg import COORDINATES, DERIVATIVES, Element, L, multiply
from .linalg import (mat_identity, mat_inverse, mat_mul, mat_scale, mat_sub,
                     rank_of)
from .qfield import ONE, ZERO, q_number, qpow, qs
from .report import Report, timed
from .rewrite import (DEFAULT_ORDER, IdealReducer, OrientationError, RewriteRule,
                      RuleSet, confluence_fuzz, relations_to_rules)

Q = qpow(1)
QI = qpow(-1)

R_VARIANTS = ("standard", "scaled")
Y_SCALES = (-2, -1, 0, 1, 2)
Y_CHOICES = tuple(("" if k == 0 else ("q*" if k == 1 else f"q^{k}*")) + base
                  for base in ("Rhat", "Rhat_inv") for k in Y_SCALES)
EPS_CHOICES = ("inverse", "transpose")
GAMMA_CHOICES = ("delta", "metric")


def idx(i, j):
    return 2 * i + j


def standard_r():
    """FRT R-matrix of GL_q(2): diag (q, 1, 1, q), R^{21}_{12} = q - q^{-1}."""
    r = [[ZERO] * 4 for _ in range(4)]
    r[idx(0, 0)][idx(0, 0)] = Q
    r[idx(1, 1)][idx(1, 1)] = Q
    r[idx(0, 1)][idx(0, 1)] = ONE
    r[idx(1, 0)][idx(1, 0)] = ONE
    r[idx(1, 0)][idx(0, 1)] = Q - QI
    return r


def swap_slots(a):
    """A_21: ``(A_21)^{ij}_{kl} = A^{ji}_{lk}``."""
    out = [[ZERO] * 4 for _ in range(4)]
    for i, j, k, l in itertools.product(range(2), repeat=4):
        out[idx(i, j)][idx(k, l)] = a[idx(j, i)][idx(l, k)]
    return out


def permute_upper(a):
    """P A: ``(PA)^{ij}_{kl} = A^{ji}_{kl}``."""
    out = [[ZERO] * 4 for _ in range(4)]
    for i, j, k, l in itertools.product(range(2), repeat=4):
        out[idx(i, j)][idx(k, l)] = a[idx(j, i)][idx(k, l)]
    return out


EPS_LOWER = [[ZERO, ONE], [-QI, ZERO]]


@dataclass(frozen=True)
class Convention:
    r_variant: str = "standard"
    y_choice: str = "Rhat"
    eps_upper: str = "inverse"
    gamma: str = "delta"
    trace_weights: tuple | None = None

    def describe(self):
        tw = "unsolved" if self.trace_weights is None else \
            f"({self.trace_weights[0]}, {self.trace_weights[1]})"
        return (f"R={self.r_variant}; Y={self.y_choice}; eps^ij={self.eps_upper}; "
                f"gamma={self.gamma}; tr_q=({tw})")

    @property
    def fingerprint(self):
        base = f"{self.r_variant}|{self.y_choice}|{self.eps_upper}|{self.gamma}"
        h = hashlib.sha256(self.describe().encode()).hexdigest()[:10]
        return f"{base}#{h}"

    @property
    def grid_key(self):
        return (self.r_variant, self.y_choice, self.eps_upper, self.gamma)


class RMatrixData:
    """All numerical tensors implied by a :class:`Convention`."""

    def __init__(self, conv):
        self.convention = conv
        r = standard_r()
        if conv.r_variant == "scaled":
            r = mat_scale(r, QI)
        self.R = r
        self.R21 = swap_slots(r)
        self.R_inv = mat_inverse(r)
        self.Rhat = permute_upper(r)
        self.Rhat_inv = mat_inverse(self.Rhat)
        self.Y = self._y(conv.y_choice)
        self.epsilon_lower = EPS_LOWER
        inv = mat_inverse(EPS_LOWER)
        self.epsilon_upper = inv if conv.eps_upper == "inverse" else [list(r_) for r_ in zip(*inv)]
        self.E = mat_identity(4)
        self.cal_E = [[self.epsilon_upper[i][j] * EPS_LOWER[k][l]
                       for k in range(2) for l in range(2)]
                      for i in range(2) for j in range(2)]
        ones = [[ONE if i == k else ZERO for k in range(2)] for i in range(2)]
        if conv.gamma == "delta":
            self.gamma = ones
        else:
            # gamma_i^k = -eps_{ij} eps^{kj}; reduces to delta at q = 1
            self.gamma = [[-sum((EPS_LOWER[i][j] * self.epsilon_upper[k][j] for j in range(2)), ZERO)
                           for k in range(2)] for i in range(2)]
        self.gamma_inv = mat_inverse(self.gamma)
        self.Y_eff = self._y_eff()

    def _y_eff(self):
        """Coefficients ``Y^{nk}_{mi}`` as used in the d x relation, stored ``[n][k][m][i]``.

        ``Y^{nk}_{mi}`` is read as the R-hat type tensor with index pairs
        swapped, ``Y^{kn}_{im}``; the derivatives ``d_i = gamma_i^a d'_a``
        are rescaled copies of the ones obeying the gamma = delta relation,
        so Y is conjugated by gamma accordingly.
        """
        g, gi, y = self.gamma, self.gamma_inv, self.Y
        out = {}
        for n, k, m, i in itertools.product(range(2), repeat=4):
            acc = ZERO
            for a, b in itertools.product(range(2), repeat=2):
                if g[i][a].is_zero() or gi[b][n].is_zero():
                    continue
                acc = acc + g[i][a] * y[idx(k, b)][idx(a, m)] * gi[b][n]
            out[n, k, m, i] = acc
        return out

    def _y(self, choice):
        base = {"Rhat": self.Rhat, "Rhat_inv": self.Rhat_inv}
        if choice in base:
            return base[choice]
        factor, _, name = choice.partition("*")
        k = 1 if factor == "q" else int(factor[2:])
        return mat_scale(base[name], qpow(k))

    def hecke_defect(self):
        """(Rhat - q)(Rhat + q^{-1}) for the unscaled normalization."""
        rh = self.Rhat
        if self.convention.r_variant == "scaled":
            rh = mat_scale(rh, Q)
        i4 = mat_identity(4)
        return mat_mul(mat_sub(rh, mat_scale(i4, Q)), [[a + (QI if i == j else ZERO)
                                                      for j, a in enumerate(row)]
                                                     for i, row in enumerate(rh)])


# -- index objects --------------------------------------------------------------

class Indices:
    """Raised/lowered combinations of the canonical letters."""

    def __init__(self, data):
        eu, el = data.epsilon_upper, data.epsilon_lower
        self.x_up = [L("x1"), L("x2")]
        self.y_low = [L("y1"), L("y2")]
        self.d_low = [L("d1"), L("d2")]
        self.db_up = [L("db1"), L("db2")]
        self.x_low = [_contract(el[i], self.x_up) for i in range(2)]
        self.y_up = [_contract(eu[i], self.y_low) for i in range(2)]
        self.d_up = [_contract(eu[i], self.d_low) for i in range(2)]
        self.db_low = [_contract(el[i], self.db_up) for i in range(2)]
        # T^i_j = (y^i x^i), derivative matrix rows (db_j), (d_j)
        self.T = [[self.y_up[0], self.x_up[0]], [self.y_up[1], self.x_up[1]]]
        self.dT = [[self.db_low[0], self.db_low[1]], [self.d_low[0], self.d_low[1]]]
        self.det = sum((self.x_low[i] * self.y_up[i] for i in range(2)), Element.zero())


def _contract(row, letters):
    return sum((letters[j].scale(row[j]) for j in range(2) if not row[j].is_zero()),
               Element.zero())


def rtt_expand(R, A, B, rhs_R):
    """The 16 components of ``R A_1 B_2 - B_2 A_1 rhs_R``."""
    eqs = []
    for i, j, k, l in itertools.product(range(2), repeat=4):
        e = Element.zero()
        for m, n in itertools.product(range(2), repeat=2):
            c = R[idx(i, j)][idx(m, n)]
            if not c.is_zero():
                e = e + multiply(A[m][k], B[n][l]).scale(c)
            c = rhs_R[idx(m, n)][idx(k, l)]
            if not c.is_zero():
                e = e - multiply(B[j][n], A[i][m]).scale(c)
        eqs.append(e)
    return eqs


# -- rule sets --------------------------------------------------------------------

@dataclass
class Calculus:
    """Everything derived from one convention: tensors, rules, ideal."""

    convention: Convention
    data: RMatrixData
    ix: Indices
    coordinate: RuleSet
    derivative: RuleSet
    mixed: RuleSet
    full: RuleSet
    ideal: IdealReducer

    @property
    def fingerprint(self):
        return self.convention.fingerprint


def mixed_relations(data, ix):
    """The four displayed derivative-coordinate families as (lhs, rhs) pairs."""
    Y, Rh, Rhi, g = data.Y_eff, data.Rhat, data.Rhat_inv, data.gamma
    out = []
    r = range(2)
    for i, k in itertools.product(r, r):
        # d_i x^k = gamma_i^k + q Y^{nk}_{mi} x^m d_n
        rhs = Element.scalar(g[i][k])
        for m, n in itertools.product(r, r):
            c = Y[n, k, m, i]
            if not c.is_zero():
                rhs = rhs + (ix.x_up[m] * ix.d_low[n]).scale(Q * c)
        out.append(((f"d{i + 1}", f"x{k + 1}"), rhs))
    for i, j in itertools.product(r, r):
        # db^i y_j = delta^i_j + q y_m db^n Rhat^{mi}_{nj}
        rhs = Element.scalar(ONE if i == j else ZERO)
        for m, n in itertools.product(r, r):
            c = Rh[idx(m, i)][idx(n, j)]
            if not c.is_zero():
                rhs = rhs + (ix.y_low[m] * ix.db_up[n]).scale(Q * c)
        out.append(((f"db{i + 1}", f"y{j + 1}"), rhs))
    for i, j in itertools.product(r, r):
        # d_i y_j = q (Rhat^{-1})^{lk}_{ji} y_k d_l
        rhs = Element.zero()
        for k, l in itertools.product(r, r):
            c = Rhi[idx(l, k)][idx(j, i)]
            if not c.is_zero():
                rhs = rhs + (ix.y_low[k] * ix.d_low[l]).scale(Q * c)
        out.append(((f"d{i + 1}", f"y{j + 1}"), rhs))
    for i, j in itertools.product(r, r):
        # db^i x^j = q^{-1} Rhat^{ij}_{kl} x^k db^l
        rhs = Element.zero()
        for k, l in itertools.product(r, r):
            c = Rh[idx(i, j)][idx(k, l)]
            if not c.is_zero():
                rhs = rhs + (ix.x_up[k] * ix.db_up[l]).scale(QI * c)
        out.append(((f"db{i + 1}", f"x{j + 1}"), rhs))
    return out


def build_rulesets(conv, order=DEFAULT_ORDER):
    """Coordinate, derivative and mixed rule sets for ``conv``.

    Raises :class:`OrientationError` if some relation cannot be oriented.
    """
    data = RMatrixData(conv)
    ix = Indices(data)
    fp = conv.fingerprint
    coord = RuleSet(relations_to_rules(rtt_expand(data.R, ix.T, ix.T, data.R), order,
                                       "coordinate", "rtt:"), order, fingerprint=fp)
    deriv = RuleSet(relations_to_rules(rtt_expand(data.R, ix.dT, ix.dT, data.R21), order,
                                       "derivative", "drtt:"), order, fingerprint=fp)
    mixed = RuleSet([RewriteRule(lhs, rhs, "mixed", "mixed:" + "*".join(lhs))
                     for lhs, rhs in mixed_relations(data, ix)], order, fingerprint=fp)
    full = coord.union(deriv, mixed)
    ideal = IdealReducer(ix.det, coord)
    return Calculus(conv, data, ix, coord, deriv, mixed, full, ideal)


# -- coordinate monomials -----------------------------------------------------------

def coordinate_monomials(max_degree, min_degree=0):
    """Normal monomials ``x1^a x2^b y1^c y2^d`` with ``b*d == 0`` (PBW basis mod ideal)."""
    out = []
    for deg in range(min_degree, max_degree + 1):
        for a, b, c in itertools.product(range(deg + 1), repeat=3):
            d = deg - a - b - c
            if d < 0 or (b and d):
                continue
            out.append(("x1",) * a + ("x2",) * b + ("y1",) * c + ("y2",) * d)
    return out


# -- the solver ----------------------------------------------------------------------

def candidate_grid():
    return [Convention(r, y, e, g) for r in R_VARIANTS for y in Y_CHOICES
            for e in EPS_CHOICES for g in GAMMA_CHOICES]


def anchor_failures(calc, max_degree=3, first_only=True):
    """Run the four anchor identities; returns a list of (anchor, witness)."""
    from .calculus import Operators

    fails = []
    ops = Operators(calc)
    for i in range(2):
        r = ops.apply("Dpp", calc.ix.x_up[i])
        if not r.is_zero():
            fails.append((f"D++x^{i + 1}=0", f"got {r}"))
            if first_only:
                return fails
    for i in range(2):
        r = ops.apply("Dmm", calc.ix.x_up[i])
        target = calc.ideal.reduce(calc.ix.y_up[i])
        if r != target:
            fails.append((f"D--x^{i + 1}=y^{i + 1}", f"got {r}"))
            if first_only:
                return fails
    for w in coordinate_monomials(max_degree, 1):
        m = Element.word(w)
        n = sum(1 if s[0] == "x" else -1 for s in w)
        r = ops.apply("D0", m) - calc.ideal.reduce(m).scale(q_number(n))
        if not r.is_zero():
            fails.append(("D0 f=(n)f", f"f={m}: residual {r}"))
            if first_only:
                return fails
    for w in coordinate_monomials(max_degree, 1):
        m = Element.word(w)
        lhs = ops.apply("Dpp", ops.apply("Dmm", m)) - ops.apply("Dmm", ops.apply("Dpp", m)).scale(qpow(2))
        r = calc.ideal.reduce(lhs - ops.apply("D0", m))
        if not r.is_zero():
            fails.append(("[D++,D--]_q2=D0", f"f={m}: residual {r}"))
            if first_only:
                return fails
    return fails


class ConventionError(RuntimeError):
    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def solve_trace_weights():
    """Solve (w1, w2) from the Cartan-Maurer consistency; see :mod:`.forms`."""
    from .forms import solve_trace_weights as _solve
    return _solve()


def solve_conventions(max_degree=3, grid=None):
    """Evaluate the candidate grid and return ``(Convention, Report)``.

    Raises :class:`ConventionError` unless exactly one candidate passes.
    """
    grid = candidate_grid() if grid is None else grid
    report = Report("conventions")
    passing = []
    with timed(report):
        for conv in grid:
            try:
                calc = build_rulesets(conv)
                fails = anchor_failures(calc, max_degree)
            except OrientationError as exc:
                fails = [("orientation", str(exc))]
            if fails:
                anchor, witness = fails[0]
                report.add(f"candidate {conv.fingerprint.split('#')[0]}", False,
                           witness=f"{anchor}: {witness}")
            else:
                passing.append(conv)
                report.add(f"candidate {conv.fingerprint.split('#')[0]}", True)
        report.data["candidates"] = len(grid)
        report.data["passing"] = [c.fingerprint for c in passing]
        if len(passing) != 1:
            raise ConventionError(f"{len(passing)} candidates pass the anchor suite", report)
        weights = solve_trace_weights()
        conv = replace(passing[0], trace_weights=weights)
    report.convention_fingerprint = conv.fingerprint
    report.data["convention"] = conv.describe()
    # failures of rejected candidates are expected; only the solver verdict counts
    for e in report.entries:
        if e.status == "fail":
            e.status = "reported"
    report.add("unique validated candidate", True, value=conv.describe())
    return conv, report


_VALIDATED = {}


def validated_calculus():
    """The calculus for the validated convention (solved once per process)."""
    if "calc" not in _VALIDATED:
        conv, report = solve_conventions()
        _VALIDATED["calc"] = build_rulesets(conv)
        _VALIDATED["report"] = report
    return _VALIDATED["calc"]


VALIDATED = Convention("standard", "q^-2*Rhat_inv", "inverse", "metric")


def check_rtt_confluence(calc, rules=None, samples=500, max_len=5, seed=0):
    """Critical pairs and randomized normalization of a rule set (default: ``calc.full``)."""
    rules = calc.full if rules is None else rules
    rep = Report("rtt-confluence", calc.fingerprint)
    with timed(rep):
        cf = confluence_fuzz(rules, max_len, samples, seed)
        for word, left, right in cf.critical_failures:
            rep.add(f"critical pair {'*'.join(word)}", False, f"{left} vs {right}")
        rep.add(f"all {cf.critical_pairs} length-3 critical pairs agree",
                not cf.critical_failures)
        for word, ref, other in cf.divergences[:5]:
            rep.add(f"random word {'*'.join(word)}", False, f"{ref} vs {other}")
        rep.add(f"{cf.sampled} random words of length <= {max_len} normalize uniquely",
                not cf.divergences, value=f"{len(cf.divergences)} divergences")
        rep.data["critical_pairs"] = cf.critical_pairs
        rep.data["divergences"] = len(cf.divergences)
    return rep
