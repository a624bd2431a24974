"""Exact linear algebra over Q(q): sparse row reduction, small matrices."""

from __future__ import annotations

from .freealg import Element
from .qfield import ONE, ZERO, qs


def _row_reduce(rows, key):
    """Gauss-Jordan elimination on sparse rows ``{col: QScalar}``.

    Pivots are the largest columns under ``key``.  Returns ``{pivot: row}``
    with every pivot coefficient 1 and pivots eliminated from other rows.
    """
    basis = {}
    for row in rows:
        row = {c: v for c, v in row.items() if not v.is_zero()}
        # reduce against existing pivots, largest first
        while row:
            hits = [c for c in row if c in basis]
            if not hits:
                break
            c = max(hits, key=key)
            f = row[c]
            for cc, vv in basis[c].items():
                nv = row.get(cc, ZERO) - f * vv
                if nv.is_zero():
                    row.pop(cc, None)
                else:
                    row[cc] = nv
        if not row:
            continue
        p = max(row, key=key)
        inv = row[p].inverse()
        row = {c: v * inv for c, v in row.items()}
        for q_, other in basis.items():
            f = other.get(p)
            if f is None:
                continue
            for cc, vv in row.items():
                nv = other.get(cc, ZERO) - f * vv
                if nv.is_zero():
                    other.pop(cc, None)
                else:
                    other[cc] = nv
        basis[p] = row
    return basis


def rref_elements(elements, key):
    """Reduced echelon form of a list of Elements as ``[(lead, rhs)]``.

    Each entry means ``lead == rhs`` where rhs has only non-lead words.
    """
    rows = [dict(e.items()) for e in elements if not e.is_zero()]
    basis = _row_reduce(rows, key)
    out = []
    for p in sorted(basis, key=key):
        row = basis[p]
        rhs = Element({w: -v for w, v in row.items() if w != p})
        out.append((p, rhs))
    return out


def rank_of(elements, key):
    return len(_row_reduce([dict(e.items()) for e in elements], key))


def solve_linear(equations, unknowns):
    """Solve ``sum_j a_ij u_j = b_i`` exactly.

    ``equations`` is a list of ``({unknown: coeff}, rhs)`` pairs.  Returns
    ``(solution, free)`` where ``solution`` maps determined unknowns to
    values and ``free`` lists undetermined unknowns.  Raises ValueError
    when the system is inconsistent.
    """
    order = {u: i for i, u in enumerate(unknowns)}
    rows = []
    for coeffs, rhs in equations:
        row = {("u", order[u]): qs(c) for u, c in coeffs.items() if not qs(c).is_zero()}
        if not qs(rhs).is_zero():
            row[("b", 0)] = -qs(rhs)
        if row:
            rows.append(row)

    def key(col):
        return (1, -col[1]) if col[0] == "u" else (0, 0)

    basis = _row_reduce(rows, key)
    if ("b", 0) in basis:
        raise ValueError("inconsistent linear system")
    solution, determined = {}, set()
    for p, row in basis.items():
        others = [c for c in row if c != p and c[0] == "u"]
        if others:
            continue
        solution[unknowns[p[1]]] = -row.get(("b", 0), ZERO)
        determined.add(p[1])
    pivots = {p[1] for p in basis}
    free = [u for i, u in enumerate(unknowns) if i not in pivots]
    underdetermined = [unknowns[p[1]] for p in basis if p[1] not in determined]
    return solution, free + underdetermined


# -- small dense matrices -----------------------------------------------------

def mat_identity(n):
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, m, k = len(a), len(b), len(b[0])
    return [[sum((a[i][t] * b[t][j] for t in range(m)), ZERO) for j in range(k)]
            for i in range(n)]


def mat_scale(a, c):
    return [[x * c for x in row] for row in a]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_transpose(a):
    return [list(r) for r in zip(*a)]


def mat_inverse(a):
    n = len(a)
    m = [list(a[i]) + [ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = m[col][col].inverse()
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def mat_equal(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))
