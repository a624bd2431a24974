import itertools
import time

from suq2calc.conventions import (VALIDATED, RMatrixData, anchor_failures, build_rulesets,
                                  candidate_grid, check_rtt_confluence, coordinate_monomials,
                                  rtt_expand, solve_conventions, swap_slots)
from suq2calc.freealg import Element, L
from suq2calc.linalg import mat_identity, mat_mul
from suq2calc.qfield import ONE, ZERO, qpow


def test_grid_size_and_unique_solution():
    grid = candidate_grid()
    assert len(grid) == 80
    assert len({c.fingerprint for c in grid}) == 80
    t0 = time.perf_counter()
    conv, rep = solve_conventions()
    assert time.perf_counter() - t0 < 60
    assert conv.grid_key == VALIDATED.grid_key
    assert conv.trace_weights == (ONE, qpow(-2))
    assert rep.data["passing"] == [VALIDATED.fingerprint]


def test_rejected_candidates_carry_witnesses():
    _, rep = solve_conventions()
    rejected = [e for e in rep.entries if e.status == "reported"]
    assert len(rejected) == 79
    assert all(e.witness for e in rejected)


def test_standard_r_matrix():
    data = RMatrixData(VALIDATED)
    R = data.R
    assert [R[i][i] for i in range(4)] == [qpow(1), ONE, ONE, qpow(1)]
    assert R[2][1] == qpow(1) - qpow(-1)
    assert mat_mul(data.R, data.R_inv) == mat_identity(4)
    assert all(c.is_zero() for row in data.hecke_defect() for c in row)


def test_yang_baxter():
    R = RMatrixData(VALIDATED).R
    r = range(2)

    def leg(a, b):
        out = {}
        for i, j, k, l, m, n in itertools.product(r, repeat=6):
            src, dst = [i, j, k], [l, m, n]
            others = [x for x in range(3) if x not in (a, b)][0]
            if src[others] != dst[others]:
                continue
            c = R[2 * src[a] + src[b]][2 * dst[a] + dst[b]]
            if not c.is_zero():
                out[(i, j, k), (l, m, n)] = c
        return out

    def mul(x, y):
        out = {}
        for (i, m), u in x.items():
            for (m2, j), v in y.items():
                if m == m2:
                    out[i, j] = out.get((i, j), ZERO) + u * v
        return {k: v for k, v in out.items() if not v.is_zero()}

    r12, r13, r23 = leg(0, 1), leg(0, 2), leg(1, 2)
    assert mul(mul(r12, r13), r23) == mul(mul(r23, r13), r12)


def test_metric_and_raising():
    data = RMatrixData(VALIDATED)
    el, eu = data.epsilon_lower, data.epsilon_upper
    assert el[0][1] == ONE and el[1][0] == -qpow(-1)
    for i, k in itertools.product(range(2), repeat=2):
        s = sum((el[i][j] * eu[j][k] for j in range(2)), ZERO)
        assert s == (ONE if i == k else ZERO)
    assert data.gamma == [[qpow(1), ZERO], [ZERO, qpow(-1)]]
    calc = build_rulesets(VALIDATED)
    assert calc.ix.y_up == [L("y2").scale(-qpow(1)), L("y1")]


def test_rtt_relations_reduce_to_zero(calc):
    for e in rtt_expand(calc.data.R, calc.ix.T, calc.ix.T, calc.data.R):
        assert calc.coordinate.normalize(e).is_zero()
    for e in rtt_expand(calc.data.R, calc.ix.dT, calc.ix.dT, swap_slots(calc.data.R)):
        assert calc.derivative.normalize(e).is_zero()


def test_quantum_plane_rules(calc):
    n = calc.coordinate.normalize
    assert n(L("x2") * L("x1")) == (L("x1") * L("x2")).scale(qpow(-1))
    assert n(L("y2") * L("y1")) == (L("y1") * L("y2")).scale(qpow(1))


def test_mixed_rules(calc):
    n = calc.full.normalize
    assert n(L("d1") * L("x1")) == Element.scalar(qpow(1)) + (L("x1") * L("d1")).scale(qpow(-2))
    assert n(L("d1") * L("x2")) == (L("x2") * L("d1")).scale(qpow(-1))
    assert n(L("d2") * L("x2")) == (Element.scalar(qpow(-1))
                                    + (L("x1") * L("d1")).scale(qpow(-4) - qpow(-2))
                                    + (L("x2") * L("d2")).scale(qpow(-2)))


def test_anchors_pass_and_full_system_is_confluent(calc):
    assert anchor_failures(calc, 3, first_only=False) == []
    rep = check_rtt_confluence(calc)
    assert rep.ok
    assert rep.data["critical_pairs"] == 56


def test_monomial_basis_counts():
    # x1^a x2^b y1^c y2^d with b*d = 0: degree n gives (n+1)^2 monomials
    for n in range(5):
        assert len(coordinate_monomials(n, n)) == (n + 1) ** 2


def test_fingerprint_is_stable():
    assert VALIDATED.fingerprint == build_rulesets(VALIDATED).fingerprint
    assert VALIDATED.fingerprint.startswith("standard|q^-2*Rhat_inv|inverse|metric#")
