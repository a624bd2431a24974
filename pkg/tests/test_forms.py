import itertools

import pytest

from suq2calc import forms as F
from suq2calc.freealg import Element, L, word_charge
from suq2calc.qfield import ONE, ZERO, qpow, qs

Q, Q2 = qpow(1), qpow(2)


def test_omega_coordinate_rules(calc, alg):
    n = alg.full.normalize
    for i in range(2):
        x, y = calc.ix.x_up[i], calc.ix.y_up[i]
        xi = L(f"x{i + 1}")
        assert n(L("wpp") * xi) == (xi * L("wpp")).scale(Q)
        assert n(L("wmm") * xi) == n((x * L("wmm")).scale(qpow(-1))
                                     + (y * L("w0")).scale((ONE - qpow(4)) / Q))
        assert n(L("w0") * xi) == n(x * L("w0") + (y * L("wpp")).scale(ONE - qpow(-2)))
    for s in ("y1", "y2"):
        assert n(L("wpp") * L(s)) == (L(s) * L("wpp")).scale(qpow(-1))
        assert n(L("wmm") * L(s)) == (L(s) * L("wmm")).scale(Q)
        assert n(L("w0") * L(s)) == L(s) * L("w0")


def test_rules_are_charge_homogeneous(alg):
    for r in alg.coordinate_rules.rules + alg.form_rules.rules:
        assert all(word_charge(w) == word_charge(r.lhs) for w in r.rhs.words())


def test_forms_left_rules_are_the_inverted_relations(calc, alg):
    n = alg.forms_left.normalize
    assert n(L("x1") * L("wpp")) == (L("wpp") * L("x1")).scale(qpow(-1))
    assert n(L("y1") * L("wpp")) == (L("wpp") * L("y1")).scale(Q)
    assert n(L("y2") * L("w0")) == L("w0") * L("y2")
    # the two representations of a mixed word agree after conversion
    e = L("wmm") * L("x2") * L("y1")
    assert n(alg.full.normalize(e)) == n(e)


def test_sigma4_relations(alg):
    n = alg.form_rules.normalize
    wpp, wmm, w0 = L("wpp"), L("wmm"), L("w0")
    assert n(wpp * wpp).is_zero() and n(wmm * wmm).is_zero()
    assert n(wpp * w0 + (w0 * wpp).scale(Q2)).is_zero()
    assert n(wmm * w0 + (w0 * wmm).scale(qpow(-2))).is_zero()
    lhs = (w0 * w0).scale((ONE + Q2) * (ONE + Q2))
    assert n(lhs - (wpp * wmm).scale(qpow(-2)) - (wmm * wpp).scale(Q2)).is_zero()
    assert F.sigma_coefficient(4) == -Q2 * (ONE + Q2) * (ONE + Q2)
    assert alg.gauge_covariant


def test_two_form_dimensions(calc, alg):
    dim, basis, rep = F.two_form_dimension(alg)
    assert dim == 4
    assert set(basis) == {("wpp", "wmm"), ("wmm", "wpp"), ("wpp", "w0"), ("wmm", "w0")}
    omitted = F.build_sigma_algebra(4, calc, include_omitted=True)
    assert F.two_form_dimension(omitted)[0] == 3
    assert not omitted.gauge_covariant
    assert F.classical_two_form_dimension(4) == 4
    for s in (-2, 0, 1, 2, 3, 5):
        assert F.two_form_dimension(F.build_sigma_algebra(s, calc))[0] == 4


def test_only_sigma_0_and_4_are_confluent(calc):
    from suq2calc.rewrite import confluence_fuzz

    ok = {s for s in range(-3, 7)
          if confluence_fuzz(F.build_sigma_algebra(s, calc).form_rules, 3, 5).ok}
    assert ok == {0, 4}


def test_basis_change(alg):
    n = alg.form_rules.normalize
    h = (ONE + Q2) / 2
    P, M = L("wpp") * L("wmm"), L("wmm") * L("wpp")
    assert n(P) == n((F.omega2_0() + F.sigma0()).scale(h))
    assert n(M) == n((F.sigma0() - F.omega2_0()).scale(h / Q2))
    sol = F.decompose_two_form(L("w0") * L("wpp"), alg.form_rules)
    assert sol == {"w0*wpp": ONE, "w0*wmm": ZERO, "omega2_0": ZERO, "sigma0": ZERO}


def test_beta_is_exact():
    assert F.BETA == (ONE + qpow(4)) / (Q2 * (ONE + Q2))
    assert F.BETA.classical_limit() == 1


def test_cartan_maurer(alg):
    cm = F.cartan_maurer(alg)
    assert cm.report.ok
    assert cm.weights == (ONE, qpow(-2))
    b = F.BETA
    assert cm.lambdas == {("D0", "Dmm"): -2 * b, ("D0", "Dpp"): -2 * Q2 * b,
                          ("Dpp", "Dmm"): 2 * b}
    n = alg.form_rules.normalize
    assert cm.d_omega["wpp"] == n((L("w0") * L("wpp")).scale(ONE + qpow(4)))
    assert cm.d_omega["wmm"] == n((L("w0") * L("wmm")).scale(-(qpow(-2) + Q2)))
    assert cm.d_omega["w0"] == n(F.omega2_0().scale(b))


def test_trace_of_omega_squared_is_nonzero(alg):
    t = alg.form_rules.normalize(F.q_trace(F.omega_squared(alg.form_rules), (ONE, qpow(-2))))
    assert not t.is_zero()
    coords = F.decompose_two_form(t, alg.form_rules)
    assert not coords["sigma0"].is_zero()


def test_rmatrix_form(alg):
    rep = F.check_rmatrix_form(alg)
    status = {e.relation_id: (e.status, e.value) for e in rep.entries}
    assert status["R dT_1 T_2 = T_2 dT_1 R: all 16 components vanish"][0] == "pass"
    assert status["calE^2 = (eps^{ij} eps_{ij}) calE"][0] == "pass"
    failing = [k for k, (s, _) in status.items() if s == "fail"]
    assert sorted(failing) == [f"Omega quadratic relation component {c}"
                               for c in ("00", "11", "12", "21", "22", "33")]
    assert status["Omega quadratic relation with prefactor q^2/(1+q^2+q^4)"][1] == "holds"
    assert status["Omega quadratic relation with trace weights (q, q^-1)"][1] == "holds"


def test_d_examples(alg):
    d = F.ExteriorDerivative(alg)
    assert d(Element.one()).is_zero()
    assert d(L("x1")) == d.forms_left(L("wpp") * L("y2").scale(-Q) + L("w0") * L("x1"))
    assert d(F.omega2_0()).is_zero()
    assert d(F.upsilon()).is_zero()
    assert d(d(L("x1") * L("y1"))).is_zero()


def test_d_rejects_other_sigma(calc):
    with pytest.raises(ValueError):
        F.ExteriorDerivative(F.build_sigma_algebra(2, calc))


def test_d_squared_and_rho(alg):
    rep, rho = F.check_d_squared(alg, 2)
    assert rep.ok
    assert rho == ZERO
    assert rho.classical_limit() == 0


def test_d_squared_detects_a_wrong_d_omega(alg):
    cm = F.cartan_maurer(alg)
    bad = dict(cm.d_omega)
    bad["wmm"] = bad["wmm"].scale(qs(2))
    d = F.ExteriorDerivative(alg, ZERO, bad)
    assert not d(d(L("wmm") * L("x1"))).is_zero()


def test_d_omega_cross_validation(alg):
    rep = F.cross_validate_d_omega(alg)
    status = {e.relation_id.split()[0]: e for e in rep.entries}
    assert status["d(wpp"].status == "pass"
    assert status["d(wmm"].status == "pass"
    assert status["d(w0"].status == "fail"
    assert status["d(w0"].value == f"ratio {F.BETA}"


def test_top_degree(alg):
    raw = F.volume_dominance(alg)
    assert raw.data["raw_dimension"] == 4
    assert not raw.ok
    paired = F.volume_dominance(alg, projected=True)
    assert paired.ok
    assert F.top_degree_coefficient(F.upsilon(), alg.form_rules) == ONE
    n = alg.form_rules.normalize
    # sigma^0 w0 pairs to zero with the volume trivector
    assert F.top_degree_coefficient(F.sigma0() * L("w0"), alg.form_rules).is_zero()
    for w in itertools.product(("wpp", "wmm", "w0"), repeat=3):
        if word_charge(w) != 0:
            assert F.top_degree_coefficient(n(Element.word(w)), alg.form_rules).is_zero()


def test_forms_suite_fails_only_on_the_displayed_omega_relation(alg):
    rep = F.check_forms(alg)
    assert {e.relation_id.rsplit(" ", 1)[0] for e in rep.failures} == {
        "Omega quadratic relation component"}


def test_classical_limit(alg):
    assert F.check_classical_limit(alg).ok
