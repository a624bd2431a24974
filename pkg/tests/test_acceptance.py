"""Acceptance criteria 1-12, one test each.

Run with ``pytest tests/test_acceptance.py -v``; a summary line per
criterion is printed at the end of the session.

Criteria 3, 8 and 12 contain a part that cannot hold: the displayed
q-Jacobi identity and the displayed prefactor of the Omega quadratic
relation are false under every other verified relation, and `check all`
inherits the Jacobi failure. Those parts raise ``CriterionUnmet`` and are
marked strict xfail with ``raises=CriterionUnmet``, so every other part of
the same criterion is still a hard assertion, and the tests turn red if
the unattainable part ever starts passing.
"""

import subprocess
import sys
import time
from fractions import Fraction

import pytest

from suq2calc import calculus as K
from suq2calc import forms as F
from suq2calc.freealg import Element
from suq2calc.conventions import check_rtt_confluence, solve_conventions
from suq2calc.qfield import ONE, q_number, qpow
from suq2calc.rewrite import confluence_fuzz

SAMPLE_Q = (Fraction(2), Fraction(-3), Fraction(1, 5), Fraction(7, 3))


class CriterionUnmet(AssertionError):
    """A part of a criterion that is false as stated (see the analysis in the reason)."""


def q_number_oracle(n, t):
    """{n}_q at q = t as a finite geometric sum, independent of the engine."""
    if n >= 0:
        return sum((t ** (-2 * k) for k in range(n)), Fraction(0))
    return -sum((t ** (2 * k) for k in range(1, -n + 1)), Fraction(0))


def failing(report):
    return [e.relation_id for e in report.failures]


def test_criterion_01_convention_resolution():
    start = time.perf_counter()
    conv, rep = solve_conventions(3)
    elapsed = time.perf_counter() - start
    assert len(rep.data["passing"]) == 1
    assert rep.data["candidates"] > 1
    assert conv.fingerprint.startswith("standard|q^-2*Rhat_inv|inverse|metric")
    assert elapsed < 60, elapsed


def test_criterion_02_rewrite_soundness(alg, calc):
    start = time.perf_counter()
    fuzz = confluence_fuzz(alg.full, max_len=5, samples=500)
    elapsed = time.perf_counter() - start
    assert fuzz.sampled == 500
    assert fuzz.divergences == []
    assert fuzz.critical_pairs > 0 and fuzz.critical_failures == []
    assert check_rtt_confluence(calc).ok
    assert elapsed < 120, elapsed


@pytest.mark.xfail(strict=True, raises=CriterionUnmet, reason=(
    "the displayed q-Jacobi combination reduces to (1+q^-2)(q^2-q^-2) D--D++, "
    "not 0; the three bracket relations hold on every monomial of degree <= 4"))
def test_criterion_03_qlie(calc):
    rep = K.check_qlie_and_jacobi(calc, "representation", 4)
    assert rep.ok, failing(rep)
    abstract = K.check_qlie_and_jacobi(calc, "abstract", 4)
    others = [r for r in failing(abstract) if "Jacobi" not in r]
    assert others == []
    # oracle for the residual: [D--,D0] and [D0,D++] terms, computed by hand
    resid = K.jacobi_combination()
    expected = (ONE + qpow(-2)) * (qpow(2) - qpow(-2))
    normal = K.abstract_lie_rules().normalize(resid)
    assert normal.coeff(("Dmm", "Dpp")) == expected
    if not abstract.ok:
        raise CriterionUnmet(f"failing: {failing(abstract)}")


def test_criterion_04_leibnitz(calc):
    rep = K.check_leibnitz(calc, 4)
    assert rep.entries
    assert rep.ok, failing(rep)


def test_criterion_05_eigenvalue_law(calc):
    for n in range(-5, 6):
        for t in SAMPLE_Q:
            assert q_number(n).evaluate(t) == q_number_oracle(n, t)
    rep = K.check_eigen_D0(calc, 5)
    assert len(rep.entries) == len(list(K._monomials(5)))
    assert rep.ok, failing(rep)


def test_criterion_06_mu_nu(calc):
    rep = K.check_mu_nu(calc, 4)
    assert rep.ok, failing(rep)
    laws = {K.munu_exponent_law(calc, 3) for _ in range(3)}
    run = subprocess.run([sys.executable, "-c",
                          "from suq2calc.conventions import validated_calculus as v;"
                          "from suq2calc.calculus import munu_exponent_law as m;"
                          "print(m(v(), 3))"], capture_output=True, text=True, check=True)
    laws.add(int(run.stdout))
    assert laws == {-2}


def test_criterion_07_delta_family(calc):
    for s in (1, 2):
        rep = K.check_delta_family(calc, (-1, 1, 3), s, charge_range=5)
        assert rep.entries
        assert rep.ok, (s, failing(rep))


@pytest.mark.xfail(strict=True, raises=CriterionUnmet, reason=(
    "with trace weights (1, q^-2), which Cartan-Maurer forces, the Omega quadratic "
    "relation holds with prefactor q^2/(1+q^2+q^4) but not the displayed q/(1+q^2+q^4); "
    "components 00, 11, 12, 21, 22, 33 are proportional to C_2"))
def test_criterion_08_forms(alg):
    dim, basis, _ = F.two_form_dimension(alg)
    assert dim == 4
    for w in F.FORM_WORDS_2:
        F.decompose_two_form(Element.word(w), alg.full)
    c2 = F.q_trace(F.omega_squared(alg.full), F.solve_trace_weights(alg))
    assert not alg.full.normalize(c2).is_zero()
    rep = F.check_forms(alg)
    omega = [r for r in failing(rep) if r.startswith("Omega quadratic relation")]
    assert [r for r in failing(rep) if r not in omega] == []
    if omega:
        raise CriterionUnmet(f"failing: {omega}")


def test_criterion_09_d_squared(alg):
    rep, rho = F.check_d_squared(alg, 3)
    assert rep.ok, failing(rep)
    assert len(rep.entries) > 100
    assert rho.is_zero()
    assert rho.classical_limit() == 0


def test_criterion_10_cartan_maurer(alg):
    cm = F.cartan_maurer(alg)
    assert cm.report.ok, failing(cm.report)
    w1, w2 = cm.weights
    for t in SAMPLE_Q:
        assert (w1 + w2).evaluate(t) == (1 + t * t) / (t * t)
    ids = [e.relation_id for e in cm.report.entries if e.status == "pass"]
    assert "tr_q(dOmega) = 0" in ids
    assert {f"Cartan-Maurer entry ({i},{j})" for i in (1, 2) for j in (1, 2)} <= set(ids)


def test_criterion_11_classical_limit(alg):
    assert F.BETA.classical_limit() == 1
    for n in range(-5, 6):
        assert q_number(n).classical_limit() == n
    rep = F.check_classical_limit(alg)
    assert len(rep.entries) > 50
    assert rep.ok, failing(rep)


@pytest.mark.xfail(strict=True, raises=CriterionUnmet, reason=(
    "check all runs the jacobi suite, whose displayed identity is false "
    "(see criterion 3), and the forms suite, whose displayed Omega prefactor is "
    "off by q (see criterion 8); every other suite passes"))
def test_criterion_12_check_all():
    start = time.perf_counter()
    run = subprocess.run([sys.executable, "-m", "suq2calc", "check", "all", "--max-degree", "3"],
                         capture_output=True, text=True, timeout=600)
    elapsed = time.perf_counter() - start
    assert elapsed < 600
    assert run.returncode in (0, 1), run.stderr
    last = run.stdout.strip().splitlines()[-1]
    if run.returncode != 0:
        assert last == "10/12 suites passed; failing: jacobi, forms", last
        raise CriterionUnmet(last)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
