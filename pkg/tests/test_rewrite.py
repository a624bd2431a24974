import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suq2calc.freealg import COORDINATES, DERIVATIVES, Element, L, grade
from suq2calc.qfield import ONE, qpow
from suq2calc.rewrite import (MissingRelation, OrientationError, RewriteRule, RuleSet,
                              StepLimitExceeded, TermOrder, confluence_fuzz,
                              relations_to_rules)

ALPHABET = COORDINATES + DERIVATIVES + ("wpp", "wmm", "w0")


def random_words(seed, n=40, max_len=4, alphabet=ALPHABET):
    rng = random.Random(seed)
    return [tuple(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))
            for _ in range(n)]


def test_term_order_is_deglex():
    order = TermOrder(("x1", "x2", "y1"))
    assert order.key(("x2",)) < order.key(("x1", "x1"))
    assert order.key(("x1", "x2")) < order.key(("x2", "x1"))
    assert "x1 < x2 < y1" in order.descriptor()


def test_rules_must_decrease_and_be_homogeneous():
    with pytest.raises(OrientationError):
        RuleSet([RewriteRule(("x1", "x2"), L("x2") * L("x1"), "coordinate")])
    with pytest.raises(OrientationError):
        RuleSet([RewriteRule(("x2", "x1"), L("y1") * L("x1"), "coordinate")])


def test_relations_are_oriented_at_the_leading_word():
    rel = L("x2") * L("x1") - (L("x1") * L("x2")).scale(qpow(1))
    (rule,) = relations_to_rules([rel], TermOrder(("x1", "x2")), "coordinate")
    assert rule.lhs == ("x2", "x1")
    assert rule.rhs == (L("x1") * L("x2")).scale(qpow(1))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_normalize_is_idempotent_and_grading_preserving(seed):
    from suq2calc.conventions import validated_calculus
    from suq2calc.forms import build_sigma_algebra

    rules = build_sigma_algebra(4, validated_calculus()).full
    for w in random_words(seed, n=5):
        e = Element.word(w)
        n1 = rules.normalize(e)
        assert rules.normalize(n1) == n1
        assert rules.is_normal(n1)
        if not n1.is_zero():
            assert grade(n1) == grade(e)


def test_random_strategies_agree(alg):
    for w in random_words(7):
        e = Element.word(w)
        ref = alg.full.normalize(e)
        for k in range(3):
            assert alg.full.normalize(e, rng=random.Random(k)) == ref


def test_step_limit(calc):
    tight = calc.full.with_options(step_limit=3)
    with pytest.raises(StepLimitExceeded):
        tight.normalize(Element.word(("y2", "y1", "x2", "x1")))


def test_strict_mode_reports_missing_relations(alg):
    strict = alg.full.with_options(strict=True)
    with pytest.raises(MissingRelation):
        strict.normalize(L("d1") * L("wpp"))
    assert alg.full.normalize(L("d1") * L("wpp")) == L("d1") * L("wpp")


def test_dumps_loads_round_trip(calc):
    text = calc.full.dumps()
    assert RuleSet.loads(text) == calc.full
    assert text.startswith("# convention: " + calc.fingerprint)


def test_union_and_restrict(calc):
    u = calc.coordinate.union(calc.derivative)
    assert len(u) == len(calc.coordinate) + len(calc.derivative)
    assert set(u.restrict({"coordinate"}).rules) == set(calc.coordinate.rules)
    with pytest.raises(ValueError):
        calc.coordinate.union(RuleSet([], TermOrder(("x1", "x2"))))


def test_confluence_of_coordinate_rules(calc):
    rep = confluence_fuzz(calc.coordinate, 5, 100, seed=3)
    assert rep.ok and rep.critical_pairs > 0


def test_confluence_detects_a_bad_system(calc):
    from suq2calc.forms import build_sigma_algebra

    rep = confluence_fuzz(build_sigma_algebra(2, calc).form_rules, 3, 10)
    assert not rep.ok
    assert {w for w, _, _ in rep.critical_failures} == {("w0", "w0", "wpp"), ("w0", "w0", "wmm")}


def test_det_is_central_modulo_the_rules(calc):
    det = calc.ix.det
    for s in COORDINATES:
        c = calc.full.normalize(det * L(s) - L(s) * det)
        assert c.is_zero()


def test_ideal_reduction(calc):
    assert calc.ideal.reduce(calc.ix.det) == Element.one()
    f = L("x1") * calc.ix.det * L("y2")
    assert calc.ideal.reduce(f) == calc.ideal.reduce(L("x1") * L("y2"))
    assert calc.ideal.reduce(calc.ideal.reduce(f)) == calc.ideal.reduce(f)
    assert calc.ideal.reduce(Element.one().scale(ONE)) == Element.one()
