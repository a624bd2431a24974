"""Oriented rewriting of words, ideal reduction and confluence diagnostics."""

from __future__ import annotations

import heapq
import itertools
import random
from dataclasses import dataclass, field

from .freealg import (ALL_LETTERS, LETTER_RANK, Element, format_element,
                      format_word, parse_element, word_charge, word_degree)
from .qfield import ONE, ZERO, qs

DEFAULT_STEP_LIMIT = 10**6


class RewriteError(Exception):
    pass


class StepLimitExceeded(RewriteError):
    pass


class MissingRelation(RewriteError):
    pass


class OrientationError(RewriteError):
    pass


@dataclass(frozen=True)
class RewriteRule:
    lhs: tuple
    rhs: Element
    sector: str
    rule_id: str = ""

    def __str__(self):
        return f"{format_word(self.lhs)} -> {format_element(self.rhs)}"


class TermOrder:
    """Degree-lexicographic order from a letter ranking."""

    def __init__(self, letters):
        self.letters = tuple(letters)
        self.rank = {s: i for i, s in enumerate(self.letters)}

    def key(self, word):
        rank = self.rank
        return (len(word), tuple(rank[s] for s in word))

    def heap_key(self, word):
        rank = self.rank
        return (-len(word), tuple(-rank[s] for s in word))

    def descriptor(self):
        return "deglex(" + " < ".join(self.letters) + ")"

    def __eq__(self, other):
        return isinstance(other, TermOrder) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)


DEFAULT_ORDER = TermOrder(sorted(LETTER_RANK, key=LETTER_RANK.get))


class RuleSet:
    """Immutable collection of length-2 rules sharing a term order."""

    def __init__(self, rules, order=DEFAULT_ORDER, step_limit=DEFAULT_STEP_LIMIT,
                 strict=False, fingerprint=""):
        self.order = order
        self.step_limit = step_limit
        self.strict = strict
        self.fingerprint = fingerprint
        self._rules = {}
        for r in rules:
            if len(r.lhs) != 2:
                raise ValueError(f"rule lhs must have length 2: {r}")
            if r.lhs in self._rules:
                raise ValueError(f"duplicate rule for {format_word(r.lhs)}")
            self._check(r)
            self._rules[r.lhs] = r
        self._rhs = {lhs: tuple(r.rhs.items()) for lhs, r in self._rules.items()}

    def _check(self, r):
        ch, dg = word_charge(r.lhs), word_degree(r.lhs)
        lk = self.order.key(r.lhs)
        for w in r.rhs.words():
            if word_charge(w) != ch or word_degree(w) != dg:
                raise OrientationError(f"rule {r} is not grading-homogeneous")
            if not self.order.key(w) < lk:
                raise OrientationError(f"rule {r} is not decreasing in {self.order.descriptor()}")

    # -- access -----------------------------------------------------------
    @property
    def rules(self):
        return list(self._rules.values())

    def __len__(self):
        return len(self._rules)

    def __contains__(self, lhs):
        return tuple(lhs) in self._rules

    def rule(self, lhs):
        return self._rules[tuple(lhs)]

    def sectors(self):
        return sorted({r.sector for r in self._rules.values()})

    def restrict(self, sectors):
        sectors = set(sectors)
        return RuleSet([r for r in self.rules if r.sector in sectors], self.order,
                       self.step_limit, self.strict, self.fingerprint)

    def union(self, *others, strict=None):
        rules = list(self.rules)
        for o in others:
            if o.order != self.order:
                raise ValueError("cannot merge rule sets with different term orders")
            rules.extend(o.rules)
        return RuleSet(rules, self.order, self.step_limit,
                       self.strict if strict is None else strict, self.fingerprint)

    def with_options(self, step_limit=None, strict=None):
        return RuleSet(self.rules, self.order,
                       self.step_limit if step_limit is None else step_limit,
                       self.strict if strict is None else strict, self.fingerprint)

    def replace(self, rule):
        rules = [r for r in self.rules if r.lhs != rule.lhs] + [rule]
        return RuleSet(rules, self.order, self.step_limit, self.strict, self.fingerprint)

    # -- normalization ----------------------------------------------------
    def redexes(self, word):
        rules = self._rhs
        return [i for i in range(len(word) - 1) if (word[i], word[i + 1]) in rules]

    def _first_redex(self, word):
        rules = self._rhs
        for i in range(len(word) - 1):
            if (word[i], word[i + 1]) in rules:
                return i
        if self.strict:
            rank = self.order.rank
            for i in range(len(word) - 1):
                if rank[word[i]] > rank[word[i + 1]]:
                    raise MissingRelation(
                        f"no relation for out-of-order pair {word[i]}*{word[i + 1]}")
        return -1

    def normalize(self, e, rng=None):
        """Normal form of ``e``; ``rng`` picks random redexes (for fuzzing)."""
        pending = dict(e.items())
        heap = [(self.order.heap_key(w), w) for w in pending]
        heapq.heapify(heap)
        result = {}
        steps = 0
        rules = self._rhs
        hk = self.order.heap_key
        while heap:
            _, w = heapq.heappop(heap)
            c = pending.pop(w, None)
            if c is None:
                continue
            if rng is None:
                i = self._first_redex(w)
            else:
                reds = self.redexes(w)
                i = rng.choice(reds) if reds else self._first_redex(w)
            if i < 0:
                result[w] = c
                continue
            steps += 1
            if steps > self.step_limit:
                raise StepLimitExceeded(f"step limit {self.step_limit} exceeded")
            pre, post = w[:i], w[i + 2:]
            for rw, rc in rules[(w[i], w[i + 1])]:
                nw = pre + rw + post
                nc = c * rc
                prev = pending.get(nw)
                if prev is None:
                    pending[nw] = nc
                    heapq.heappush(heap, (hk(nw), nw))
                else:
                    s = prev + nc
                    if s.is_zero():
                        del pending[nw]
                    else:
                        pending[nw] = s
        return Element._raw({w: c for w, c in result.items() if not c.is_zero()})

    def is_normal(self, e):
        return all(not self.redexes(w) for w in e.words())

    # -- serialization ----------------------------------------------------
    def dumps(self):
        lines = [f"# convention: {self.fingerprint}", f"# order: {self.order.descriptor()}"]
        for sector in self.sectors():
            lines.append(f"# sector: {sector}")
            for r in sorted((r for r in self.rules if r.sector == sector),
                            key=lambda r: self.order.key(r.lhs)):
                lines.append(str(r))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text, step_limit=DEFAULT_STEP_LIMIT):
        fingerprint, order, sector = "", DEFAULT_ORDER, "unknown"
        rules = []
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                tag, _, value = line[1:].strip().partition(":")
                value = value.strip()
                if tag == "convention":
                    fingerprint = value
                elif tag == "order":
                    inner = value[len("deglex("):-1]
                    order = TermOrder([s.strip() for s in inner.split("<")])
                elif tag == "sector":
                    sector = value
                continue
            lhs, _, rhs = line.partition("->")
            lhs_e = parse_element(lhs, ALL_LETTERS)
            (word, c), = lhs_e.items()
            if not c.is_one():
                raise ValueError(f"rule lhs must be a bare word: {line}")
            rules.append(RewriteRule(word, parse_element(rhs, ALL_LETTERS), sector))
        return cls(rules, order, step_limit, fingerprint=fingerprint)

    def __eq__(self, other):
        return (isinstance(other, RuleSet) and self.order == other.order
                and self.fingerprint == other.fingerprint
                and {k: (r.rhs, r.sector) for k, r in self._rules.items()}
                == {k: (r.rhs, r.sector) for k, r in other._rules.items()})

    __hash__ = None


def normalize(e, rules):
    return rules.normalize(e)


# -- relations -> rules --------------------------------------------------------

def relations_to_rules(relations, order, sector, prefix=""):
    """Row-reduce linear relations and orient each one at its leading word.

    Returns the list of rules; raises :class:`OrientationError` if a leading
    word is a monomial of length other than 2.
    """
    from .linalg import rref_elements

    rows = rref_elements(relations, order.key)
    rules = []
    for lead, rhs in rows:
        if len(lead) != 2:
            raise OrientationError(
                f"relation with leading word {format_word(lead) or '1'} cannot be a length-2 rule")
        rules.append(RewriteRule(lead, rhs, sector, f"{prefix}{format_word(lead)}"))
    return rules


# -- the unimodularity ideal ---------------------------------------------------

class IdealReducer:
    """Reduction modulo the two-sided ideal generated by ``det - 1``.

    The leading word ``a*b`` of the normalized ``det`` is rewritten to
    ``(1 - lower terms) / lc``.  In a normal word, an ``a`` separated from a
    later ``b`` only by letters that commute with ``a`` up to a scalar is
    first transported next to ``b``; this is the family of S-polynomial
    consequences of the head rule, so normal forms are canonical.
    """

    def __init__(self, det, rules):
        self.rules = rules
        det = rules.normalize(det)
        lead = max(det.words(), key=rules.order.key)
        if len(lead) != 2:
            raise OrientationError("leading word of det must have length 2")
        lc = det.coeff(lead)
        self.head = lead
        self.det = det
        self.replacement = ((Element.one() - det) + Element.word(lead, lc)).scale(lc.inverse())
        self._hop = {}
        a = lead[0]
        for r in rules.rules:
            l, aa = r.lhs
            if aa == a and l != a and len(r.rhs) == 1:
                (w, k), = r.rhs.items()
                if w == (a, l):
                    # l a = k a l  =>  a l = k^{-1} l a
                    self._hop[l] = k.inverse()

    def _split(self, word):
        a, b = self.head
        for j, s in enumerate(word):
            if s != b:
                continue
            i = j - 1
            factor = ONE
            while i >= 0 and word[i] != a:
                k = self._hop.get(word[i])
                if k is None:
                    break
                factor = factor * k
                i -= 1
            if i >= 0 and word[i] == a:
                moved = word[:i] + word[i + 1:j]
                return moved, word[j + 1:], factor
        return None

    def reduce(self, e):
        e = self.rules.normalize(e)
        steps = 0
        while True:
            out = Element.zero()
            changed = False
            for w, c in e.items():
                hit = self._split(w)
                if hit is None:
                    out = out + Element._raw({w: c})
                    continue
                pre, post, factor = hit
                changed = True
                piece = Element.word(pre) * self.replacement * Element.word(post)
                out = out + piece.scale(c * factor)
            if not changed:
                return e
            steps += 1
            if steps > self.rules.step_limit:
                raise StepLimitExceeded("ideal reduction did not terminate")
            e = self.rules.normalize(out)


def reduce_mod_ideal(e, reducer):
    return reducer.reduce(e)


# -- confluence diagnostics -----------------------------------------------------

@dataclass
class ConfluenceReport:
    sampled: int = 0
    divergences: list = field(default_factory=list)
    critical_pairs: int = 0
    critical_failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.divergences and not self.critical_failures


def critical_pairs(rules):
    """Length-3 overlaps ``abc`` where both ``ab`` and ``bc`` are rule heads."""
    heads = set(rules._rhs)
    by_first = {}
    for a, b in heads:
        by_first.setdefault(a, []).append(b)
    for a, b in sorted(heads):
        for c in by_first.get(b, ()):
            yield (a, b, c)


def _reduce_at(rules, word, i):
    pre, post = word[:i], word[i + 2:]
    out = Element.zero()
    for rw, rc in rules._rhs[(word[i], word[i + 1])]:
        out = out + Element.word(pre + rw + post, rc)
    return rules.normalize(out)


def confluence_fuzz(rules, max_len=5, samples=500, seed=0, strategies=3):
    if max_len < 3:
        raise ValueError("max_len must be at least 3")
    rng = random.Random(seed)
    report = ConfluenceReport()
    for word in critical_pairs(rules):
        report.critical_pairs += 1
        left, right = _reduce_at(rules, word, 0), _reduce_at(rules, word, 1)
        if left != right:
            report.critical_failures.append((word, left, right))
    letters = sorted({s for lhs in rules._rhs for s in lhs}, key=rules.order.rank.get)
    for _ in range(samples):
        n = rng.randint(3, max_len)
        word = tuple(rng.choice(letters) for _ in range(n))
        e = Element.word(word)
        ref = rules.normalize(e)
        report.sampled += 1
        for _ in range(strategies):
            other = rules.normalize(e, rng=rng)
            if other != ref:
                report.divergences.append((word, ref, other))
                break
    return report
