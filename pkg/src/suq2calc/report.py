"""Pass/fail reports shared by every verification suite."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

PASS, FAIL, REPORTED = "pass", "fail", "reported"


@dataclass
class Entry:
    relation_id: str
    status: str
    witness: str | None = None
    value: str | None = None

    def to_dict(self):
        d = {"relation_id": self.relation_id, "status": self.status}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.value is not None:
            d["value"] = self.value
        return d


@dataclass
class Report:
    suite: str
    convention_fingerprint: str = ""
    entries: list = field(default_factory=list)
    timing: float = 0.0
    data: dict = field(default_factory=dict)

    def add(self, relation_id, ok, witness=None, value=None):
        status = PASS if ok is True else FAIL if ok is False else ok
        self.entries.append(Entry(relation_id, status,
                                  None if witness is None else str(witness),
                                  None if value is None else str(value)))

    def note(self, relation_id, value=None, witness=None):
        self.add(relation_id, REPORTED, witness, value)

    @property
    def failures(self):
        return [e for e in self.entries if e.status == FAIL]

    @property
    def ok(self):
        return not self.failures

    def merge(self, other):
        self.entries.extend(other.entries)
        self.data.update(other.data)
        return self

    def to_dict(self, timing=False):
        d = {"suite": self.suite, "convention_fingerprint": self.convention_fingerprint,
             "status": PASS if self.ok else FAIL,
             "entries": [e.to_dict() for e in self.entries]}
        if timing:
            d["timing"] = round(self.timing, 3)
        return d

    def to_json(self, timing=False):
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=False)

    def to_text(self, verbose=False):
        n_pass = sum(e.status == PASS for e in self.entries)
        head = (f"[{'PASS' if self.ok else 'FAIL'}] {self.suite}: {n_pass} passed, "
                f"{len(self.failures)} failed  (convention {self.convention_fingerprint})")
        lines = [head]
        for e in self.entries:
            if e.status == PASS and not verbose:
                continue
            line = f"  {e.status:8s} {e.relation_id}"
            if e.value is not None:
                line += f"  value: {e.value}"
            if e.witness is not None:
                line += f"  witness: {e.witness}"
            lines.append(line)
        return "\n".join(lines)


class timed:
    def __init__(self, report):
        self.report = report

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.timing = time.perf_counter() - self.t0
        return False
