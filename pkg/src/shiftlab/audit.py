"""Audit records collected by the constructions and emitted in reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"


@dataclass
class Audit:
    name: str
    status: str
    topic: str = ""
    witness: Any = None
    counterexample: Any = None

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status, "topic": self.topic}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class AuditLog:
    audits: list = field(default_factory=list)

    def check(self, name: str, ok: bool, topic: str = "", witness=None, counterexample=None) -> bool:
        self.audits.append(Audit(name, PASS if ok else FAIL, topic,
                                 witness, None if ok else counterexample))
        return ok

    def extend(self, other: AuditLog, prefix: str = "") -> None:
        for a in other.audits:
            self.audits.append(Audit(prefix + a.name, a.status, a.topic, a.witness, a.counterexample))

    @property
    def passed(self) -> bool:
        return all(a.status == PASS for a in self.audits)

    def failures(self) -> list[Audit]:
        return [a for a in self.audits if a.status != PASS]

    def get(self, name: str) -> Audit:
        for a in self.audits:
            if a.name == name:
                return a
        raise KeyError(name)

    def to_json(self) -> list:
        return [a.to_json() for a in self.audits]
