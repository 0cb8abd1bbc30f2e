"""Validation reports shared by graph, certificate and CLI checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    witness: Any = None

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "witness": self.witness}


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)
    facts: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, code: str, message: str, witness: Any = None) -> None:
        self.issues.append(Issue(code, message, witness))

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]

    def to_dict(self) -> dict:
        return {"ok": self.ok, "issues": [i.to_dict() for i in self.issues], "facts": self.facts}
