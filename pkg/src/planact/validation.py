"""Validation reports: violations are data, not exceptions."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Violation:
    code: str
    message: str
    step_number: int | None = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def add(self, code: str, message: str, step_number: int | None = None) -> None:
        self.violations.append(Violation(code, message, step_number))
