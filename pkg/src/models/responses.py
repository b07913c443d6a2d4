"""Report models.

Every suite produces one ``SuiteReport``; its JSON form is byte-deterministic
for a given structure file and seed.
"""

import json
from typing import Any

from pydantic import BaseModel, Field

from src.constants import ReportStatus


class Counterexample(BaseModel):
    """Smallest failing input found, with both sides of the identity."""

    inputs: dict[str, Any] = Field(description="Named inputs of the failing instance")
    lhs: Any = Field(default=None, description="Left-hand side")
    rhs: Any = Field(default=None, description="Right-hand side")


class CheckResult(BaseModel):
    """Outcome of one asserted identity."""

    name: str
    passed: bool
    detail: str | None = None
    counterexample: Counterexample | None = None

    @classmethod
    def ok(cls, name: str, detail: str | None = None) -> "CheckResult":
        return cls(name=name, passed=True, detail=detail)

    @classmethod
    def failed(
        cls, name: str, detail: str | None = None, counterexample: Counterexample | None = None
    ) -> "CheckResult":
        return cls(name=name, passed=False, detail=detail, counterexample=counterexample)


class SuiteReport(BaseModel):
    """Report envelope of one command run on one structure file."""

    command: str
    structure: str
    status: str = Field(default=ReportStatus.PASS, description="pass when every check holds")
    checks: list[CheckResult] = Field(default_factory=list)
    data: dict[str, Any] = Field(default_factory=dict, description="Computed values")

    @classmethod
    def from_checks(
        cls, command: str, structure: str, checks: list[CheckResult], data: dict[str, Any]
    ) -> "SuiteReport":
        status = ReportStatus.PASS if all(c.passed for c in checks) else ReportStatus.FAIL
        return cls(command=command, structure=structure, status=status, checks=checks, data=data)

    @property
    def passed(self) -> bool:
        return self.status == ReportStatus.PASS

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2) + "\n"
