from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field


class StageReport(BaseModel):
    name: str
    outcome: str
    timing_ms: float | None = None
    artifacts: dict[str, Any] = Field(default_factory=dict)


class CertificateReport(BaseModel):
    kind: Literal["thin_scheme", "scheme", "ceiling_abort"]
    component: str
    colors: int | None = None
    primitive: bool | None = None
    reduction_trail: list[str] = Field(default_factory=list)
    detail: str = ""


class FactorReport(BaseModel):
    p: int
    input: str
    normalized: str
    outcome: Literal["full_factorization", "partial", "stalled"]
    stages: list[StageReport] = Field(default_factory=list)
    factors: list[str] = Field(default_factory=list)
    stalled: list[str] = Field(default_factory=list)
    certificates: list[CertificateReport] = Field(default_factory=list)


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class VerificationReport(BaseModel):
    p: int
    f: str
    roots: list[int] = Field(default_factory=list)
    outcome: str | None = None
    factors: list[str] = Field(default_factory=list)
    checks: list[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


class BatchFailure(BaseModel):
    line: int
    error: str
    message: str


class SweepSummary(BaseModel):
    seed: int
    instances: int = 0
    outcomes: dict[str, int] = Field(default_factory=dict)
    failed_checks: dict[str, int] = Field(default_factory=dict)
    reached_wl: int = 0


class BatchReport(BaseModel):
    reports: list[FactorReport] = Field(default_factory=list)
    failures: list[BatchFailure] = Field(default_factory=list)


class StageFactor(BaseModel):
    stage: str
    factor: str
