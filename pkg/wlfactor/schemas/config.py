from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, field_validator


DEFAULT_CANDIDATE_QS = ["0,0,1", "0,0,0,1", "1,1", "2,1", "1,0,1", "0,1,0,1"]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    oracle_bound: int = Field(default=10**6, ge=2)
    dimension_ceiling: int = Field(default=256, ge=1)
    nonresidue_scan_constant: int = Field(default=4, ge=1)
    allow_full_nonresidue_scan: bool = False
    # Coefficients of q, constant first, as accepted by --poly.
    candidate_qs: list[str] = Field(default_factory=lambda: list(DEFAULT_CANDIDATE_QS))
    max_candidates: int = Field(default=4, ge=0)
    max_recursion_depth: int = Field(default=2, ge=1)
    verify: bool = False
    record_timings: bool = False

    @field_validator("candidate_qs")
    @classmethod
    def _coefficient_lists(cls, value: list[str]) -> list[str]:
        cleaned = []
        for item in value:
            parts = [part.strip() for part in item.split(",")]
            if not parts or any(not part.lstrip("-").isdigit() for part in parts):
                raise ValueError(f"Candidate q {item!r} must be comma-separated integers.")
            cleaned.append(",".join(parts))
        return cleaned
