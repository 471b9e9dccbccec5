from __future__ import annotations

from pydantic import BaseModel, Field, field_validator


class IntersectionTriple(BaseModel):
    p: int = Field(ge=0)
    q: int = Field(ge=0)
    r: int = Field(ge=0)
    value: int = Field(ge=1)


class SchemeDump(BaseModel):
    n: int = Field(ge=1)
    identity_id: int | None = None
    # Dense row-major 0/1 matrices; empty for schemes read off a stable color set.
    colors: list[list[int]] = Field(default_factory=list)
    transpose: list[int] = Field(default_factory=list)
    valencies: list[int] = Field(default_factory=list)
    intersection: list[IntersectionTriple] = Field(default_factory=list)
    primitive: bool | None = None
    closed_subsets: list[list[int]] = Field(default_factory=list)

    @field_validator("colors")
    @classmethod
    def _zero_one(cls, value: list[list[int]]) -> list[list[int]]:
        for row in value:
            if any(entry not in (0, 1) for entry in row):
                raise ValueError("Scheme colors must be 0/1 matrices.")
        return value
