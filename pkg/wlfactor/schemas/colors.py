from __future__ import annotations

from pydantic import BaseModel, Field, field_validator


class ColorDump(BaseModel):
    id: int = Field(ge=0)
    signature: list[int] | None = None
    transpose_id: int = Field(ge=0)
    # coefficients[k][a] is the coefficient of y^k x^a.
    coefficients: list[list[int]]

    @field_validator("signature")
    @classmethod
    def _bits_only(cls, value: list[int] | None) -> list[int] | None:
        if value is not None and any(bit not in (0, 1) for bit in value):
            raise ValueError("Signature bits must be 0 or 1.")
        return value


class ProductEntry(BaseModel):
    left: int
    right: int
    terms: list[tuple[int, int]] = Field(default_factory=list)


class ColorSetDump(BaseModel):
    p: int = Field(ge=3)
    f: list[int]
    identity_id: int | None = None
    colors: list[ColorDump]
    rounds: int | None = None
    product_table: list[ProductEntry] = Field(default_factory=list)
