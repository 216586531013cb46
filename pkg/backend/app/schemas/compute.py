"""
diffset toolkit - Compute and Search Schemas
Inputs of single computations and the results of compute/search commands.
"""
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .report import PassValue, to_plain


class ComputeRequest(BaseModel):
    """Inputs of one computation; which fields are needed depends on the quantity"""

    q: Optional[int] = Field(None, description="Modulus (the prime p for bohr and legendre)")
    A: Optional[str] = Field(None, description="Set literal")
    B: Optional[str] = Field(None, description="Set literal")
    S: Optional[str] = Field(None, description="Set literal to cover")
    kind: str = Field("times", description="Cover kind: plus/additive or times/multiplicative")
    lam: int = Field(1, description="Kloosterman lambda")
    r: int = Field(1, description="Kloosterman r")
    a: int = Field(1, description="Numerator of the Legendre symbol")
    gamma: list[int] = Field(default_factory=list, description="Bohr frequencies")
    epsilon: Optional[float] = Field(None, description="Regularization / Bohr epsilon")
    M: Optional[float] = Field(None, description="Regularization / Q1 threshold")
    mode: Literal["full", "units"] = Field("full", description="Two-dimensional minimal_d mode")
    form: Literal["product", "squarediff"] = Field("product", description="Value form")
    sets: list[str] = Field(default_factory=list, description="Set literals for intersection covers")
    seed: int = Field(0, ge=0, description="Seed for sampled shifts")
    row: Optional[str] = Field(None, description="A verify row (JSON line) to recompute")


class ComputeResult(BaseModel):
    """
    Exact value of one quantity with its certificate.

    Quantities that re-evaluate a verify claim also carry claim, rhs and
    pass, with value in the lhs position.
    """

    model_config = ConfigDict(populate_by_name=True)

    quantity: str
    instance: dict[str, Any]
    value: Any
    witness: Optional[Any] = None
    details: dict[str, Any] = Field(default_factory=dict)
    claim: Optional[str] = None
    rhs: Optional[Union[int, float]] = None
    passed: Optional[PassValue] = Field(None, alias="pass")

    @field_validator("instance", "value", "witness", "details", "rhs", "passed", mode="before")
    @classmethod
    def plain(cls, v: Any) -> Any:
        return to_plain(v)

    def to_json_line(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True)


class SearchResult(BaseModel):
    """Best instance found by a hill-climb"""

    objective: str
    q: int
    instance: dict[str, Any]
    value: Optional[int] = Field(None, description="Objective at the best instance")
    ratio: Optional[float] = Field(None, description="Value relative to the bound it is measured against")
    verified: bool = Field(..., description="Value recomputed from scratch at the end")
    budget: int
    improvements: int = 0
    seed: int

    def to_json_line(self) -> str:
        return self.model_dump_json(exclude_none=True)
