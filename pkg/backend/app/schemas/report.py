"""
diffset toolkit - Report Schemas
One VerificationReport per instance, serialized as one JSON line.
"""
from typing import Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

PassValue = Union[Literal["informational"], bool]


def to_plain(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays and tuples to JSON-friendly values"""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_plain(v) for v in items]
    return value


class VerificationReport(BaseModel):
    """Outcome of one verification instance"""

    model_config = ConfigDict(populate_by_name=True)

    suite: str = Field(..., description="Suite identifier (e.g. covm, weil)")
    instance: dict[str, Any] = Field(..., description="Serialized inputs: q, set literals, seed")
    claim: str = Field(..., description="Inequality or identity being checked")
    lhs: Optional[Union[int, float]] = Field(None, description="Observed side")
    rhs: Optional[Union[int, float]] = Field(None, description="Bound side")
    passed: PassValue = Field(..., alias="pass", description="True/False or 'informational'")
    witness: Optional[Any] = Field(None, description="Certificate, e.g. a covering set")
    details: dict[str, Any] = Field(default_factory=dict, description="Auxiliary values")
    seed: Optional[int] = Field(None, description="Per-instance seed, when random")
    runtime_ms: Optional[int] = Field(None, description="Wall time, only with --timings")

    @field_validator("lhs", "rhs", "passed", mode="before")
    @classmethod
    def plain_number(cls, v: Any) -> Any:
        return v.item() if isinstance(v, np.generic) else v

    @field_validator("instance", "details", "witness", mode="before")
    @classmethod
    def plain_container(cls, v: Any) -> Any:
        return to_plain(v)

    @property
    def failed(self) -> bool:
        """Assertion-grade failure (informational rows never fail)"""
        return self.passed is False

    def to_json_line(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True)

    def csv_row(self) -> dict[str, Any]:
        """Flat row for --csv: instance and details fields become columns"""
        row: dict[str, Any] = {"suite": self.suite, "claim": self.claim}
        row.update(self.instance)
        row.update({"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed})
        for key, value in self.details.items():
            if not isinstance(value, (dict, list)):
                row[key] = value
        return row
