"""Request and response bodies for the HTTP service."""

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class ProblemRequest(BaseModel):
    """A problem document, inline, or the name of a fixture file."""

    problem: Optional[dict] = None
    fixture: Optional[str] = None
    tolerance: Optional[float] = Field(default=None, gt=0)
    grid: Optional[int] = Field(default=None, ge=3)


class KGroupsRequest(ProblemRequest):
    alg: Optional[str] = None


class RelativeRequest(ProblemRequest):
    hom: Optional[str] = None


class SixTermRequest(ProblemRequest):
    ladder: Optional[str] = None


class BoundaryRequest(ProblemRequest):
    ladder: Optional[str] = None
    map: Literal["index", "exp"] = "index"
    triple: Optional[str] = None


class VerifyRequest(ProblemRequest):
    triple: Optional[str] = None
    certificate: Optional[str] = None


class Report(BaseModel):
    format: int = 1
    command: str
    exit_code: int
    ok: bool
    text: list[str]
    results: dict[str, Any]
