from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from .models import Group


class SimConfig(BaseModel):
    N: int = Field(..., ge=1)
    t: float = Field(..., ge=0)
    steps: int = Field(100, ge=1)
    samples: int = Field(10_000, ge=1)
    seed: int = 0
    raw_time: bool = False
    scheme: Literal["geometric-euler"] = "geometric-euler"
    chunk_size: Optional[int] = Field(None, ge=1)
    threads: Optional[int] = Field(None, ge=1)
    trace_path: Optional[str] = None

    @property
    def horizon(self) -> float:
        """Time actually run: t/N unless ``raw_time`` is set."""
        return self.t if self.raw_time else self.t / self.N

    @property
    def delta(self) -> float:
        return self.horizon / self.steps


class SimResult(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    mean: float
    mean_imag: float = 0.0
    stderr: float = Field(..., ge=0)
    samples: int = Field(..., ge=1)


class CheckResult(SimResult):
    exact: float
    sigmas_away: float

    def within(self, sigmas: float = 3.0) -> bool:
        return abs(self.sigmas_away) <= sigmas


class EvaluationResult(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    label: str
    group: Group
    N: float
    t: float
    value: float
    error_bound: float = 0.0
    d_max: Optional[int] = None
    extrapolated: bool = False
    method: Literal["expansion", "fourier", "closed-form", "limit"] = "expansion"


class TableResult(BaseModel):
    name: str
    columns: list[str]
    rows: list[list[Union[int, float, str]]]


class CasimirReport(BaseModel):
    model_config = ConfigDict(from_attributes=True)

    group: Group
    n: int
    N: int
    dimension: int
    holds: bool
    scalar: str
    max_deviation: float
    offending_entry: Optional[list[int]] = None
    lhs: Optional[str] = None
    rhs: Optional[str] = None


class SuiteResult(BaseModel):
    name: str
    passed: bool
    checks: int = 0
    failures: list[str] = Field(default_factory=list)
    details: dict[str, float] = Field(default_factory=dict)


class RunManifest(BaseModel):
    tool: str = "heatwalk"
    version: str
    command: str
    arguments: dict[str, Any] = Field(default_factory=dict)
    created: str
    seed: Optional[int] = None


class ValueResult(BaseModel):
    name: str
    value: Union[int, float, str]
    parameters: dict[str, Any] = Field(default_factory=dict)
