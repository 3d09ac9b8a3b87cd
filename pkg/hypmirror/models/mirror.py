from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, validator

from ..types import Label


class End(str, Enum):
    minus = "minus"
    plus = "plus"


class RelativeClass(BaseModel):
    """A relative class in the basis (beta-_j, beta+_j, alpha_k)."""

    minus: List[int] = Field(..., description="Coefficients of beta-_1..beta-_d.")
    plus: List[int] = Field(..., description="Coefficients of beta+_1..beta+_d.")
    alpha: List[int] = Field(..., description="Coefficients of alpha_1..alpha_n.")

    @validator("plus")
    def _same_rank(cls, v: List[int], values: dict) -> List[int]:
        if "minus" in values and len(v) != len(values["minus"]):
            raise ValueError("minus and plus must have the same length")
        return v


class DiscClass(BaseModel):
    """A Maslov index 2 class beta^end_j + sum of the chosen alpha_k."""

    divisor: int = Field(..., description="The direction j in 1..d.")
    end: End
    alphas: List[int] = Field(default_factory=list, description="Indices k with delta_k = 1.")
    homology: List[int] = Field(
        ..., description="Coefficients over (beta_1..beta_d, alpha_1..alpha_n)."
    )
    rank: int = Field(..., description="The rank d.")

    def to_relative(self) -> RelativeClass:
        beta = self.homology[: self.rank]
        alpha = self.homology[self.rank :]
        zeros = [0] * self.rank
        if self.end is End.minus:
            return RelativeClass(minus=beta, plus=zeros, alpha=alpha)
        return RelativeClass(minus=zeros, plus=beta, alpha=alpha)

    @property
    def name(self) -> str:
        sign = "-" if self.end is End.minus else "+"
        parts = [f"b{sign}{self.divisor}"] + [f"a{k}" for k in self.alphas]
        return "+".join(parts)


class MirrorEquation(BaseModel):
    direction: int
    indices: List[int] = Field(..., description="The set of k with u_k nonzero in direction j.")
    lhs: str
    factors: List[str]
    expanded: Dict = Field(..., description="The right-hand side as structured JSON.")

    def to_string(self) -> str:
        return f"{self.lhs} = " + "*".join(f"({f})" for f in self.factors)


class PeriodLocus(BaseModel):
    index: int
    equation: str


class PeriodSupport(BaseModel):
    loci: List[PeriodLocus]
    note: str = Field(
        "support computed from 1+Z_k = 0, not from q_i*Z_i^lambda_i = -1",
        description="Which form of the support equations was used.",
    )


class PointVerdict(str, Enum):
    smooth = "SMOOTH_POINT"
    singular = "SINGULAR_POINT"


class SingularPointResult(BaseModel):
    verdict: PointVerdict
    rank: int
    jacobian: List[List[str]]


class Chart(BaseModel):
    id: str
    kind: str = Field(..., description="`chamber` or `stratum`.")
    variables: List[str]
    relations: List[str]


class ChamberTransition(BaseModel):
    """The wall-crossing map between two adjacent chamber charts.

    `exponents[j][k]` is the exponent of (1+Z_k) multiplying U_j; V_j gets
    the opposite exponent and Z is unchanged.
    """

    source: Label
    target: Label
    exponents: Dict[int, Dict[int, int]]

    def reversed(self) -> "ChamberTransition":
        return ChamberTransition(
            source=self.target,
            target=self.source,
            exponents={j: {k: -e for k, e in ek.items()} for j, ek in self.exponents.items()},
        )


class StratumEmbedding(BaseModel):
    """The open embedding of a chamber chart into a stratum chart."""

    chamber: Label
    stratum: str
    x_exponents: Dict[str, List[int]] = Field(..., description="U-exponents of each x variable.")
    wall_factors: Dict[str, int] = Field(
        ..., description="Tied hyperplane whose wall factor multiplies x, or 0."
    )
    y_exponents: Dict[str, List[int]]


class CheckResult(BaseModel):
    name: str
    passed: bool
    checked: int = 0
    failures: List[str] = Field(default_factory=list)


class AtlasReport(BaseModel):
    checks: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)


class VolumeFormResult(BaseModel):
    source: Label
    target: Label
    sign: Optional[int] = Field(None, description="+1 or -1, None on failure.")
    residual: str = "0"


class SymplecticResidual(BaseModel):
    source: Label
    target: Label
    residual: str
    vanishes: bool
