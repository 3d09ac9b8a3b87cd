from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, root_validator

from ..linalg import IntMatrix
from ..types import Rational


class GaussianRational(BaseModel):
    """A complex number with exact rational parts."""

    re: Rational = Field(Fraction(0), description="Real part.")
    im: Rational = Field(Fraction(0), description="Imaginary part.")

    class Config:
        allow_mutation = False


class HypertoricData(BaseModel):
    """Normalized defining data of a hypertoric variety.

    Vectors are stored in the coordinates of the chosen basis `u_1..u_d`, so
    the first `d` vectors are the standard basis and `u_l = sum_i a_li u_i`.
    Indices are 1-based in every public field; `order` maps positions back to
    the input order.
    """

    d: int = Field(..., description="Rank of the torus quotient.", ge=1)
    n: int = Field(..., description="Number of vectors (hyperplanes).")
    u: List[Tuple[int, ...]] = Field(
        ..., description="The vectors u_1..u_n in normalized coordinates."
    )
    a: List[List[int]] = Field(
        default_factory=list,
        description="Coefficients a_li for l = d+1..n (one row per l).",
    )
    lambda_r: List[Rational] = Field(
        ..., description="Real lift, shifted so that the first d entries are 0."
    )
    lambda_c: Optional[List[GaussianRational]] = Field(
        None, description="Complex lift, shifted like the real lift, if given."
    )
    trop_const: List[Rational] = Field(
        ..., description="Tropical constants, one per hyperplane."
    )
    kahler: List[str] = Field(
        default_factory=list, description="Kähler parameter names q_{d+1}..q_n."
    )
    order: List[int] = Field(
        ..., description="1-based input index of each normalized position."
    )
    normalized: bool = Field(
        True, description="False when the raw coordinates were kept (strict=False)."
    )

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _check_shapes(cls, values: dict) -> dict:
        d, n = values["d"], values["n"]
        if n < d:
            raise ValueError(f"need n >= d, got n={n}, d={d}")
        if len(values["u"]) != n or any(len(v) != d for v in values["u"]):
            raise ValueError("u must hold n vectors of length d")
        for name in ("lambda_r", "trop_const", "order"):
            if len(values[name]) != n:
                raise ValueError(f"{name} must have n = {n} entries")
        if values.get("lambda_c") is not None and len(values["lambda_c"]) != n:
            raise ValueError(f"lambda_c must have n = {n} entries")
        return values

    @property
    def extra(self) -> range:
        """Indices l = d+1..n of the non-basis vectors."""
        return range(self.d + 1, self.n + 1)

    def vector(self, k: int) -> Tuple[int, ...]:
        return self.u[k - 1]

    def coefficients(self, k: int) -> Tuple[int, ...]:
        """Coordinates of u_k in the basis u_1..u_d."""
        return tuple(self.u[k - 1])

    def offset(self, k: int) -> Fraction:
        return self.lambda_r[k - 1]

    def constant(self, k: int) -> Fraction:
        return self.trop_const[k - 1]

    def parameter(self, k: int) -> str:
        """Name of the Kähler parameter attached to u_k (k > d)."""
        if k <= self.d:
            raise ValueError(f"u_{k} is a basis vector and carries no parameter")
        return f"q{k}"

    def support(self, k: int) -> List[int]:
        """Indices i with a nonzero i-th coordinate of u_k."""
        return [i + 1 for i, x in enumerate(self.u[k - 1]) if x]

    def matrix(self) -> IntMatrix:
        """The d x n matrix with the vectors u as columns."""
        return IntMatrix.from_columns(self.u)

    def hyperplanes_through(self, j: int) -> List[int]:
        """The index set of k with u_k having nonzero j-th coordinate."""
        return [k for k in range(1, self.n + 1) if self.u[k - 1][j - 1]]


class RealHyperplane(BaseModel):
    index: int = Field(..., description="1-based hyperplane index.")
    normal: Tuple[int, ...] = Field(..., description="Primitive normal u_i.")
    offset: Rational = Field(..., description="Offset, the hyperplane is <s,u_i> = offset.")


class Certificate(BaseModel):
    """Outcome of a combinatorial check with an optional witness."""

    holds: bool
    indices: List[int] = Field(
        default_factory=list, description="Violating index set (1-based), if any."
    )
    determinant: Optional[int] = Field(None, description="Witness determinant, if any.")
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


class Verdict(str, Enum):
    smooth = "SMOOTH"
    orbifold = "ORBIFOLD"
    singular = "SINGULAR"


class SmoothnessVerdict(BaseModel):
    verdict: Verdict
    certificate: Certificate


class Circuit(BaseModel):
    support: List[int] = Field(..., description="Minimal index set with empty intersection.")
    plus: List[int] = Field(..., description="Indices with positive coefficient in beta.")
    minus: List[int] = Field(..., description="Indices with negative coefficient in beta.")
    beta: List[int] = Field(..., description="Primitive class in Z^n, oriented by the lift.")
    pairing: Rational = Field(..., description="lambda_R . beta (always positive).")
    parameter: Dict[str, int] = Field(
        default_factory=dict,
        description="q^beta as exponents of the distinguished parameters.",
    )
    distinguished: Optional[int] = Field(
        None, description="l if this is the circuit of the relation u_l = sum a_li u_i."
    )

    @property
    def parameter_string(self) -> str:
        parts = []
        for name, e in self.parameter.items():
            parts.append(name if e == 1 else f"{name}^{e}")
        return "*".join(parts) or "1"


class RealChamber(BaseModel):
    signs: str = Field(..., description="One of '+'/'-' per hyperplane.")
    witness: Tuple[Rational, ...]


class ComplementComponent(BaseModel):
    """A component V_J of the complement of the cotangent bundle."""

    subset: List[int]
    halfspaces: List[Tuple[int, str]] = Field(
        ..., description="(j, sign) pairs cutting out Delta_J, signs flipped from the chamber."
    )
    witness: Tuple[Rational, ...] = Field(
        ..., description="A point of the intersection of the hyperplanes in J."
    )
