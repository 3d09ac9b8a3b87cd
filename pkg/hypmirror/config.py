import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple, Type, TypeVar, Union

from loguru import logger
from pydantic import BaseModel, Field, ValidationError, root_validator, validator

from .exceptions import ConfigError, NonExactLiteral
from .models.arrangement import GaussianRational
from .types import Rational, parse_rational
from .utils import json_pointer, jsonable

T = TypeVar("T", bound=BaseModel)


class Task(str, Enum):
    check = "check"
    circuits = "circuits"
    chambers = "chambers"
    strata = "strata"
    mirror = "mirror"
    atlas = "atlas"
    verify = "verify"
    multiplicative = "multiplicative"
    periods = "periods"


class PointValue(str):
    """A point coordinate: a parameter name such as `q3`, or an exact rational."""

    @classmethod
    def __get_validators__(cls) -> Iterator[Callable[[Any], Union[str, Fraction]]]:
        yield cls.validate

    @classmethod
    def validate(cls, value: Any) -> Union[str, Fraction]:
        if isinstance(value, str) and value[:1].isalpha():
            return value
        return parse_rational(value)


class KahlerConfig(BaseModel):
    mode: str = Field("formal", description="`formal` or `numeric`.")
    values: Dict[str, Rational] = Field(
        default_factory=dict, description="Parameter values in (0, 1) for numeric mode."
    )

    @validator("mode")
    def _known_mode(cls, v: str) -> str:
        if v not in ("formal", "numeric"):
            raise ValueError("mode must be 'formal' or 'numeric'")
        return v

    @root_validator(skip_on_failure=True)
    def _values_in_range(cls, values: dict) -> dict:
        if values["mode"] == "numeric":
            for name, q in values["values"].items():
                if not 0 < q < 1:
                    raise ValueError(f"Kähler value {name} = {q} is not in (0, 1)")
        return values

    @property
    def numeric(self) -> Optional[Dict[str, Fraction]]:
        return dict(self.values) if self.mode == "numeric" else None


class InputConfig(BaseModel):
    d: Optional[int] = Field(None, description="Rank; inferred from u when omitted.")
    n: Optional[int] = Field(None, description="Vector count; inferred from u when omitted.")
    u: List[List[int]] = Field(..., description="The vectors u_1..u_n as rows.")
    lambda_r: List[Rational] = Field(..., alias="lambdaR")
    constants: Optional[List[Rational]] = Field(
        None, description="Tropical constants, one per vector."
    )
    lambda_c: Optional[List[GaussianRational]] = Field(None, alias="lambdaC")
    kahler: KahlerConfig = Field(default_factory=KahlerConfig)

    class Config:
        allow_population_by_field_name = True

    @validator("u")
    def _nonempty(cls, v: List[List[int]]) -> List[List[int]]:
        if not v:
            raise ValueError("at least one vector is required")
        if any(len(row) != len(v[0]) for row in v):
            raise ValueError("all vectors must have the same length")
        return v

    @root_validator(skip_on_failure=True)
    def _consistent(cls, values: dict) -> dict:
        u = values["u"]
        if values.get("d") is not None and values["d"] != len(u[0]):
            raise ValueError(f"d = {values['d']} does not match vectors of length {len(u[0])}")
        if values.get("n") is not None and values["n"] != len(u):
            raise ValueError(f"n = {values['n']} does not match {len(u)} vectors")
        for name in ("lambda_r", "constants", "lambda_c"):
            if values.get(name) is not None and len(values[name]) != len(u):
                raise ValueError(f"{name} must have one entry per vector")
        return values


class OutputConfig(BaseModel):
    directory: Optional[Path] = None
    format: str = "json"
    svg: bool = False

    @validator("format")
    def _known_format(cls, v: str) -> str:
        if v not in ("json", "text"):
            raise ValueError("format must be 'json' or 'text'")
        return v


class RenderConfig(BaseModel):
    width: int = Field(400, gt=0)
    height: int = Field(400, gt=0)
    margin: int = Field(20, ge=0)


class AtlasMutation(BaseModel):
    edge: Tuple[List[int], List[int]]
    direction: int


class MonomialSpec(BaseModel):
    z: List[int]
    w: List[int]


class OptionsConfig(BaseModel):
    gauge: str = "fixed"
    atlas_mutation: Optional[AtlasMutation] = Field(None, alias="atlasMutation")
    phi_signs: Dict[int, int] = Field(default_factory=dict, alias="phiSigns")
    chamber: Optional[str] = Field(
        None, description="Sign vector of the real chamber for the cotangent complement."
    )
    points: List[Dict[str, PointValue]] = Field(
        default_factory=list, description="Points for the singular point check."
    )
    monomials: List[MonomialSpec] = Field(default_factory=list)

    class Config:
        allow_population_by_field_name = True

    @validator("gauge")
    def _known_gauge(cls, v: str) -> str:
        if v not in ("fixed", "formal"):
            raise ValueError("gauge must be 'fixed' or 'formal'")
        return v

    @validator("phi_signs")
    def _unit_signs(cls, v: Dict[int, int]) -> Dict[int, int]:
        if any(s not in (-1, 1) for s in v.values()):
            raise ValueError("phi signs must be +1 or -1")
        return v


class JobConfig(BaseModel):
    input: InputConfig
    tasks: List[Task] = Field(default_factory=list)
    output: OutputConfig = Field(default_factory=OutputConfig)
    render: RenderConfig = Field(default_factory=RenderConfig)
    options: OptionsConfig = Field(default_factory=OptionsConfig)


def construct_model(cls: Type[T], data: Any) -> T:
    """Validate `data` as `cls`, turning validation errors into `ConfigError`.

    The error points at the first failing location as a JSON pointer.
    """
    try:
        return cls.parse_obj(data)
    except ValidationError as e:
        first = e.errors()[0]
        pointer = json_pointer(first["loc"])
        logger.error("Failed to construct {} at {}: {}", cls.__name__, pointer or "/", first["msg"])
        error = NonExactLiteral if first["type"].endswith("nonexactliteral") else ConfigError
        raise error(f"{pointer or '/'}: {first['msg']}", pointer) from e


def parse_config(text: str) -> JobConfig:
    """Parse a JSON job configuration.

    Raises
    ------
    ConfigError
        The text is not JSON or does not match the schema.
    NonExactLiteral
        A number was written as a JSON float.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        logger.error("Config is not valid JSON: {}", e)
        raise ConfigError(f"invalid JSON: {e}", "") from e
    return construct_model(JobConfig, data)


def load_config(path: Union[str, Path]) -> JobConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def save_config(path: Union[str, Path], config: JobConfig, overwrite: bool = False) -> None:
    """Save a job configuration as JSON.

    Raises
    ------
    FileExistsError
        A file with the given path already exists, and `overwrite` is `False`.
    """
    p = Path(path)
    if p.exists() and not overwrite:
        raise FileExistsError(f"File {p} already exists")
    with open(p, "w", encoding="utf-8") as f:
        json.dump(jsonable(config.dict(by_alias=True, exclude_none=True)), f, indent=4)


def config_schema() -> Dict[str, Any]:
    return JobConfig.schema(by_alias=True)
