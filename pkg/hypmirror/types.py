from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Any, Callable, Dict, Iterator, List, Tuple, Union

JSONType = Union[Dict[str, Any], List[Any]]

IntVector = Tuple[int, ...]
RationalVector = Tuple[Fraction, ...]
Label = Tuple[int, ...]
"""A chamber label: one monomial index per tropical hyperplane (0 is the constant)."""


class NonExactLiteralError(ValueError):
    """Raised by the `Rational` validator for inputs that are not exact."""

    code = "nonexactliteral"


def parse_rational(value: Any) -> Fraction:
    """Parse an exact rational number.

    Accepted forms are integers, `[p, q]` integer pairs, `"p/q"` strings and
    decimal strings such as `"0.1"`. Floats are rejected, since a binary float
    cannot be read back as the rational the user wrote.

    Parameters
    ----------
    value : Any
        The raw value.

    Returns
    -------
    Fraction
        The parsed value.

    Raises
    ------
    NonExactLiteralError
        The value is a float.
    ValueError
        The value is not a rational in any accepted form.
    """
    if isinstance(value, bool):
        raise ValueError("booleans are not rational numbers")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise NonExactLiteralError(
            f"non-exact numeric literal {value!r}; write it as a string or [p, q] pair"
        )
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            try:
                return Fraction(text)
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"invalid rational {value!r}") from e
        try:
            # Decimal rejects forms like "1_000" that Fraction would accept
            dec = Decimal(text)
        except InvalidOperation as e:
            raise ValueError(f"invalid decimal string {value!r}") from e
        if not dec.is_finite():
            raise ValueError(f"invalid decimal string {value!r}")
        return Fraction(dec)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        p, q = value
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in (p, q)):
            raise ValueError("rational pairs must hold two integers")
        if q == 0:
            raise ValueError("rational pair has zero denominator")
        return Fraction(p, q)
    raise ValueError(f"cannot read {value!r} as a rational number")


class Rational(Fraction):
    """Pydantic field type for exact rationals (see `parse_rational`)."""

    @classmethod
    def __get_validators__(cls) -> Iterator[Callable[[Any], Fraction]]:
        yield parse_rational

    @classmethod
    def __modify_schema__(cls, field_schema: Dict[str, Any]) -> None:
        field_schema.update(
            anyOf=[
                {"type": "integer"},
                {"type": "string", "pattern": r"^-?\d+(/\d+|\.\d+)?$"},
                {
                    "type": "array",
                    "items": {"type": "integer"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            ]
        )
