from enum import Enum
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd
from pathlib import Path
from typing import Any, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

from pydantic import BaseModel


def is_primitive(vector: Sequence[int]) -> bool:
    """Return True if the gcd of the entries is 1."""
    return reduce(gcd, (abs(x) for x in vector), 0) == 1


def index_subsets(n: int, sizes: Iterable[int] = ()) -> Iterator[Tuple[int, ...]]:
    """Yield 1-based index subsets of {1..n}, by size and then lexicographically.

    If `sizes` is empty, all nonempty subsets are yielded.
    """
    for k in sizes or range(1, n + 1):
        yield from combinations(range(1, n + 1), k)


def json_pointer(loc: Sequence[Union[str, int]]) -> str:
    """Turn a pydantic error location into a JSON pointer (RFC 6901)."""
    parts = [str(p).replace("~", "~0").replace("/", "~1") for p in loc]
    return "/" + "/".join(parts) if parts else ""


def format_rational(value: Fraction) -> str:
    """`p` for integers, `p/q` otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, places: int = 3) -> str:
    """Round a rational to a fixed number of decimals without going through float."""
    scale = 10**places
    scaled = value * scale
    # round half away from zero
    n = (abs(scaled.numerator) * 2 + scaled.denominator) // (2 * scaled.denominator)
    sign = "-" if scaled < 0 and n != 0 else ""
    whole, frac = divmod(n, scale)
    if places == 0:
        return f"{sign}{whole}"
    text = f"{sign}{whole}.{frac:0{places}d}".rstrip("0").rstrip(".")
    return text


def sign(x: Union[int, Fraction]) -> int:
    return (x > 0) - (x < 0)


def extended_gcd(values: Sequence[int]) -> Tuple[int, List[int]]:
    """Return (g, x) with g = gcd(values) >= 0 and sum(x_i * values_i) == g."""
    g, coeffs = 0, [0] * len(values)
    for i, v in enumerate(values):
        # extend the running combination with one more value
        old_r, r = g, v
        old_s, s = 1, 0
        old_t, t = 0, 1
        while r != 0:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        coeffs = [c * old_s for c in coeffs]
        coeffs[i] = old_t
        g = old_r
    if g < 0:
        g = -g
        coeffs = [-c for c in coeffs]
    return g, coeffs


def jsonable(value: Any) -> Any:
    """Convert models, enums and exact numbers into plain JSON values.

    Integral rationals become integers and the rest `"p/q"` strings, so that
    reports can be read back exactly.
    """
    if isinstance(value, BaseModel):
        return {k: jsonable(v) for k, v in value.dict().items()}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else format_rational(value)
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, Mapping):
        return {str(jsonable(k)): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")
