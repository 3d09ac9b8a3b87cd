from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence, Type

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypmirror.models.arrangement import Certificate, Verdict
from hypmirror.types import NonExactLiteralError, parse_rational
from hypmirror.utils import (
    extended_gcd,
    format_decimal,
    format_rational,
    index_subsets,
    is_primitive,
    json_pointer,
    jsonable,
    sign,
)


@pytest.mark.parametrize(
    "vector, expected",
    [
        ((1, 0), True),
        ((2, 3), True),
        ((-1, -1), True),
        ((2, 0), False),
        ((0, 0), False),
        ((4, -6, 8), False),
    ],
)
def test_is_primitive(vector: Sequence[int], expected: bool):
    assert is_primitive(vector) == expected


def test_index_subsets_order():
    assert list(index_subsets(3)) == [
        (1,),
        (2,),
        (3,),
        (1, 2),
        (1, 3),
        (2, 3),
        (1, 2, 3),
    ]
    assert list(index_subsets(4, [3])) == [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]


@pytest.mark.parametrize(
    "loc, expected",
    [
        (("input", "u"), "/input/u"),
        (("input", "lambdaR", 1), "/input/lambdaR/1"),
        (("a/b", "c~d"), "/a~1b/c~0d"),
        ((), ""),
    ],
)
def test_json_pointer(loc: Sequence[Any], expected: str):
    assert json_pointer(loc) == expected


@pytest.mark.parametrize(
    "value, places, expected",
    [
        (Fraction(1, 3), 3, "0.333"),
        (Fraction(2, 3), 3, "0.667"),
        (Fraction(-1, 2), 0, "-1"),
        (Fraction(5, 2), 2, "2.5"),
        (Fraction(1, 8), 2, "0.13"),
        (Fraction(10), 3, "10"),
        (Fraction(0), 3, "0"),
        (Fraction(-7, 4), 1, "-1.8"),
    ],
)
def test_format_decimal(value: Fraction, places: int, expected: str):
    assert format_decimal(value, places) == expected


def test_format_rational():
    assert format_rational(Fraction(3)) == "3"
    assert format_rational(Fraction(-3, 6)) == "-1/2"


def test_sign():
    assert [sign(x) for x in (-5, 0, Fraction(1, 7))] == [-1, 0, 1]


@given(st.lists(st.integers(min_value=-1000, max_value=1000), min_size=1, max_size=5))
def test_extended_gcd(values: Sequence[int]):
    g, coeffs = extended_gcd(values)
    assert g >= 0
    assert sum(c * v for c, v in zip(coeffs, values)) == g
    for v in values:
        if g:
            assert v % g == 0
        else:
            assert v == 0


@pytest.mark.parametrize(
    "value, expected, exception",
    [
        (2, Fraction(2), None),
        ("1/3", Fraction(1, 3), None),
        ("-0.25", Fraction(-1, 4), None),
        ("0.1", Fraction(1, 10), None),
        ([3, 6], Fraction(1, 2), None),
        (Fraction(5, 7), Fraction(5, 7), None),
        (0.5, None, NonExactLiteralError),
        (True, None, ValueError),
        ([1, 0], None, ValueError),
        ("abc", None, ValueError),
        ("1/0", None, ValueError),
        ("inf", None, ValueError),
        ([1.0, 2], None, ValueError),
    ],
)
def test_parse_rational(value: Any, expected: Optional[Fraction], exception: Optional[Type[Exception]]):
    if exception:
        with pytest.raises(exception):
            parse_rational(value)
    else:
        assert parse_rational(value) == expected


def test_nonexact_literal_is_value_error():
    # pydantic reports the error type from the class code
    assert issubclass(NonExactLiteralError, ValueError)
    assert NonExactLiteralError.code == "nonexactliteral"


def test_jsonable():
    data = {
        "a": Fraction(1, 2),
        1: (Fraction(2), Path("x")),
        "verdict": Verdict.smooth,
        "certificate": Certificate(holds=False, indices=[1, 3], determinant=2),
        "flag": True,
        "missing": None,
    }
    assert jsonable(data) == {
        "a": "1/2",
        "1": [2, "x"],
        "verdict": "SMOOTH",
        "certificate": {"holds": False, "indices": [1, 3], "determinant": 2, "reason": ""},
        "flag": True,
        "missing": None,
    }


def test_jsonable_rejects_unknown():
    with pytest.raises(TypeError):
        jsonable(object())


def test_enable_logging():
    from loguru import logger

    from hypmirror import enable_logging, load_and_normalize
    from hypmirror.exceptions import NonPrimitiveVector

    messages = []
    handler_id = logger.add(messages.append, format="{message}")
    try:
        enable_logging()
        with pytest.raises(NonPrimitiveVector):
            load_and_normalize([(2, 0), (0, 1)], [0, 0])
        assert messages
        count = len(messages)
        enable_logging(False)
        with pytest.raises(NonPrimitiveVector):
            load_and_normalize([(2, 0), (0, 1)], [0, 0])
        assert len(messages) == count
    finally:
        logger.remove(handler_id)
        enable_logging(False)
