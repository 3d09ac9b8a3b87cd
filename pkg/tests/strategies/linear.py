from fractions import Fraction
from typing import Tuple

from hypothesis import strategies as st

from hypmirror.linalg import IntMatrix, LinearSystem

rational_strategy = st.builds(
    Fraction,
    st.integers(min_value=-20, max_value=20),
    st.integers(min_value=1, max_value=6),
)


def rational_vector_strategy(dimension: int) -> st.SearchStrategy:
    return st.tuples(*[rational_strategy] * dimension)


small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def int_matrix_strategy(draw, max_rows: int = 3, max_cols: int = 4) -> IntMatrix:
    rows = draw(st.integers(min_value=1, max_value=max_rows))
    cols = draw(st.integers(min_value=1, max_value=max_cols))
    entries = draw(
        st.lists(
            st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows
        )
    )
    return IntMatrix(entries=entries)


def _constraint(dimension: int) -> st.SearchStrategy:
    return st.tuples(
        st.tuples(*[small_ints.map(Fraction)] * dimension), rational_strategy
    )


@st.composite
def linear_system_strategy(draw, max_dimension: int = 3) -> LinearSystem:
    dimension = draw(st.integers(min_value=1, max_value=max_dimension))
    return LinearSystem(
        dimension=dimension,
        equalities=draw(st.lists(_constraint(dimension), max_size=1)),
        strict=draw(st.lists(_constraint(dimension), max_size=3)),
        non_strict=draw(st.lists(_constraint(dimension), max_size=2)),
    )


positive_rational_strategy = st.builds(
    Fraction,
    st.integers(min_value=1, max_value=20),
    st.integers(min_value=1, max_value=6),
)


@st.composite
def feasible_system_strategy(draw, max_dimension: int = 5) -> Tuple[LinearSystem, Tuple]:
    """A system together with a rational point satisfying it."""
    dimension = draw(st.integers(min_value=1, max_value=max_dimension))
    point = draw(rational_vector_strategy(dimension))
    coefficients = st.tuples(*[small_ints.map(Fraction)] * dimension)

    def value(a: Tuple[Fraction, ...]) -> Fraction:
        return sum((c * x for c, x in zip(a, point)), Fraction(0))

    equalities = [(a, value(a)) for a in draw(st.lists(coefficients, max_size=2))]
    strict = [
        (a, value(a) + draw(positive_rational_strategy))
        for a in draw(st.lists(coefficients, max_size=4))
    ]
    non_strict = [
        (a, value(a) + draw(st.sampled_from([Fraction(0), Fraction(1, 2)])))
        for a in draw(st.lists(coefficients, max_size=3))
    ]
    system = LinearSystem(
        dimension=dimension, equalities=equalities, strict=strict, non_strict=non_strict
    )
    return system, point
