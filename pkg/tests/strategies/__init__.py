from fractions import Fraction

from hypothesis import strategies as st

from .arrangement import hypertoric_data_strategy
from .linear import (
    feasible_system_strategy,
    int_matrix_strategy,
    linear_system_strategy,
    rational_strategy,
    rational_vector_strategy,
)
from .symbolic import exponent_dict_strategy, laurent_terms_strategy


def init_strategies():
    st.register_type_strategy(Fraction, rational_strategy)
