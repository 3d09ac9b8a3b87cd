from hypothesis import strategies as st

from hypmirror.arrangement import load_and_normalize
from hypmirror.models.arrangement import HypertoricData

unit_entries = st.integers(min_value=-1, max_value=1)
small_offsets = st.integers(min_value=-2, max_value=2)


@st.composite
def hypertoric_data_strategy(draw, max_d: int = 4, max_n: int = 8) -> HypertoricData:
    """Normalized data: the standard basis followed by nonzero {-1, 0, 1} vectors."""
    d = draw(st.integers(min_value=1, max_value=max_d))
    n = draw(st.integers(min_value=d + 1, max_value=max(d + 1, min(max_n, d + 4))))
    basis = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    extra = draw(
        st.lists(
            st.tuples(*[unit_entries] * d).filter(any),
            min_size=n - d,
            max_size=n - d,
        )
    )
    lambda_r = draw(st.lists(small_offsets, min_size=n, max_size=n))
    constants = draw(st.lists(small_offsets, min_size=n, max_size=n))
    return load_and_normalize(basis + extra, lambda_r, constants)
