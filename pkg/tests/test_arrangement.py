from fractions import Fraction
from itertools import combinations, product
from typing import List, Optional, Sequence, Type

import pytest
from hypothesis import given
from sympy import Matrix, Rational

from hypmirror.arrangement import (
    check_simple_real,
    check_smooth,
    check_unimodular,
    circuits,
    cotangent_complement,
    load_and_normalize,
    real_chambers,
    real_hyperplanes,
)
from hypmirror.exceptions import (
    EmptyChamber,
    HypmirrorException,
    InputError,
    NonPrimitiveVector,
    NotNormalized,
    NotSpanning,
    NoUnimodularBasis,
    RankDeficient,
    exit_code_for,
)
from hypmirror.linalg import LinearSystem, rational_feasible
from hypmirror.models.arrangement import GaussianRational, HypertoricData, Verdict

from .conftest import CONFIGS, load_named
from .strategies import hypertoric_data_strategy


def test_normalize_tp2(tp2: HypertoricData):
    assert tp2.d == 2
    assert tp2.n == 3
    assert tp2.u == [(1, 0), (0, 1), (-1, -1)]
    assert tp2.a == [[-1, -1]]
    assert tp2.lambda_r == [0, 0, 1]
    assert tp2.trop_const == [0, 0, 5]
    assert tp2.kahler == ["q3"]
    assert tp2.order == [1, 2, 3]
    assert tp2.normalized
    assert tp2.hyperplanes_through(1) == [1, 3]
    assert tp2.support(3) == [1, 2]
    assert tp2.parameter(3) == "q3"
    with pytest.raises(ValueError):
        tp2.parameter(1)


def test_normalize_reorders_to_first_unimodular_basis():
    # (1,1),(1,-1) has determinant -2, so the basis is u1, u3
    h = load_and_normalize([(1, 1), (1, -1), (0, 1)], [0, 0, 0])
    assert h.order == [1, 3, 2]
    assert h.u == [(1, 0), (0, 1), (1, -2)]
    assert h.kahler == ["q3"]


def test_normalize_shifts_lift():
    # same arrangement as T*P^2 in another basis and position
    h = load_and_normalize([(-1, -1), (1, 0), (0, 1)], [1, 0, 0])
    assert h.order == [1, 2, 3]
    assert h.u == [(1, 0), (0, 1), (-1, -1)]
    assert h.lambda_r == [0, 0, 1]


def test_normalize_shifts_complex_lift():
    lc = [GaussianRational(re=1, im=2), GaussianRational(), GaussianRational(re=3)]
    h = load_and_normalize([(1, 0), (0, 1), (-1, -1)], [1, 0, 0], lambda_c=lc)
    # lambda_3 - a_31 lambda_1 - a_32 lambda_2 = 3 + 1 + 2i
    assert h.lambda_c[2] == GaussianRational(re=4, im=2)
    assert h.lambda_c[0] == GaussianRational()
    assert h.lambda_r == [0, 0, 1]


@pytest.mark.parametrize(
    "u, exception",
    [
        ([(2, 0), (0, 1)], NonPrimitiveVector),
        ([(1, 0), (-1, 0)], RankDeficient),
        ([(1, 1), (1, -1)], NotSpanning),
        ([(2, 1), (1, 3), (1, -1)], NoUnimodularBasis),
    ],
)
def test_normalize_errors(u: List[Sequence[int]], exception: Type[Exception]):
    with pytest.raises(exception):
        load_and_normalize(u, [0] * len(u))


def test_non_primitive_vector_payload(caplog: pytest.LogCaptureFixture):
    with pytest.raises(NonPrimitiveVector) as exc_info:
        load_and_normalize([(2, 0), (0, 1)], [0, 0])
    assert exc_info.value.index == 1
    assert exc_info.value.vector == (2, 0)
    assert exit_code_for(exc_info.value) == 2
    assert "not primitive" in caplog.text


def test_not_spanning_payload():
    with pytest.raises(NotSpanning) as exc_info:
        load_and_normalize([(1, 1), (1, -1)], [0, 0])
    assert exc_info.value.invariant == 2
    assert isinstance(exc_info.value, InputError)


@pytest.mark.parametrize("u", [[(1, 1), (1, -1)], [(2, 1), (1, 3), (1, -1)]])
def test_lenient_load_keeps_raw_coordinates(u: List[Sequence[int]]):
    h = load_and_normalize(u, [0] * len(u), strict=False)
    assert not h.normalized
    assert h.u == [tuple(v) for v in u]
    with pytest.raises(NotNormalized):
        circuits(h)


def test_normalize_length_mismatch():
    with pytest.raises(ValueError):
        load_and_normalize([(1,), (-1,)], [0])


def test_real_hyperplanes(tp2: HypertoricData):
    planes = real_hyperplanes(tp2)
    assert [(p.index, p.normal, p.offset) for p in planes] == [
        (1, (1, 0), 0),
        (2, (0, 1), 0),
        (3, (-1, -1), 1),
    ]


def test_check_unimodular(tp2: HypertoricData):
    assert check_unimodular(tp2)
    h = load_and_normalize([(1, 0), (0, 1), (1, 2)], [0, 0, 1])
    cert = check_unimodular(h)
    assert not cert
    assert cert.indices == [1, 3]
    assert cert.determinant == 2


def test_check_simple_real(tp2: HypertoricData, four_line: HypertoricData):
    assert check_simple_real(tp2)
    assert check_simple_real(four_line)
    concurrent = load_and_normalize([(1, 0), (0, 1), (1, 1)], [0, 0, 0])
    cert = check_simple_real(concurrent)
    assert not cert
    assert cert.indices == [1, 2, 3]


@pytest.mark.parametrize("name", ["tp1", "tp2", "tp3", "four_line", "a3"])
def test_check_smooth_named(name: str):
    verdict = check_smooth(load_named(name))
    assert verdict.verdict is Verdict.smooth
    assert verdict.certificate.holds


def test_check_smooth_singular():
    h = load_and_normalize([(1,), (-1,)], [0, 0], [0, 0])
    verdict = check_smooth(h)
    assert verdict.verdict is Verdict.singular
    assert verdict.certificate.indices == [1, 2]


def test_check_smooth_orbifold():
    h = load_and_normalize([(1, 0), (0, 1), (1, 2)], [0, 0, 1])
    verdict = check_smooth(h)
    assert verdict.verdict is Verdict.orbifold
    assert verdict.certificate.indices == [1, 3]
    assert verdict.certificate.determinant == 2


def test_check_smooth_uses_complex_lift():
    # the real lifts of T*P^1 collide, the complex lifts separate them
    lc = [GaussianRational(), GaussianRational(im=1)]
    h = load_and_normalize([(1,), (-1,)], [0, 0], [0, 1], lambda_c=lc)
    assert check_smooth(h).verdict is Verdict.smooth


def _meets(h: HypertoricData, subset: Sequence[int]) -> bool:
    equalities = [(tuple(Fraction(x) for x in h.vector(k)), h.offset(k)) for k in subset]
    return rational_feasible(LinearSystem(dimension=h.d, equalities=equalities)) is not None


def _brute_force_circuits(h: HypertoricData) -> List[List[int]]:
    found = []
    for size in range(1, h.n + 1):
        for subset in combinations(range(1, h.n + 1), size):
            if _meets(h, subset):
                continue
            if all(_meets(h, s) for s in combinations(subset, size - 1)):
                found.append(list(subset))
    return found


@pytest.mark.parametrize("name", ["tp1", "tp2", "tp3", "a3", "four_line"])
def test_circuits_match_brute_force(name: str):
    h = load_named(name)
    found = circuits(h)
    assert [c.support for c in found] == _brute_force_circuits(h)
    for c in found:
        assert c.pairing > 0
        assert sum(h.offset(k) * c.beta[k - 1] for k in c.support) == c.pairing
        for i in range(h.d):
            assert sum(h.vector(k)[i] * c.beta[k - 1] for k in c.support) == 0
        assert sorted(c.plus + c.minus) == c.support


def test_circuits_tp2(tp2: HypertoricData):
    (c,) = circuits(tp2)
    assert c.support == [1, 2, 3]
    assert c.beta == [1, 1, 1]
    assert c.plus == [1, 2, 3]
    assert c.minus == []
    assert c.pairing == 1
    assert c.parameter == {"q3": 1}
    assert c.distinguished == 3


def test_circuits_four_line(four_line: HypertoricData):
    found = circuits(four_line)
    assert [c.support for c in found] == [[2, 4], [1, 2, 3], [1, 3, 4]]
    by_support = {tuple(c.support): c for c in found}
    assert by_support[(2, 4)].parameter_string == "q4"
    assert by_support[(2, 4)].distinguished == 4
    assert by_support[(1, 2, 3)].parameter_string == "q3"
    assert by_support[(1, 2, 3)].distinguished == 3
    assert by_support[(1, 3, 4)].parameter_string == "q3*q4^-1"
    assert by_support[(1, 3, 4)].minus == [4]
    assert by_support[(1, 3, 4)].distinguished is None


def _sign_oracle(h: HypertoricData) -> List[str]:
    found = []
    for signs in product("+-", repeat=h.n):
        rows = []
        for k, s in enumerate(signs, start=1):
            v = tuple(Fraction(x) for x in h.vector(k))
            rows.append((tuple(-x for x in v), -h.offset(k)) if s == "+" else (v, h.offset(k)))
        if rational_feasible(LinearSystem(dimension=h.d, strict=rows)) is not None:
            found.append("".join(signs))
    return found


@pytest.mark.parametrize("name, count", [("tp1", 3), ("tp2", 7), ("a3", 5), ("four_line", 10)])
def test_real_chambers(name: str, count: int):
    h = load_named(name)
    chambers = real_chambers(h)
    assert len(chambers) == count
    assert sorted(c.signs for c in chambers) == sorted(_sign_oracle(h))
    for c in chambers:
        for k, s in enumerate(c.signs, start=1):
            value = sum(Fraction(x) * w for x, w in zip(h.vector(k), c.witness)) - h.offset(k)
            assert (value > 0) == (s == "+")
            assert value != 0


def test_cotangent_complement_tp1(tp1: HypertoricData):
    # the chamber s > 0 of T*P^1
    (component,) = cotangent_complement(tp1, "+-")
    assert component.subset == [2]
    assert component.halfspaces == [(2, "+")]
    assert component.witness == (Fraction(-1),)


def test_cotangent_complement_accepts_sign_sequences(tp1: HypertoricData):
    assert cotangent_complement(tp1, [1, -1]) == cotangent_complement(tp1, "+-")


@pytest.mark.parametrize("signs", ["++", "+", "+x"])
def test_cotangent_complement_empty_chamber(tp1: HypertoricData, signs: str):
    with pytest.raises(EmptyChamber):
        cotangent_complement(tp1, signs)


def test_cotangent_complement_bounded_chamber(tp2: HypertoricData):
    # the bounded triangle of T*P^2 touches every hyperplane and every vertex
    assert "---" in [c.signs for c in real_chambers(tp2)]
    assert cotangent_complement(tp2, "---") == []
    # the open quadrant x, y > 0 misses H3 and both of its vertices
    components = cotangent_complement(tp2, "++-")
    assert [c.subset for c in components] == [[3], [1, 3], [2, 3]]
    assert components[1].halfspaces == [(1, "-"), (3, "+")]


def test_exception_hierarchy():
    assert issubclass(InputError, HypmirrorException)
    assert exit_code_for(RankDeficient(1, 2)) == 2
    assert exit_code_for(HypmirrorException("x")) == 1


def _cofactor_det(rows: List[List[int]]) -> int:
    if not rows:
        return 1
    return sum(
        (-1) ** j * rows[0][j] * _cofactor_det([r[:j] + r[j + 1 :] for r in rows[1:]])
        for j in range(len(rows))
    )


def _consistent(h: HypertoricData, subset: Sequence[int], offsets: Sequence[Fraction]) -> bool:
    # Ax = b is solvable iff rank A = rank (A | b)
    a = Matrix([[Rational(x) for x in h.vector(k)] for k in subset])
    b = Matrix([[Rational(offsets[k - 1].numerator, offsets[k - 1].denominator)] for k in subset])
    return a.rank() == a.row_join(b).rank()


def _subsets(n: int, sizes: Sequence[int]) -> List[Sequence[int]]:
    return [s for size in sizes for s in combinations(range(1, n + 1), size)]


@given(hypertoric_data_strategy())
def test_check_unimodular_matches_minor_oracle(h: HypertoricData):
    dets = {
        s: _cofactor_det([list(h.vector(k)) for k in s]) for s in _subsets(h.n, [h.d])
    }
    cert = check_unimodular(h)
    assert bool(cert) == all(det in (-1, 0, 1) for det in dets.values())
    if not cert:
        assert cert.determinant == dets[tuple(cert.indices)]


@given(hypertoric_data_strategy())
def test_check_simple_real_matches_intersection_oracle(h: HypertoricData):
    simple = all(
        Matrix([list(h.vector(k)) for k in s]).rank() == len(s)
        for s in _subsets(h.n, range(1, h.n + 1))
        if _consistent(h, s, h.lambda_r)
    )
    assert bool(check_simple_real(h)) == simple


@given(hypertoric_data_strategy())
def test_check_smooth_matches_vertex_oracle(h: HypertoricData):
    def meets(s: Sequence[int]) -> bool:
        return _consistent(h, s, h.lambda_r) and _consistent(h, s, h.trop_const)

    if any(meets(s) for s in _subsets(h.n, [h.d + 1])):
        expected = Verdict.singular
    elif any(
        abs(_cofactor_det([list(h.vector(k)) for k in s])) != 1
        for s in _subsets(h.n, [h.d])
        if meets(s)
    ):
        expected = Verdict.orbifold
    else:
        expected = Verdict.smooth
    assert check_smooth(h).verdict is expected
