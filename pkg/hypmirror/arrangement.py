"""The hypertoric data model and real hyperplane arrangement combinatorics."""
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from loguru import logger
from sympy import Matrix

from .exceptions import (
    DegenerateLift,
    EmptyChamber,
    NonPrimitiveVector,
    NoUnimodularBasis,
    NotNormalized,
    NotSpanning,
    RankDeficient,
)
from .linalg import (
    IntMatrix,
    LinearSystem,
    kernel_lattice,
    rank,
    rational_feasible,
    smith_invariants,
    square_minors,
)
from .models.arrangement import (
    Certificate,
    Circuit,
    ComplementComponent,
    GaussianRational,
    HypertoricData,
    RealChamber,
    RealHyperplane,
    SmoothnessVerdict,
    Verdict,
)
from .types import RationalVector
from .utils import index_subsets, is_primitive, sign

RawVector = Sequence[int]


def load_and_normalize(
    u: Sequence[RawVector],
    lambda_r: Sequence[Fraction],
    constants: Optional[Sequence[Fraction]] = None,
    lambda_c: Optional[Sequence[GaussianRational]] = None,
    strict: bool = True,
) -> HypertoricData:
    """Validate raw input vectors and rewrite them in a unimodular basis.

    The first d-subset of vectors (in lexicographic order) with determinant
    +-1 is moved to the front, keeping the relative order of the rest, and all
    vectors are expressed in that basis. Both lifts are translated so that
    their first d entries vanish. Tropical constants are only reordered.

    Parameters
    ----------
    u : Sequence[RawVector]
        The n integer vectors in Z^d.
    lambda_r : Sequence[Fraction]
        Real lift, one entry per vector.
    constants : Optional[Sequence[Fraction]]
        Tropical constants, one per vector. Defaults to zeros.
    lambda_c : Optional[Sequence[GaussianRational]]
        Complex lift, one entry per vector.
    strict : bool
        If False, spanning and basis failures are tolerated and the raw
        coordinates are kept (`normalized=False`).

    Returns
    -------
    HypertoricData
        The normalized data.

    Raises
    ------
    NonPrimitiveVector
        Some vector has gcd of entries > 1.
    RankDeficient
        The vectors do not span Q^d.
    NotSpanning
        The vectors span a proper sublattice of Z^d (strict mode).
    NoUnimodularBasis
        No d of the vectors form a Z-basis (strict mode).
    """
    if not u:
        raise RankDeficient(0, 0)
    d, n = len(u[0]), len(u)
    if d < 1 or any(len(v) != d for v in u):
        raise ValueError("all vectors must have the same positive length")
    for name, values in (("lambda_r", lambda_r), ("constants", constants), ("lambda_c", lambda_c)):
        if values is not None and len(values) != n:
            raise ValueError(f"{name} must have {n} entries, got {len(values)}")
    for i, v in enumerate(u, start=1):
        if not is_primitive(v):
            logger.bind(index=i, vector=v).error("Input vector is not primitive")
            raise NonPrimitiveVector(i, v)
    r = rank(u)
    if r < d:
        raise RankDeficient(r, d)
    consts = [Fraction(c) for c in constants] if constants is not None else [Fraction(0)] * n

    def raw() -> HypertoricData:
        return HypertoricData(
            d=d,
            n=n,
            u=[tuple(v) for v in u],
            lambda_r=list(lambda_r),
            lambda_c=list(lambda_c) if lambda_c is not None else None,
            trop_const=consts,
            order=list(range(1, n + 1)),
            normalized=False,
        )

    matrix = IntMatrix.from_columns(u)
    index = 1
    for x in smith_invariants(matrix):
        index *= x
    if index != 1:
        if strict:
            raise NotSpanning(max(smith_invariants(matrix)))
        logger.debug("Keeping raw coordinates: lattice index {}", index)
        return raw()

    basis = next(
        (cols for cols in combinations(range(n), d) if abs(_det([u[c] for c in cols])) == 1),
        None,
    )
    if basis is None:
        if strict:
            raise NoUnimodularBasis("no d of the vectors form a basis of Z^d")
        return raw()
    order = list(basis) + [k for k in range(n) if k not in basis]
    inverse = Matrix([list(u[c]) for c in basis]).T.inv()
    coords = []
    for k in order:
        x = inverse * Matrix(list(u[k]))
        coords.append(tuple(int(c) for c in x))
    a = [list(coords[pos]) for pos in range(d, n)]

    lr = [Fraction(lambda_r[k]) for k in order]
    shifted_r = [lr[pos] - sum((c * lr[i] for i, c in enumerate(coords[pos][:d]) if c), Fraction(0)) for pos in range(n)]
    # basis entries of the shift vanish identically
    shifted_r[:d] = [Fraction(0)] * d
    shifted_c = None
    if lambda_c is not None:
        lc = [lambda_c[k] for k in order]
        shifted_c = []
        for pos in range(n):
            if pos < d:
                shifted_c.append(GaussianRational(re=0, im=0))
                continue
            re = lc[pos].re - sum((c * lc[i].re for i, c in enumerate(coords[pos])), Fraction(0))
            im = lc[pos].im - sum((c * lc[i].im for i, c in enumerate(coords[pos])), Fraction(0))
            shifted_c.append(GaussianRational(re=re, im=im))

    data = HypertoricData(
        d=d,
        n=n,
        u=coords,
        a=a,
        lambda_r=shifted_r,
        lambda_c=shifted_c,
        trop_const=[consts[k] for k in order],
        kahler=[f"q{l}" for l in range(d + 1, n + 1)],
        order=[k + 1 for k in order],
    )
    logger.debug("Normalized {} vectors in rank {} with order {}", n, d, data.order)
    return data


def _det(vectors: Sequence[RawVector]) -> int:
    return int(Matrix([list(v) for v in vectors]).det(method="bareiss"))


def require_normalized(h: HypertoricData) -> None:
    if not h.normalized:
        raise NotNormalized("operation requires normalized data (load with strict=True)")


def real_hyperplanes(h: HypertoricData) -> List[RealHyperplane]:
    return [
        RealHyperplane(index=k, normal=h.vector(k), offset=h.offset(k))
        for k in range(1, h.n + 1)
    ]


def _equalities(
    h: HypertoricData, indices: Sequence[int], offsets: Optional[Sequence[Fraction]] = None
) -> List[Tuple[Tuple[Fraction, ...], Fraction]]:
    offs = offsets if offsets is not None else h.lambda_r
    return [(tuple(Fraction(x) for x in h.vector(k)), Fraction(offs[k - 1])) for k in indices]


class _IntersectionOracle:
    """Memoized nonemptiness of intersections of affine hyperplanes."""

    def __init__(self, h: HypertoricData, offsets: Sequence[Fraction]) -> None:
        self.h = h
        self.offsets = list(offsets)
        self._cache: Dict[FrozenSet[int], Optional[RationalVector]] = {}

    def witness(self, indices: Sequence[int]) -> Optional[RationalVector]:
        key = frozenset(indices)
        if key not in self._cache:
            # a subset with an empty sub-intersection is empty
            if any(
                (key - {k}) in self._cache and self._cache[key - {k}] is None for k in key
            ):
                self._cache[key] = None
            else:
                system = LinearSystem(
                    dimension=self.h.d,
                    equalities=_equalities(self.h, sorted(key), self.offsets),
                )
                self._cache[key] = rational_feasible(system)
        return self._cache[key]

    def meets(self, indices: Sequence[int]) -> bool:
        return self.witness(indices) is not None


def check_unimodular(h: HypertoricData) -> Certificate:
    """Check that every nonsingular maximal minor of the u-matrix is +-1."""
    for minor in square_minors(h.matrix(), h.d):
        if minor.determinant not in (-1, 0, 1):
            cols = [c + 1 for c in minor.columns]
            return Certificate(
                holds=False,
                indices=cols,
                determinant=minor.determinant,
                reason="maximal minor is not +-1",
            )
    return Certificate(holds=True)


def check_simple_real(h: HypertoricData) -> Certificate:
    """Check that every k real hyperplanes with a common point meet in codimension k."""
    oracle = _IntersectionOracle(h, h.lambda_r)
    for subset in index_subsets(h.n):
        if not oracle.meets(subset):
            continue
        r = rank([h.vector(k) for k in subset])
        if r < len(subset):
            return Certificate(
                holds=False,
                indices=list(subset),
                reason=f"{len(subset)} hyperplanes meet in codimension {r}",
            )
    return Certificate(holds=True)


class _SubspaceOracle:
    """Intersections of the affine subspaces A_i = H_R,i x H_C,i."""

    def __init__(self, h: HypertoricData) -> None:
        self.real = _IntersectionOracle(h, h.lambda_r)
        if h.lambda_c is not None:
            self.complex = [
                _IntersectionOracle(h, [c.re for c in h.lambda_c]),
                _IntersectionOracle(h, [c.im for c in h.lambda_c]),
            ]
        else:
            self.complex = [_IntersectionOracle(h, h.trop_const)]

    def meets(self, indices: Sequence[int]) -> bool:
        return self.real.meets(indices) and all(o.meets(indices) for o in self.complex)


def check_smooth(h: HypertoricData) -> SmoothnessVerdict:
    """Classify the variety as smooth, an orbifold, or worse.

    Any d+1 of the subspaces A_i meeting gives SINGULAR; a meeting d-subset
    whose vectors do not span Z^d gives ORBIFOLD.
    """
    require_normalized(h)
    oracle = _SubspaceOracle(h)
    if h.n > h.d:
        for subset in combinations(range(1, h.n + 1), h.d + 1):
            if oracle.meets(subset):
                return SmoothnessVerdict(
                    verdict=Verdict.singular,
                    certificate=Certificate(
                        holds=False,
                        indices=list(subset),
                        reason=f"{h.d + 1} subspaces A_i have a common point",
                    ),
                )
    for subset in combinations(range(1, h.n + 1), h.d):
        if not oracle.meets(subset):
            continue
        det = _det([h.vector(k) for k in subset])
        if abs(det) != 1:
            return SmoothnessVerdict(
                verdict=Verdict.orbifold,
                certificate=Certificate(
                    holds=False,
                    indices=list(subset),
                    determinant=det,
                    reason="intersecting vectors do not span the lattice",
                ),
            )
    return SmoothnessVerdict(verdict=Verdict.smooth, certificate=Certificate(holds=True))


def _distinguished(h: HypertoricData, support: Sequence[int]) -> Optional[int]:
    for l in h.extra:
        if set(support) == {l} | set(h.support(l)):
            return l
    return None


def circuits(h: HypertoricData) -> List[Circuit]:
    """All minimal index sets whose real hyperplanes have empty intersection.

    Each circuit carries its primitive class beta (the kernel generator of its
    vectors) oriented so that the pairing with the real lift is positive, and
    the Kähler monomial q^beta in the distinguished parameters.

    Raises
    ------
    DegenerateLift
        Some circuit class pairs to zero with the lift.
    """
    require_normalized(h)
    oracle = _IntersectionOracle(h, h.lambda_r)
    found = []
    tried = 0
    for subset in index_subsets(h.n):
        if len(subset) > 1 and any(not oracle.meets(s) for s in combinations(subset, len(subset) - 1)):
            continue
        tried += 1
        if oracle.meets(subset):
            continue
        found.append(_circuit(h, subset))
    logger.debug("Found {} circuits after {} feasibility tests", len(found), tried)
    return found


def _circuit(h: HypertoricData, support: Sequence[int]) -> Circuit:
    sub = IntMatrix.from_columns([h.vector(k) for k in support])
    basis, _ = kernel_lattice(sub)
    if len(basis) != 1:
        raise DegenerateLift(support)
    beta = [0] * h.n
    for k, c in zip(support, basis[0]):
        beta[k - 1] = c
    pairing = sum((h.offset(k) * beta[k - 1] for k in support), Fraction(0))
    if pairing == 0:
        logger.bind(support=support).error("Circuit class pairs to zero with the lift")
        raise DegenerateLift(support)
    if pairing < 0:
        beta = [-b for b in beta]
        pairing = -pairing
    parameter = {}
    for l in h.extra:
        if beta[l - 1]:
            # beta_{S_l} = sign(lambda_l) (e_l - sum_i a_li e_i)
            parameter[h.parameter(l)] = beta[l - 1] * (sign(h.offset(l)) or 1)
    return Circuit(
        support=list(support),
        plus=[k for k in support if beta[k - 1] > 0],
        minus=[k for k in support if beta[k - 1] < 0],
        beta=beta,
        pairing=pairing,
        parameter=parameter,
        distinguished=_distinguished(h, support),
    )


def _halfspace(h: HypertoricData, k: int, s: str) -> Tuple[Tuple[Fraction, ...], Fraction]:
    """Constraint row for the open side `s` of H_k, read as `row < const`.

    '+' is <s,u_k> - lambda_k > 0, '-' the opposite side.
    """
    v = tuple(Fraction(x) for x in h.vector(k))
    if s == "+":
        return tuple(-x for x in v), -h.offset(k)
    return v, h.offset(k)


def _parse_signs(h: HypertoricData, signs: Union[str, Sequence[int]]) -> str:
    if not isinstance(signs, str):
        signs = "".join("+" if s > 0 else "-" for s in signs)
    if len(signs) != h.n or set(signs) - {"+", "-"}:
        raise EmptyChamber(str(signs))
    return signs


def chamber_system(h: HypertoricData, signs: str, closed: bool = False) -> LinearSystem:
    rows = [_halfspace(h, k, s) for k, s in enumerate(signs, start=1)]
    if closed:
        return LinearSystem(dimension=h.d, non_strict=rows)
    return LinearSystem(dimension=h.d, strict=rows)


def real_chambers(h: HypertoricData) -> List[RealChamber]:
    """All sign vectors with a nonempty open chamber, by pruned depth-first search."""
    chambers = []

    def visit(prefix: str, rows: list) -> None:
        if len(prefix) == h.n:
            witness = rational_feasible(LinearSystem(dimension=h.d, strict=rows))
            if witness is not None:
                chambers.append(RealChamber(signs=prefix, witness=witness))
            return
        k = len(prefix) + 1
        for s in "+-":
            extended = rows + [_halfspace(h, k, s)]
            if rational_feasible(LinearSystem(dimension=h.d, strict=extended)) is not None:
                visit(prefix + s, extended)

    visit("", [])
    logger.debug("Enumerated {} real chambers", len(chambers))
    return chambers


def cotangent_complement(
    h: HypertoricData, signs: Union[str, Sequence[int]]
) -> List[ComplementComponent]:
    """Components V_J of the complement of T*X_Delta in the hypertoric variety.

    J qualifies when its hyperplanes meet but their intersection misses the
    closure of the chamber Delta; Delta_J flips the chamber's sides along J.

    Raises
    ------
    EmptyChamber
        The sign vector does not define a nonempty chamber.
    """
    require_normalized(h)
    sigma = _parse_signs(h, signs)
    if rational_feasible(chamber_system(h, sigma)) is None:
        logger.bind(signs=sigma).error("Chamber is empty")
        raise EmptyChamber(sigma)
    closure = chamber_system(h, sigma, closed=True)
    oracle = _IntersectionOracle(h, h.lambda_r)
    flipped = {"+": "-", "-": "+"}
    components = []
    for subset in index_subsets(h.n):
        witness = oracle.witness(subset)
        if witness is None:
            continue
        touching = closure.extend(
            LinearSystem(dimension=h.d, equalities=_equalities(h, subset))
        )
        if rational_feasible(touching) is not None:
            continue
        components.append(
            ComplementComponent(
                subset=list(subset),
                halfspaces=[(j, flipped[sigma[j - 1]]) for j in subset],
                witness=witness,
            )
        )
    return components
