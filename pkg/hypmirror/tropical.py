"""Tropical wall-and-chamber structure of the SYZ base.

Hyperplane k is the corner locus of max{tau_i (i in A_k), a_k}. Monomials are
labelled by their variable index, with 0 standing for the constant a_k. A
point of the base is classified by its covector: for every hyperplane, the set
of labels attaining the maximum. Covector cells are convex, so every question
about chambers, strata and adjacency reduces to exact linear feasibility.
"""
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, Iterable, List, Sequence, Set, Tuple

from loguru import logger

from .arrangement import require_normalized
from .exceptions import FrameError, MixedWallSet, NonSimpleArrangement
from .linalg import (
    IntMatrix,
    LinearSystem,
    determinant,
    hermite_normal_form,
    kernel_lattice,
    rank,
    rational_feasible,
)
from .models.arrangement import HypertoricData
from .models.tropical import (
    Cell,
    ChamberEdge,
    ChamberLabel,
    Stratum,
    StratumFrame,
    TropicalArrangement,
    TropicalHyperplane,
    WallSet,
)
from .types import IntVector, Label, RationalVector
from .utils import extended_gcd

_Constraint = Tuple[Tuple[Fraction, ...], Fraction]


def _unit(m: int, d: int) -> IntVector:
    """Exponent vector of the monomial labelled m (zero for the constant)."""
    return tuple(1 if i == m - 1 else 0 for i in range(d))


def _term(hp: TropicalHyperplane, m: int, d: int) -> Tuple[IntVector, Fraction]:
    return _unit(m, d), (hp.constant if m == 0 else Fraction(0))


def _cell_constraints(
    hp: TropicalHyperplane, tie: Sequence[int], d: int
) -> Tuple[List[_Constraint], List[_Constraint]]:
    """Equalities and strict inequalities saying exactly `tie` attains the max."""
    row0, c0 = _term(hp, tie[0], d)
    equalities, strict = [], []
    for m in tie[1:]:
        row, c = _term(hp, m, d)
        equalities.append((tuple(Fraction(x - y) for x, y in zip(row, row0)), c0 - c))
    for m in hp.labels:
        if m in tie:
            continue
        # term_m < term_m0
        row, c = _term(hp, m, d)
        strict.append((tuple(Fraction(x - y) for x, y in zip(row, row0)), c0 - c))
    return equalities, strict


def build_tropical(h: HypertoricData) -> TropicalArrangement:
    """Build the tropical arrangement and verify that it is simple.

    Raises
    ------
    NonSimpleArrangement
        Two hyperplanes share a ray or a wall, or some cell has the wrong
        codimension. The exception carries the offending cell.
    """
    require_normalized(h)
    hyperplanes = [
        TropicalHyperplane(
            index=k,
            support=[k] if k <= h.d else h.support(k),
            constant=h.constant(k),
        )
        for k in range(1, h.n + 1)
    ]
    for p, q in combinations(hyperplanes, 2):
        if p.support != q.support:
            continue
        if len(p.support) >= 2:
            witness = {"hyperplanes": [p.index, q.index], "support": p.support}
            logger.bind(**witness).error("Hyperplanes share a ray")
            raise NonSimpleArrangement(
                f"hyperplanes {p.index} and {q.index} have equal support {p.support} and share a ray",
                witness,
            )
        if p.constant == q.constant:
            witness = {"hyperplanes": [p.index, q.index], "constant": str(p.constant)}
            logger.bind(**witness).error("Parallel walls coincide")
            raise NonSimpleArrangement(
                f"walls {p.index} and {q.index} coincide at {p.constant}", witness
            )
    arr = TropicalArrangement(data=h, hyperplanes=hyperplanes)
    arr.cells = _search(arr, _all_ties, check_simple=True)
    logger.debug("Tropical arrangement has {} cells", len(arr.cells))
    return arr


def _all_ties(hp: TropicalHyperplane) -> Iterable[Tuple[int, ...]]:
    labels = hp.labels
    for size in range(1, len(labels) + 1):
        yield from combinations(labels, size)


def _dominant_only(hp: TropicalHyperplane) -> Iterable[Tuple[int, ...]]:
    return ((m,) for m in hp.labels)


def _search(
    arr: TropicalArrangement,
    choices: Callable[[TropicalHyperplane], Iterable[Tuple[int, ...]]],
    check_simple: bool = False,
) -> List[Cell]:
    """Depth-first search over per-hyperplane tie choices, pruned by feasibility."""
    d = arr.d
    cells: List[Cell] = []

    def visit(k: int, covector: List[Tuple[int, ...]], eq: list, strict: list) -> None:
        if k > arr.n:
            witness = rational_feasible(LinearSystem(dimension=d, equalities=eq, strict=strict))
            if witness is None:
                return
            codim = sum(len(v) - 1 for v in covector)
            if check_simple and rank([row for row, _ in eq]) != codim:
                cell = {"covector": [list(v) for v in covector], "point": [str(x) for x in witness]}
                logger.bind(**cell).error("Cell has the wrong codimension")
                raise NonSimpleArrangement(
                    f"cell {cell['covector']} has codimension below {codim}", cell
                )
            cells.append(Cell(covector=list(covector), witness=witness))
            return
        hp = arr.hyperplane(k)
        for tie in choices(hp):
            e, s = _cell_constraints(hp, tie, d)
            eq2, strict2 = eq + e, strict + s
            if rational_feasible(LinearSystem(dimension=d, equalities=eq2, strict=strict2)) is None:
                continue
            visit(k + 1, covector + [tie], eq2, strict2)

    visit(1, [], [], [])
    return cells


def classify_point(arr: TropicalArrangement, point: Sequence[Fraction]) -> List[Tuple[int, ...]]:
    """The covector of a point: per hyperplane, the labels attaining the maximum."""
    covector = []
    for hp in arr.hyperplanes:
        values = {m: (point[m - 1] if m else hp.constant) for m in hp.labels}
        top = max(values.values())
        covector.append(tuple(m for m in hp.labels if values[m] == top))
    return covector


def enumerate_chambers(arr: TropicalArrangement) -> List[ChamberLabel]:
    """All feasible chamber labels, each with an exact witness.

    Read off the cells of a built arrangement; only a bare arrangement is searched.
    """
    cells = [c for c in arr.cells if c.is_chamber] if arr.cells else _search(arr, _dominant_only)
    chambers = [
        ChamberLabel(label=tuple(v[0] for v in c.covector), witness=c.witness) for c in cells
    ]
    logger.debug("Enumerated {} tropical chambers", len(chambers))
    return chambers


def enumerate_strata(arr: TropicalArrangement) -> List[Stratum]:
    """Strata of the wall structure, one per covector cell with ties.

    Cells with the same tie data are distinct covectors of a simple
    arrangement and never share a facet, so each cell is its own component.
    """
    strata = []
    for cell in arr.cells:
        if cell.is_chamber:
            continue
        strata.append(
            Stratum(
                id=cell.key,
                ties={k: list(v) for k, v in cell.ties.items()},
                dimension=arr.d - cell.codimension,
                cells=[cell],
            )
        )
    return strata


def _chamber_labels(arr: TropicalArrangement) -> Set[Label]:
    return {c.label for c in enumerate_chambers(arr)}


def chamber_adjacency(arr: TropicalArrangement) -> List[ChamberEdge]:
    """Pairs of chambers sharing a facet, one edge per codimension-1 cell."""
    known = _chamber_labels(arr)
    edges = []
    for cell in arr.cells:
        if cell.codimension != 1:
            continue
        (k, (m, m2)), = cell.ties.items()
        base = [v[0] for v in cell.covector]
        first, second = list(base), list(base)
        first[k - 1], second[k - 1] = m, m2
        pair = sorted([tuple(first), tuple(second)])
        if not all(p in known for p in pair):
            logger.warning("Facet {} does not separate two chambers", cell.key)
            continue
        edges.append(ChamberEdge(source=pair[0], target=pair[1], hyperplane=k, stratum=cell.key))
    return edges


def adjacent_chambers(arr: TropicalArrangement, stratum: Stratum) -> List[Label]:
    """Chamber labels whose closure contains the stratum."""
    known = _chamber_labels(arr)
    covector = stratum.dominant
    options = [list(v) for v in covector]
    labels = [tuple(choice) for choice in product(*options)]
    return sorted(label for label in labels if label in known)


def admissible(stratum: Stratum, h: HypertoricData) -> bool:
    """True if the real hyperplanes of the tied indices have a common point."""
    equalities = [
        (tuple(Fraction(x) for x in h.vector(k)), h.offset(k)) for k in sorted(stratum.ties)
    ]
    return rational_feasible(LinearSystem(dimension=h.d, equalities=equalities)) is not None


def wall_sets(d: int, h: Label, h2: Label) -> WallSet:
    """Wall index sets J_j between two chamber labels, with the crossing exponents.

    Raises
    ------
    MixedWallSet
        Some J_j contains both a hyperplane entering j and one leaving j.
    """
    indices: Dict[int, List[int]] = {}
    forward: Dict[int, int] = {}
    backward: Dict[int, int] = {}
    for j in range(1, d + 1):
        walls = [
            k + 1
            for k, (a, b) in enumerate(zip(h, h2))
            if a != b and (a == j or b == j)
        ]
        entering = any(h2[k - 1] == j for k in walls)
        leaving = any(h[k - 1] == j for k in walls)
        if entering and leaving:
            logger.bind(direction=j, walls=walls).error("Mixed wall set")
            raise MixedWallSet(j, walls)
        indices[j] = walls
        forward[j] = int(entering)
        backward[j] = int(leaving)
    return WallSet(indices=indices, forward=forward, backward=backward)


def _facet_order(tie: Sequence[int]) -> List[int]:
    return sorted(m for m in tie if m) + ([0] if 0 in tie else [])


def _tie_rows(labels: Sequence[int], d: int) -> List[List[int]]:
    first = _unit(labels[0], d)
    return [[x - y for x, y in zip(_unit(m, d), first)] for m in labels[1:]]


def _lattice(rows: List[List[int]], d: int) -> List[List[int]]:
    if not rows:
        return [list(_unit(i, d)) for i in range(1, d + 1)]
    basis, _ = kernel_lattice(IntMatrix(entries=rows))
    return basis


def _reduce(w: List[int], hnf: Sequence[Sequence[int]]) -> List[int]:
    """Canonical representative of w modulo the lattice spanned by `hnf`."""
    w = list(w)
    for row in hnf:
        pivot = next(i for i, x in enumerate(row) if x)
        q = w[pivot] // row[pivot]
        w = [a - q * b for a, b in zip(w, row)]
    return w


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def stratum_frame(stratum: Stratum, arr: TropicalArrangement) -> StratumFrame:
    """Tangent lattice basis and facet normals of a stratum.

    Facets of each tied hyperplane's dual simplex are indexed by the label
    of the opposite vertex, ordered by variable index with the constant last.
    The normal a_i is parallel to the other tied hyperplanes, orthogonal to the
    remaining vertex differences and pairs to 1 with e_{m_i} - e_m for every
    other label m. It is reduced modulo the tangent lattice, and the last
    normal of each group is minus the sum of the others.

    Raises
    ------
    FrameError
        A normalization cannot be met, which happens only for non-simple data.
    """
    d = arr.d
    groups = {j: _facet_order(tie) for j, tie in sorted(stratum.ties.items())}
    rows_by_group = {j: _tie_rows(labels, d) for j, labels in groups.items()}
    all_rows = [row for rows in rows_by_group.values() for row in rows]
    tangent = hermite_normal_form(_lattice(all_rows, d))
    if len(tangent) != stratum.dimension:
        raise FrameError(
            f"stratum {stratum.id} has a {len(tangent)}-dimensional tangent lattice, "
            f"expected {stratum.dimension}"
        )

    normals: Dict[int, List[IntVector]] = {}
    for j, labels in groups.items():
        others = [row for g, rows in rows_by_group.items() if g != j for row in rows]
        group: List[IntVector] = []
        for m in labels[:-1]:
            rest = [x for x in labels if x != m]
            direction = [x - y for x, y in zip(_unit(m, d), _unit(rest[0], d))]
            basis = _lattice(others + _tie_rows(rest, d), d)
            g, coeffs = extended_gcd([_dot(direction, b) for b in basis])
            if g != 1:
                raise FrameError(
                    f"facet opposite {m} of hyperplane {j} admits no normal with pairing 1 (gcd {g})"
                )
            w = [sum(c * b[i] for c, b in zip(coeffs, basis)) for i in range(d)]
            group.append(tuple(_reduce(w, tangent)))
        last = tuple(-sum(v[i] for v in group) for i in range(d))
        rest = labels[:-1]
        direction = [x - y for x, y in zip(_unit(labels[-1], d), _unit(rest[0], d))]
        constraints = others + _tie_rows(rest, d)
        if _dot(direction, last) != 1 or any(_dot(row, last) for row in constraints):
            raise FrameError(f"closing normal of hyperplane {j} violates its normalization")
        group.append(last)
        normals[j] = group

    frame = StratumFrame(
        tangent_vectors=[tuple(t) for t in tangent],
        facet_labels=groups,
        facet_normals=normals,
    )
    det = determinant([list(v) for v in frame.basis()])
    if abs(det) != 1:
        raise FrameError(f"frame of stratum {stratum.id} has determinant {det}")
    return frame
