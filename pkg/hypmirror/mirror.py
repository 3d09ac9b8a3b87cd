"""Disc classes, open Gromov-Witten values, generating functions and the mirror equations."""
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

from .arrangement import require_normalized
from .exceptions import InvalidArgument, NotOnVariety, UnboundVariable
from .models.arrangement import HypertoricData
from .models.mirror import (
    DiscClass,
    End,
    MirrorEquation,
    PeriodLocus,
    PeriodSupport,
    PointVerdict,
    RelativeClass,
    SingularPointResult,
)
from .symbolic import LaurentPoly, RationalFn, SymbolicRing, matrix_rank, substitute
from .types import Label

KahlerValues = Mapping[str, Fraction]
PointValue = Union[int, Fraction, str, RationalFn]


def mirror_ring(h: HypertoricData) -> SymbolicRing:
    """Ring of the mirror equations: u_j, v_j, Z_j over Q(q)."""
    d = range(1, h.d + 1)
    names = [f"u{j}" for j in d] + [f"v{j}" for j in d] + [f"Z{j}" for j in d]
    return SymbolicRing(names, h.kahler)


def chamber_ring(h: HypertoricData, gauge: str = "fixed") -> SymbolicRing:
    """Ring of a chamber chart: U_j, V_j, Z_j over Q(q), with C_j in formal gauge."""
    d = range(1, h.d + 1)
    names = [f"U{j}" for j in d] + [f"V{j}" for j in d] + [f"Z{j}" for j in d]
    params = list(h.kahler) + ([f"C{j}" for j in d] if gauge == "formal" else [])
    return SymbolicRing(names, params)


def global_z(
    h: HypertoricData, ring: SymbolicRing, k: int, values: Optional[KahlerValues] = None
) -> RationalFn:
    """The global coordinate Z_k; for k > d the monomial q_k * prod Z_i^a_ki."""
    if k <= h.d:
        return ring.gen(f"Z{k}")
    name = h.parameter(k)
    result = ring.const(values[name]) if values and name in values else ring.gen(name)
    for i, e in enumerate(h.coefficients(k), start=1):
        if e:
            result = result * ring.gen(f"Z{i}") ** e
    return result


def wall_factor(
    h: HypertoricData, ring: SymbolicRing, k: int, values: Optional[KahlerValues] = None
) -> RationalFn:
    return ring.one + global_z(h, ring, k, values)


def _allowed(h: HypertoricData, label: Label, j: int, end: End) -> List[int]:
    if end is End.minus:
        return [k for k in range(1, h.n + 1) if label[k - 1] == j]
    return [k for k in h.hyperplanes_through(j) if label[k - 1] != j]


def maslov2_classes(h: HypertoricData, label: Label, j: int, end: End) -> List[DiscClass]:
    """All Maslov index 2 classes hitting D^end_j from the chamber `label`.

    The wall classes that may be attached are the alpha_k with h_k = j (minus
    end), or with u_k nonzero in direction j and h_k != j (plus end); every
    subset gives one class, ordered by size and then lexicographically.
    """
    if not 1 <= j <= h.d:
        raise InvalidArgument(f"direction {j} out of range 1..{h.d}", "j")
    end = End(end)
    allowed = _allowed(h, label, j, end)
    classes = []
    for size in range(len(allowed) + 1):
        for alphas in combinations(allowed, size):
            homology = [0] * (h.d + h.n)
            homology[j - 1] = 1
            for k in alphas:
                homology[h.d + k - 1] = 1
            classes.append(
                DiscClass(divisor=j, end=end, alphas=list(alphas), homology=homology, rank=h.d)
            )
    return classes


def open_gw(h: HypertoricData, label: Label, cls: Union[DiscClass, RelativeClass]) -> int:
    """The open Gromov-Witten count of a class from the chamber `label`: 0 or 1."""
    rel = cls.to_relative() if isinstance(cls, DiscClass) else cls
    betas = [(j, End.minus, c) for j, c in enumerate(rel.minus, start=1) if c] + [
        (j, End.plus, c) for j, c in enumerate(rel.plus, start=1) if c
    ]
    if len(betas) != 1 or betas[0][2] != 1:
        return 0
    if any(c not in (0, 1) for c in rel.alpha):
        return 0
    j, end, _ = betas[0]
    allowed = set(_allowed(h, label, j, end))
    support = {k for k, c in enumerate(rel.alpha, start=1) if c}
    return int(support <= allowed)


def generating_functions(
    h: HypertoricData,
    label: Label,
    j: int,
    ring: Optional[SymbolicRing] = None,
    values: Optional[KahlerValues] = None,
) -> Tuple[LaurentPoly, LaurentPoly]:
    """The quantum-corrected coordinates u_j and v_j on the chamber chart `label`.

    u_j = C_j U_j prod_{h_k = j} (1 + Z_k) and
    v_j = C_j^-1 U_j^-1 prod_{k in J, h_k != j} (1 + Z_k), where J holds the k
    with u_k nonzero in direction j. Sphere factors are 1.
    """
    require_normalized(h)
    ring = ring or chamber_ring(h)
    gauge = ring.gen(f"C{j}") if f"C{j}" in ring else ring.one
    u = gauge * ring.gen(f"U{j}")
    v = ring.gen(f"U{j}") ** -1 / gauge
    for k in range(1, h.n + 1):
        if label[k - 1] == j:
            u = u * wall_factor(h, ring, k, values)
    for k in h.hyperplanes_through(j):
        if label[k - 1] != j:
            v = v * wall_factor(h, ring, k, values)
    return u.to_laurent(), v.to_laurent()


def product_of_walls(
    h: HypertoricData, ring: SymbolicRing, j: int, values: Optional[KahlerValues] = None
) -> RationalFn:
    result = ring.one
    for k in h.hyperplanes_through(j):
        result = result * wall_factor(h, ring, k, values)
    return result


def mirror_equations(
    h: HypertoricData, values: Optional[KahlerValues] = None
) -> List[MirrorEquation]:
    """The equations u_j v_j = prod_{k in J_j} (1 + Z_k), one per direction."""
    require_normalized(h)
    ring = mirror_ring(h)
    equations = []
    for j in range(1, h.d + 1):
        indices = h.hyperplanes_through(j)
        factors = [wall_factor(h, ring, k, values).to_laurent() for k in indices]
        equations.append(
            MirrorEquation(
                direction=j,
                indices=indices,
                lhs=f"u{j}*v{j}",
                factors=[f.to_string() for f in factors],
                expanded=product_of_walls(h, ring, j, values).to_laurent().to_json(),
            )
        )
    return equations


def defining_polynomials(
    h: HypertoricData, ring: SymbolicRing, values: Optional[KahlerValues] = None
) -> List[RationalFn]:
    """F_j = u_j v_j - prod_{k in J_j} (1 + Z_k)."""
    return [
        ring.gen(f"u{j}") * ring.gen(f"v{j}") - product_of_walls(h, ring, j, values)
        for j in range(1, h.d + 1)
    ]


def _point_value(ring: SymbolicRing, value: PointValue) -> RationalFn:
    if isinstance(value, RationalFn):
        return value
    if isinstance(value, str):
        if value in ring.parameters:
            return ring.gen(value)
        try:
            return ring.const(Fraction(value))
        except ValueError:
            raise UnboundVariable(value) from None
    return ring.const(value)


def singular_point_check(
    h: HypertoricData,
    point: Mapping[str, PointValue],
    values: Optional[KahlerValues] = None,
) -> SingularPointResult:
    """Decide whether a point of the mirror is singular by the exact Jacobian rank.

    Point values are rationals, parameter names or parameter-only `RationalFn`.

    Raises
    ------
    UnboundVariable
        Some coordinate has no value.
    NotOnVariety
        The point does not satisfy the mirror equations.
    """
    require_normalized(h)
    ring = mirror_ring(h)
    binding = {}
    for name in ring.variables:
        if name not in point:
            raise UnboundVariable(name)
        binding[name] = _point_value(ring, point[name])
    equations = defining_polynomials(h, ring, values)
    failing = [
        j for j, f in enumerate(equations, start=1) if not substitute(f, binding, ring).is_zero
    ]
    if failing:
        logger.bind(point={k: str(v) for k, v in binding.items()}).error("Point is off the variety")
        raise NotOnVariety(failing)
    jacobian = [
        [substitute(f.diff(name), binding, ring) for name in ring.variables] for f in equations
    ]
    r = matrix_rank(jacobian, ring)
    return SingularPointResult(
        verdict=PointVerdict.singular if r < h.d else PointVerdict.smooth,
        rank=r,
        jacobian=[[entry.to_string() for entry in row] for row in jacobian],
    )


def period_support(h: HypertoricData) -> PeriodSupport:
    """The multiplicative hyperplanes 1 + Z_k = 0 supporting the period integrals."""
    require_normalized(h)
    ring = mirror_ring(h)
    loci = [
        PeriodLocus(index=k, equation=f"{global_z(h, ring, k).to_string()} = -1")
        for k in range(1, h.n + 1)
    ]
    return PeriodSupport(loci=loci)
