"""The chart-glued resolution of the mirror and its symbolic verification.

Every chamber of the tropical arrangement carries a chart with coordinates
U_j, V_j (U_j V_j = 1) and the global Z_j. Adjacent chambers are glued by
monomial maps decorated by wall factors (1 + Z_k)^e; every admissible stratum
carries a chart with facet variables x and tangent variables y into which the
adjacent chamber charts embed. Transitions are stored once per adjacency edge
and reversed on demand.
"""
from copy import copy
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from .exceptions import InvalidArgument, NotAdjacent
from .linalg import solve_integer
from .mirror import KahlerValues, chamber_ring, generating_functions, product_of_walls, wall_factor
from .models.arrangement import HypertoricData
from .models.mirror import (
    AtlasReport,
    ChamberTransition,
    Chart,
    CheckResult,
    StratumEmbedding,
    SymplecticResidual,
    VolumeFormResult,
)
from .models.tropical import ChamberEdge, Stratum, StratumFrame, TropicalArrangement
from .symbolic import LogForm, RationalFn, SymbolicRing, dlog, substitute, wedge, wedge_all
from .tropical import (
    adjacent_chambers,
    admissible,
    build_tropical,
    chamber_adjacency,
    enumerate_chambers,
    enumerate_strata,
    stratum_frame,
    wall_sets,
)
from .types import Label

Binding = Dict[str, RationalFn]


def chamber_key(label: Label) -> str:
    return "C[" + ",".join(str(h) for h in label) + "]"


def _x(j: int, i: int) -> str:
    return f"x{j}_{i}"


class Atlas:
    """Charts and transition maps of the resolved mirror."""

    def __init__(
        self,
        data: HypertoricData,
        arrangement: TropicalArrangement,
        gauge: str = "fixed",
        values: Optional[KahlerValues] = None,
    ) -> None:
        self.data = data
        self.arrangement = arrangement
        self.gauge = gauge
        self.values = dict(values) if values else None
        self.ring = chamber_ring(data, gauge)
        self.chambers: List[Label] = [c.label for c in enumerate_chambers(arrangement)]
        self.edges: List[ChamberEdge] = chamber_adjacency(arrangement)
        self.strata: List[Stratum] = []
        self.frames: Dict[str, StratumFrame] = {}
        self.neighbours: Dict[str, List[Label]] = {}
        self.stratum_rings: Dict[str, SymbolicRing] = {}
        self.transitions: Dict[Tuple[Label, Label], ChamberTransition] = {}
        self.embeddings: Dict[Tuple[Label, str], StratumEmbedding] = {}

    @property
    def d(self) -> int:
        return self.data.d

    def __repr__(self) -> str:
        return (
            f"Atlas(chambers={len(self.chambers)}, strata={len(self.strata)}, "
            f"transitions={len(self.transitions)}, embeddings={len(self.embeddings)})"
        )

    @property
    def charts(self) -> List[Chart]:
        d = range(1, self.d + 1)
        charts = [
            Chart(
                id=chamber_key(label),
                kind="chamber",
                variables=list(self.ring.variables),
                relations=[f"U{j}*V{j} = 1" for j in d],
            )
            for label in self.chambers
        ]
        for stratum in self.strata:
            ring = self.stratum_rings[stratum.id]
            relations = []
            for j, labels in self.frames[stratum.id].facet_labels.items():
                xs = "*".join(_x(j, i) for i in range(1, len(labels) + 1))
                factor = wall_factor(self.data, ring, j, self.values).to_string()
                relations.append(f"{xs} = {factor}")
            charts.append(
                Chart(
                    id=stratum.key, kind="stratum", variables=list(ring.variables), relations=relations
                )
            )
        return charts

    def transition(self, source: Label, target: Label) -> ChamberTransition:
        """The stored or reversed transition between adjacent chambers.

        Raises
        ------
        NotAdjacent
            The chambers do not share a facet.
        """
        source, target = tuple(source), tuple(target)
        if source == target:
            return ChamberTransition(source=source, target=target, exponents={})
        if (source, target) in self.transitions:
            return self.transitions[(source, target)]
        if (target, source) in self.transitions:
            return self.transitions[(target, source)].reversed()
        raise NotAdjacent(chamber_key(source), chamber_key(target))

    def transition_map(self, source: Label, target: Label) -> Binding:
        """Target chart coordinates as functions of the source chart coordinates."""
        t = self.transition(source, target)
        ring = self.ring
        binding = {name: ring.gen(name) for name in ring.variables}
        for j, exps in t.exponents.items():
            factor = ring.one
            for k, e in exps.items():
                factor = factor * wall_factor(self.data, ring, k, self.values) ** e
            binding[f"U{j}"] = ring.gen(f"U{j}") * factor
            binding[f"V{j}"] = ring.gen(f"V{j}") / factor
        return binding

    def embedding_map(self, chamber: Label, stratum_id: str) -> Binding:
        """Stratum chart coordinates as functions of a chamber chart's coordinates."""
        key = (tuple(chamber), stratum_id)
        if key not in self.embeddings:
            raise NotAdjacent(chamber_key(chamber), f"S[{stratum_id}]")
        emb = self.embeddings[key]
        ring = self.ring
        binding = {f"Z{i}": ring.gen(f"Z{i}") for i in range(1, self.d + 1)}
        for name, exps in emb.x_exponents.items():
            value = _u_monomial(ring, exps)
            j = emb.wall_factors[name]
            if j:
                value = value * wall_factor(self.data, ring, j, self.values)
            binding[name] = value
        for name, exps in emb.y_exponents.items():
            binding[name] = _u_monomial(ring, exps)
        return binding

    def with_flipped_delta(self, edge: Tuple[Label, Label], direction: int) -> "Atlas":
        """A copy whose transition along `edge` has the exponents of U_direction negated."""
        a, b = tuple(edge[0]), tuple(edge[1])
        key = (a, b) if (a, b) in self.transitions else (b, a)
        if key not in self.transitions:
            raise NotAdjacent(chamber_key(a), chamber_key(b))
        t = self.transitions[key]
        exponents = {j: dict(e) for j, e in t.exponents.items()}
        if direction not in exponents:
            raise InvalidArgument(
                f"edge {key} has no wall factors in direction {direction}", "direction"
            )
        exponents[direction] = {k: -e for k, e in exponents[direction].items()}
        mutated = copy(self)
        mutated.transitions = dict(self.transitions)
        mutated.transitions[key] = ChamberTransition(source=t.source, target=t.target, exponents=exponents)
        logger.debug("Flipped direction {} on edge {}", direction, key)
        return mutated


def _u_monomial(ring: SymbolicRing, exps: Sequence[int]) -> RationalFn:
    result = ring.one
    for j, e in enumerate(exps, start=1):
        if e:
            result = result * ring.gen(f"U{j}") ** e
    return result


def build_atlas(
    h: HypertoricData,
    arrangement: Optional[TropicalArrangement] = None,
    gauge: str = "fixed",
    values: Optional[KahlerValues] = None,
) -> Atlas:
    """Build chamber charts, admissible stratum charts and all gluing maps.

    Raises
    ------
    NonSimpleArrangement
        The tropical arrangement is not simple.
    FrameError
        A stratum frame cannot be normalized.
    """
    arrangement = arrangement or build_tropical(h)
    atlas = Atlas(h, arrangement, gauge, values)
    for edge in atlas.edges:
        walls = wall_sets(h.d, edge.source, edge.target)
        exponents = {}
        for j, ks in walls.indices.items():
            if ks:
                exponents[j] = {k: (-1 if edge.target[k - 1] == j else 1) for k in ks}
        atlas.transitions[(edge.source, edge.target)] = ChamberTransition(
            source=edge.source, target=edge.target, exponents=exponents
        )

    for stratum in enumerate_strata(arrangement):
        if not admissible(stratum, h):
            logger.debug("Skipping non-admissible stratum {}", stratum.id)
            continue
        frame = stratum_frame(stratum, arrangement)
        atlas.strata.append(stratum)
        atlas.frames[stratum.id] = frame
        names = [
            _x(j, i)
            for j, labels in frame.facet_labels.items()
            for i in range(1, len(labels) + 1)
        ]
        names += [f"y{r}" for r in range(1, len(frame.tangent_vectors) + 1)]
        names += [f"Z{i}" for i in range(1, h.d + 1)]
        atlas.stratum_rings[stratum.id] = SymbolicRing(names, atlas.ring.parameters)
        neighbours = adjacent_chambers(arrangement, stratum)
        atlas.neighbours[stratum.id] = neighbours
        for label in neighbours:
            x_exponents, wall_factors = {}, {}
            for j, labels in frame.facet_labels.items():
                for i, (m, normal) in enumerate(zip(labels, frame.facet_normals[j]), start=1):
                    x_exponents[_x(j, i)] = list(normal)
                    wall_factors[_x(j, i)] = j if m == label[j - 1] else 0
            atlas.embeddings[(label, stratum.id)] = StratumEmbedding(
                chamber=label,
                stratum=stratum.id,
                x_exponents=x_exponents,
                wall_factors=wall_factors,
                y_exponents={
                    f"y{r}": list(t) for r, t in enumerate(frame.tangent_vectors, start=1)
                },
            )
    logger.debug("Built {!r}", atlas)
    return atlas


def _compose(outer: Binding, inner: Binding, ring: SymbolicRing) -> Binding:
    return {name: substitute(f, inner, ring) for name, f in outer.items()}


def _differences(a: Binding, b: Binding) -> List[str]:
    return [name for name in sorted(a) if a[name] != b[name]]


def _edge_pairs(atlas: Atlas) -> List[Tuple[Label, Label]]:
    pairs = []
    for e in atlas.edges:
        pairs.append((e.source, e.target))
        pairs.append((e.target, e.source))
    return pairs


def _check_inverse(atlas: Atlas) -> CheckResult:
    result = CheckResult(name="inverse", passed=True)
    identity = {name: atlas.ring.gen(name) for name in atlas.ring.variables}
    for a, b in _edge_pairs(atlas):
        round_trip = _compose(atlas.transition_map(b, a), atlas.transition_map(a, b), atlas.ring)
        result.checked += 1
        bad = _differences(round_trip, identity)
        if bad:
            result.failures.append(f"{chamber_key(a)} -> {chamber_key(b)} -> back: {bad}")
    result.passed = not result.failures
    return result


def _triangles(atlas: Atlas) -> List[Tuple[Label, Label, Label]]:
    adjacent = {(e.source, e.target) for e in atlas.edges}
    adjacent |= {(b, a) for a, b in adjacent}
    return [
        (a, b, c)
        for a, b, c in combinations(sorted(atlas.chambers), 3)
        if (a, b) in adjacent and (b, c) in adjacent and (a, c) in adjacent
    ]


def _check_cocycle(atlas: Atlas) -> CheckResult:
    result = CheckResult(name="cocycle", passed=True)
    for a, b, c in _triangles(atlas):
        via = _compose(atlas.transition_map(b, c), atlas.transition_map(a, b), atlas.ring)
        result.checked += 1
        bad = _differences(via, atlas.transition_map(a, c))
        if bad:
            result.failures.append(f"{chamber_key(a)}, {chamber_key(b)}, {chamber_key(c)}: {bad}")
    result.passed = not result.failures
    return result


def _check_strata(atlas: Atlas) -> CheckResult:
    result = CheckResult(name="stratum_compatibility", passed=True)
    for stratum in atlas.strata:
        near = set(atlas.neighbours[stratum.id])
        for a, b in _edge_pairs(atlas):
            if a not in near or b not in near:
                continue
            via = _compose(atlas.embedding_map(b, stratum.id), atlas.transition_map(a, b), atlas.ring)
            result.checked += 1
            bad = _differences(via, atlas.embedding_map(a, stratum.id))
            if bad:
                result.failures.append(
                    f"{chamber_key(a)} -> {chamber_key(b)} -> {stratum.key}: {bad}"
                )
    result.passed = not result.failures
    return result


def _generating(atlas: Atlas, label: Label, j: int) -> Tuple[RationalFn, RationalFn]:
    u, v = generating_functions(atlas.data, label, j, atlas.ring, atlas.values)
    return u.to_rational(), v.to_rational()


def _check_global_functions(atlas: Atlas) -> CheckResult:
    result = CheckResult(name="global_functions", passed=True)
    ring = atlas.ring
    for label in atlas.chambers:
        for j in range(1, atlas.d + 1):
            u, v = _generating(atlas, label, j)
            result.checked += 1
            if u * v != product_of_walls(atlas.data, ring, j, atlas.values):
                result.failures.append(f"{chamber_key(label)}: u{j}*v{j} off the mirror equation")
    for a, b in _edge_pairs(atlas):
        psi = atlas.transition_map(a, b)
        for j in range(1, atlas.d + 1):
            ua, va = _generating(atlas, a, j)
            ub, vb = _generating(atlas, b, j)
            result.checked += 1
            if substitute(ub, psi, ring) != ua or substitute(vb, psi, ring) != va:
                result.failures.append(
                    f"{chamber_key(a)} -> {chamber_key(b)}: u{j}, v{j} do not descend"
                )
    result.passed = not result.failures
    return result


def _monomial_data(atlas: Atlas, label: Label, j: int) -> List[Tuple[List[int], Dict[int, int], int]]:
    """(U-exponents, wall-factor exponents, gauge exponent) of u_j and v_j."""
    h = atlas.data
    unit = [1 if i == j else 0 for i in range(1, atlas.d + 1)]
    u_walls = {k: 1 for k in range(1, h.n + 1) if label[k - 1] == j}
    v_walls = {k: 1 for k in h.hyperplanes_through(j) if label[k - 1] != j}
    return [(unit, u_walls, 1), ([-x for x in unit], v_walls, -1)]


def _check_affinization(atlas: Atlas) -> CheckResult:
    """Write u_j, v_j in every stratum chart and check they are regular there.

    With the frame basis M (normals without the closing one, then tangents)
    U^w = x^c y^c' up to wall factors, where w = c M. Exponents of each group
    are shifted by the relation prod x = 1 + Z_j to be nonnegative; the
    function is regular iff every resulting wall-factor exponent is >= 0.
    """
    result = CheckResult(name="affinization", passed=True)
    h = atlas.data
    for (label, sid), emb in sorted(atlas.embeddings.items()):
        frame = atlas.frames[sid]
        ring = atlas.stratum_rings[sid]
        basis = [list(v) for v in frame.basis()]
        binding = atlas.embedding_map(label, sid)
        for j in range(1, atlas.d + 1):
            expected = _generating(atlas, label, j)
            for (w, walls, gauge_exp), target in zip(_monomial_data(atlas, label, j), expected):
                result.checked += 1
                coords = solve_integer(basis, w)
                if coords is None:
                    result.failures.append(f"{chamber_key(label)} in S[{sid}]: U^{w} not in the frame lattice")
                    continue
                walls = dict(walls)
                expr = ring.one
                pos = 0
                for g, labels in frame.facet_labels.items():
                    c = coords[pos : pos + len(labels) - 1]
                    pos += len(labels) - 1
                    shift = min([0] + c)
                    n = [x - shift for x in c] + [-shift]
                    for i, e in enumerate(n, start=1):
                        if e:
                            expr = expr * ring.gen(_x(g, i)) ** e
                        if labels[i - 1] == label[g - 1]:
                            walls[g] = walls.get(g, 0) - e
                for r, e in enumerate(coords[pos:], start=1):
                    if e:
                        expr = expr * ring.gen(f"y{r}") ** e
                negative = {k: e for k, e in walls.items() if e < 0}
                if negative:
                    result.failures.append(
                        f"{chamber_key(label)} in S[{sid}]: wall factors {negative} in direction {j}"
                    )
                    continue
                for k, e in walls.items():
                    if e:
                        expr = expr * wall_factor(h, ring, k, atlas.values) ** e
                if f"C{j}" in ring:
                    expr = expr * ring.gen(f"C{j}") ** gauge_exp
                if substitute(expr, binding, atlas.ring) != target:
                    result.failures.append(
                        f"{chamber_key(label)} in S[{sid}]: normal form of direction {j} does not pull back"
                    )
    result.passed = not result.failures
    return result


def verify_atlas(atlas: Atlas) -> AtlasReport:
    """Run the gluing checks: inverse, cocycle, stratum compatibility,
    descent of the global functions and regularity on stratum charts."""
    checks = [
        _check_inverse(atlas),
        _check_cocycle(atlas),
        _check_strata(atlas),
        _check_global_functions(atlas),
        _check_affinization(atlas),
    ]
    for check in checks:
        if check.passed:
            logger.debug("Check {} passed ({} cases)", check.name, check.checked)
        else:
            logger.warning("Check {} failed: {}", check.name, check.failures[0])
    return AtlasReport(checks=checks)


def _pullback_forms(atlas: Atlas, psi: Binding) -> List[LogForm]:
    forms = []
    for i in range(1, atlas.d + 1):
        forms.append(dlog(psi[f"U{i}"]))
        forms.append(dlog(psi[f"Z{i}"]))
    return forms


def volume_form(atlas: Atlas) -> LogForm:
    ring = atlas.ring
    names = [n for i in range(1, atlas.d + 1) for n in (f"U{i}", f"Z{i}")]
    return LogForm.basis(ring, names)


def verify_volume_form(atlas: Atlas) -> List[VolumeFormResult]:
    """Compare the pullback of prod dlog U_i ^ dlog Z_i with the form itself."""
    omega = volume_form(atlas)
    results = []
    for a, b in _edge_pairs(atlas):
        pulled = wedge_all(_pullback_forms(atlas, atlas.transition_map(a, b)), atlas.ring)
        if pulled == omega:
            results.append(VolumeFormResult(source=a, target=b, sign=1))
        elif pulled == -omega:
            results.append(VolumeFormResult(source=a, target=b, sign=-1))
        else:
            residual = (pulled - omega).to_string()
            logger.warning("Volume form not preserved on {} -> {}", a, b)
            results.append(VolumeFormResult(source=a, target=b, residual=residual))
    return results


def symplectic_residual(atlas: Atlas) -> List[SymplecticResidual]:
    """Pullback of sum dlog U_i ^ dlog Z_i minus the form, per transition."""
    ring = atlas.ring
    base = None
    for i in range(1, atlas.d + 1):
        term = LogForm.basis(ring, [f"U{i}", f"Z{i}"])
        base = term if base is None else base + term
    results = []
    for a, b in _edge_pairs(atlas):
        psi = atlas.transition_map(a, b)
        pulled = None
        for i in range(1, atlas.d + 1):
            term = wedge(dlog(psi[f"U{i}"]), dlog(psi[f"Z{i}"]))
            pulled = term if pulled is None else pulled + term
        diff = pulled - base
        results.append(
            SymplecticResidual(source=a, target=b, residual=diff.to_string(), vanishes=diff.is_zero)
        )
    return results
