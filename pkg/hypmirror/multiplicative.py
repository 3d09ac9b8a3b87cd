"""Comparison with the multiplicative hypertoric variety.

The mirror ring maps to invariant functions on the fiber of the group-valued
moment map through phi. Invariant monomials are reduced by rewriting every
product z_j w_j as T_j, which is t_j for j <= d and, for l > d, the element
defined by 1 + t_l = (-1)^(s_l + 1) q_l prod_i (1 + t_i)^a_li with s_l the
parity of sum_i a_li.
"""
from typing import Dict, List, Mapping, Optional, Sequence

from loguru import logger

from .arrangement import require_normalized
from .exceptions import InvalidArgument, NotInvariant, NotUnimodular
from .linalg import IntMatrix, kernel_lattice, square_minors
from .mirror import KahlerValues, mirror_ring, product_of_walls, wall_factor
from .models.arrangement import HypertoricData
from .models.multiplicative import (
    InvariantDecomposition,
    InvariantGenerator,
    PhiReport,
    PhiResidual,
    PiMatrix,
)
from .symbolic import RationalFn, SymbolicRing, substitute


def pi_matrix(h: HypertoricData) -> PiMatrix:
    """Assemble pi* from the vectors and test total unimodularity on every square minor."""
    entries = [list(h.vector(k)) for k in range(1, h.n + 1)]
    m = IntMatrix(entries=entries)
    for k in range(1, min(h.n, h.d) + 1):
        for minor in square_minors(m, k):
            if minor.determinant not in (-1, 0, 1):
                logger.debug("Minor {} has determinant {}", minor, minor.determinant)
                return PiMatrix.from_minor(entries, minor)
    return PiMatrix.from_minor(entries, None)


def invariant_generators(pi: PiMatrix) -> List[InvariantGenerator]:
    """The signed monomials z_i and w_i read off the columns of pi*."""
    generators = []
    for i in range(1, pi.d + 1):
        z: Dict[str, int] = {}
        w: Dict[str, int] = {}
        for j, p in enumerate(pi.column(i), start=1):
            if p > 0:
                z[f"z{j}"], w[f"w{j}"] = p, p
            elif p < 0:
                z[f"w{j}"], w[f"z{j}"] = -p, -p
        generators.append(InvariantGenerator(index=i, z=z, w=w))
    return generators


def multiplicative_ring(h: HypertoricData) -> SymbolicRing:
    names = [f"z{k}" for k in range(1, h.n + 1)]
    names += [f"w{k}" for k in range(1, h.n + 1)]
    names += [f"t{i}" for i in range(1, h.d + 1)]
    return SymbolicRing(names, h.kahler)


class RelationRing:
    """Invariant functions reduced modulo the multiplicative moment-map relations."""

    def __init__(self, h: HypertoricData, values: Optional[KahlerValues] = None) -> None:
        self.h = h
        self.values = values
        self.ring = multiplicative_ring(h)
        self._t = {j: self._derived(j) for j in range(1, h.n + 1)}

    def _derived(self, j: int) -> RationalFn:
        ring = self.ring
        if j <= self.h.d:
            return ring.gen(f"t{j}")
        a = self.h.coefficients(j)
        sign = -1 if sum(a) % 2 == 0 else 1
        name = self.h.parameter(j)
        q = ring.const(self.values[name]) if self.values and name in self.values else ring.gen(name)
        value = q * sign
        for i, e in enumerate(a, start=1):
            if e:
                value = value * (ring.one + ring.gen(f"t{i}")) ** e
        return value - 1

    def T(self, j: int) -> RationalFn:
        """The reduction of z_j w_j."""
        return self._t[j]

    def monomial(self, a: Sequence[int], b: Sequence[int]) -> RationalFn:
        ring = self.ring
        result = ring.one
        for k, (x, y) in enumerate(zip(a, b), start=1):
            if x:
                result = result * ring.gen(f"z{k}") ** x
            if y:
                result = result * ring.gen(f"w{k}") ** y
        return result

    def _reduce_terms(self, terms: Mapping) -> RationalFn:
        ring, n = self.ring, self.h.n
        names = ring.names
        total = ring.zero
        for exps, coeff in terms.items():
            z, w = exps[:n], exps[n : 2 * n]
            term = ring.const(coeff)
            for k in range(n):
                m = min(z[k], w[k])
                if z[k] - m:
                    term = term * ring.gen(f"z{k + 1}") ** (z[k] - m)
                if w[k] - m:
                    term = term * ring.gen(f"w{k + 1}") ** (w[k] - m)
                if m:
                    term = term * self._t[k + 1] ** m
            for idx in range(2 * n, len(names)):
                if exps[idx]:
                    term = term * ring.gen(names[idx]) ** exps[idx]
            total = total + term
        return total

    def reduce(self, f: RationalFn) -> RationalFn:
        return self._reduce_terms(f.numerator_terms) / self._reduce_terms(f.denominator_terms)


def phi_signs(pi: PiMatrix) -> Dict[int, int]:
    """(-1)^(parity of sum_j |pi*_ji|) for every i."""
    return {i: -1 if sum(abs(p) for p in pi.column(i)) % 2 else 1 for i in range(1, pi.d + 1)}


def phi_binding(
    h: HypertoricData,
    relations: RelationRing,
    pi: PiMatrix,
    signs: Optional[Mapping[int, int]] = None,
) -> Dict[str, RationalFn]:
    ring = relations.ring
    chosen = phi_signs(pi)
    chosen.update(signs or {})
    binding = {}
    for gen in invariant_generators(pi):
        i = gen.index
        binding[f"u{i}"] = _from_exponents(ring, gen.z) * chosen[i]
        binding[f"v{i}"] = _from_exponents(ring, gen.w)
        binding[f"Z{i}"] = -ring.one - ring.gen(f"t{i}")
    return binding


def _from_exponents(ring: SymbolicRing, exps: Mapping[str, int]) -> RationalFn:
    return ring.monomial(exps)


def phi(
    h: HypertoricData,
    expr: RationalFn,
    relations: Optional[RelationRing] = None,
    signs: Optional[Mapping[int, int]] = None,
) -> RationalFn:
    """Image of a mirror-ring element, reduced in the relation ring."""
    require_normalized(h)
    relations = relations or RelationRing(h)
    pi = pi_matrix(h)
    image = substitute(expr, phi_binding(h, relations, pi, signs), relations.ring)
    return relations.reduce(image)


def verify_phi(
    h: HypertoricData,
    signs: Optional[Mapping[int, int]] = None,
    values: Optional[KahlerValues] = None,
) -> PhiReport:
    """Check phi(u_i) phi(v_i) = phi(prod_{k in I_i} (1 + Z_k)) in the relation ring.

    Raises
    ------
    NotUnimodular
        pi* is not totally unimodular; the witness minor is attached.
    """
    require_normalized(h)
    pi = pi_matrix(h)
    if not pi.totally_unimodular:
        rows, cols, det = pi.witness
        raise NotUnimodular(rows, cols, det)
    relations = RelationRing(h, values)
    mirror = mirror_ring(h)
    chosen = phi_signs(pi)
    chosen.update(signs or {})
    residuals = []
    for i in range(1, h.d + 1):
        lhs = phi(h, mirror.gen(f"u{i}") * mirror.gen(f"v{i}"), relations, chosen)
        rhs = phi(h, product_of_walls(h, mirror, i, values), relations, chosen)
        diff = lhs - rhs
        residuals.append(
            PhiResidual(index=i, sign=chosen[i], residual=diff.to_string(), vanishes=diff.is_zero)
        )
    identities = {}
    for k in range(1, h.n + 1):
        image = phi(h, wall_factor(h, mirror, k, values), relations, chosen)
        identities[k] = (image + relations.T(k)).is_zero
    report = PhiReport(residuals=residuals, wall_identities=identities)
    if not report.passed:
        logger.warning("phi does not close: {}", [r.residual for r in residuals if not r.vanishes])
    return report


def decompose_invariant(
    h: HypertoricData, a: Sequence[int], b: Sequence[int]
) -> InvariantDecomposition:
    """Factor the monomial z^a w^b into the localized invariant generators.

    Raises
    ------
    NotInvariant
        Some character of the torus K pairs nonzero with a - b.
    """
    require_normalized(h)
    if len(a) != h.n or len(b) != h.n:
        argument = "a" if len(a) != h.n else "b"
        raise InvalidArgument(f"exponent vectors must have length {h.n}", argument)
    diff = [x - y for x, y in zip(a, b)]
    kernel, _ = kernel_lattice(h.matrix())
    for kappa in kernel:
        pairing = sum(x * k for x, k in zip(diff, kappa))
        if pairing:
            logger.bind(kappa=kappa, pairing=pairing).debug("Monomial is not invariant")
            raise NotInvariant(kappa, pairing)
    generators = invariant_generators(pi_matrix(h))
    c = diff[: h.d]
    dec = InvariantDecomposition(
        n=h.n,
        z_powers={i: x for i, x in enumerate(c, start=1) if x > 0},
        w_powers={i: -x for i, x in enumerate(c, start=1) if x < 0},
        generators=generators,
    )
    pa, pb = dec.expand()
    rest = [x - y for x, y in zip(a, pa)]
    if rest != [x - y for x, y in zip(b, pb)]:
        raise ArithmeticError("peeled generators do not match the monomial")
    dec.t_powers = {j: r for j, r in enumerate(rest, start=1) if r}
    return dec
