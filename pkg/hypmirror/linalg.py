"""Exact integer and rational linear algebra.

Everything here works over Python integers and `fractions.Fraction`; there are
no floating point tolerances anywhere. Feasibility of mixed equality/strict/
non-strict systems is decided by Fourier-Motzkin elimination in low dimension
and by a two-phase exact simplex (Bland's rule) above that.
"""
from fractions import Fraction
from itertools import combinations
from typing import Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

from loguru import logger
from pydantic import BaseModel, root_validator, validator
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from .types import Rational, RationalVector

FM_MAX_DIMENSION = 4


class IntMatrix(BaseModel):
    """Integer matrix stored row by row."""

    entries: List[List[int]]

    class Config:
        allow_mutation = False

    @validator("entries")
    def _rectangular(cls, v: List[List[int]]) -> List[List[int]]:
        if not v or not v[0]:
            raise ValueError("matrix dimensions must be positive")
        width = len(v[0])
        if any(len(row) != width for row in v):
            raise ValueError("all rows must have the same length")
        return v

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        return cls(entries=[list(row) for row in zip(*columns)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(entries=[list(col) for col in zip(*self.entries)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> List[List[int]]:
        return [[self.entries[r][c] for c in cols] for r in rows]

    def apply(self, x: Sequence[int]) -> Tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(row, x)) for row in self.entries)


Constraint = Tuple[Tuple[Rational, ...], Rational]


class LinearSystem(BaseModel):
    """A system of rational linear constraints in `dimension` unknowns.

    Each constraint is a pair (coefficients, constant) read as
    `coefficients . x = constant` for equalities, `< constant` for strict
    inequalities and `<= constant` for non-strict ones.
    """

    dimension: int
    equalities: List[Constraint] = []
    strict: List[Constraint] = []
    non_strict: List[Constraint] = []

    @root_validator(skip_on_failure=True)
    def _check_lengths(cls, values: dict) -> dict:
        dim = values["dimension"]
        if dim < 0:
            raise ValueError("dimension must be nonnegative")
        for kind in ("equalities", "strict", "non_strict"):
            for coefficients, _ in values[kind]:
                if len(coefficients) != dim:
                    raise ValueError(
                        f"{kind} constraint has {len(coefficients)} coefficients, expected {dim}"
                    )
        return values

    def extend(self, other: "LinearSystem") -> "LinearSystem":
        if other.dimension != self.dimension:
            raise ValueError("cannot combine systems of different dimension")
        return LinearSystem(
            dimension=self.dimension,
            equalities=self.equalities + other.equalities,
            strict=self.strict + other.strict,
            non_strict=self.non_strict + other.non_strict,
        )

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        def dot(c: Sequence[Fraction]) -> Fraction:
            return sum((a * x for a, x in zip(c, point)), Fraction(0))

        return (
            all(dot(c) == b for c, b in self.equalities)
            and all(dot(c) < b for c, b in self.strict)
            and all(dot(c) <= b for c, b in self.non_strict)
        )


class Minor(NamedTuple):
    rows: Tuple[int, ...]
    columns: Tuple[int, ...]
    determinant: int


def hermite_normal_form(rows: Iterable[Sequence[int]]) -> List[List[int]]:
    """Row-style Hermite normal form of the lattice spanned by `rows`.

    Pivots are positive, entries above a pivot lie in `[0, pivot)` and zero rows
    are dropped, so two generating sets of the same lattice give the same output.
    """
    b = [list(r) for r in rows]
    if not b:
        return []
    ncols = len(b[0])
    r = 0
    for c in range(ncols):
        if r == len(b):
            break
        while True:
            nonzero = [i for i in range(r, len(b)) if b[i][c] != 0]
            if not nonzero:
                break
            p = min(nonzero, key=lambda i: (abs(b[i][c]), i))
            b[r], b[p] = b[p], b[r]
            done = True
            for i in range(r + 1, len(b)):
                if b[i][c] != 0:
                    q = b[i][c] // b[r][c]
                    b[i] = [x - q * y for x, y in zip(b[i], b[r])]
                    if b[i][c] != 0:
                        done = False
            if done:
                break
        if b[r][c] == 0:
            continue
        if b[r][c] < 0:
            b[r] = [-x for x in b[r]]
        for i in range(r):
            q = b[i][c] // b[r][c]
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[r])]
        r += 1
    return [row for row in b[:r] if any(row)]


def kernel_lattice(m: IntMatrix) -> Tuple[List[List[int]], int]:
    """Z-basis of {x in Z^cols : Mx = 0} and the rank of M.

    Column operations reduce M to echelon form while the same operations are
    recorded on an identity matrix; the columns of that unimodular transform
    sitting over zero columns span the kernel. The basis is returned in
    Hermite normal form.
    """
    a = [list(row) for row in m.entries]
    ncols = m.cols
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def swap(j: int, k: int) -> None:
        for mat in (a, u):
            for row in mat:
                row[j], row[k] = row[k], row[j]

    def addmul(target: int, source: int, q: int) -> None:
        for mat in (a, u):
            for row in mat:
                row[target] -= q * row[source]

    rank = 0
    for r in range(m.rows):
        if rank == ncols:
            break
        while True:
            nonzero = [j for j in range(rank, ncols) if a[r][j] != 0]
            if not nonzero:
                break
            p = min(nonzero, key=lambda j: (abs(a[r][j]), j))
            swap(rank, p)
            done = True
            for j in range(rank + 1, ncols):
                if a[r][j] != 0:
                    addmul(j, rank, a[r][j] // a[r][rank])
                    if a[r][j] != 0:
                        done = False
            if done:
                break
        if a[r][rank] != 0:
            rank += 1
    basis = [[u[i][j] for i in range(ncols)] for j in range(rank, ncols)]
    return hermite_normal_form(basis), rank


def smith_invariants(m: IntMatrix) -> List[int]:
    """Nonzero invariant factors of M, in divisibility order."""
    snf = smith_normal_form(Matrix(m.entries), domain=ZZ)
    diagonal = [abs(int(snf[i, i])) for i in range(min(m.rows, m.cols))]
    return sorted(x for x in diagonal if x != 0)


def determinant(entries: Sequence[Sequence[int]]) -> int:
    return int(Matrix(entries).det(method="bareiss"))


def square_minors(m: IntMatrix, k: int) -> List[Minor]:
    """All k x k minors of M.

    When M has more than k rows every k-subset of rows is crossed with every
    k-subset of columns; otherwise all rows are used.

    Raises
    ------
    ValueError
        `k` is not in `1..min(rows, cols)`.
    """
    if k <= 0:
        raise ValueError("minor size must be positive")
    if k > min(m.rows, m.cols):
        raise ValueError(f"minor size {k} exceeds matrix dimensions {m.rows}x{m.cols}")
    row_sets = list(combinations(range(m.rows), k)) if m.rows > k else [tuple(range(k))]
    minors = []
    for rows in row_sets:
        for cols in combinations(range(m.cols), k):
            minors.append(Minor(rows, cols, determinant(m.submatrix(rows, cols))))
    return minors


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a list of rational vectors."""
    rows = [
        [QQ(f.numerator, f.denominator) for f in map(Fraction, v)] for v in vectors if any(v)
    ]
    if not rows:
        return 0
    return DomainMatrix(rows, (len(rows), len(rows[0])), QQ).rank()


def solve_integer(basis: Sequence[Sequence[int]], vector: Sequence[int]) -> Optional[List[int]]:
    """Coordinates of `vector` in a square basis (rows), or None if not integral."""
    mat = Matrix(basis).T
    sol = mat.LUsolve(Matrix(vector))
    coords = []
    for x in sol:
        if not x.is_integer:
            return None
        coords.append(int(x))
    return coords


# --- feasibility -------------------------------------------------------------

_Row = Tuple[Tuple[Fraction, ...], Fraction, bool]  # coefficients, constant, strict


def _normalized(row: _Row) -> _Row:
    coeffs, const, strict = row
    scale = next((abs(c) for c in coeffs if c != 0), None)
    if scale is None:
        return row
    return tuple(c / scale for c in coeffs), const / scale, strict


def _eliminate_equalities(
    system: LinearSystem,
) -> Optional[Tuple[List[_Row], List[Tuple[int, Tuple[Fraction, ...], Fraction]]]]:
    """Use equalities to eliminate pivot variables.

    Returns the remaining inequalities and the substitutions
    `x_p = const - coeffs . x` in the order they were made, or None if the
    equalities are inconsistent.
    """
    dim = system.dimension
    eqs = [(tuple(Fraction(c) for c in co), Fraction(b)) for co, b in system.equalities]
    ineqs: List[_Row] = [
        (tuple(Fraction(c) for c in co), Fraction(b), True) for co, b in system.strict
    ] + [(tuple(Fraction(c) for c in co), Fraction(b), False) for co, b in system.non_strict]
    subs = []
    while eqs:
        coeffs, const = eqs.pop(0)
        p = next((i for i in range(dim) if coeffs[i] != 0), None)
        if p is None:
            if const != 0:
                return None
            continue
        lead = coeffs[p]
        expr = tuple(Fraction(0) if i == p else c / lead for i, c in enumerate(coeffs))
        value = const / lead
        subs.append((p, expr, value))

        def substitute(co: Tuple[Fraction, ...], b: Fraction) -> Tuple[Tuple[Fraction, ...], Fraction]:
            f = co[p]
            if f == 0:
                return co, b
            new = tuple(
                Fraction(0) if i == p else c - f * e for i, (c, e) in enumerate(zip(co, expr))
            )
            return new, b - f * value

        eqs = [substitute(co, b) for co, b in eqs]
        ineqs = [(*substitute(co, b), s) for co, b, s in ineqs]
    return ineqs, subs


def _trivially_ok(row: _Row) -> bool:
    _, const, strict = row
    return const > 0 if strict else const >= 0


def _fourier_motzkin(
    rows: List[_Row], variables: List[int], dim: int
) -> Optional[List[Fraction]]:
    levels: List[Tuple[int, List[_Row]]] = []
    current = rows
    for var in reversed(variables):
        involved = [r for r in current if r[0][var] != 0]
        rest = [r for r in current if r[0][var] == 0]
        levels.append((var, involved))
        upper = [r for r in involved if r[0][var] > 0]
        lower = [r for r in involved if r[0][var] < 0]
        seen: Set[_Row] = set()
        combined: List[_Row] = []
        for row in rest:
            key = _normalized(row)
            if key not in seen:
                seen.add(key)
                combined.append(row)
        for uc, ub, us in upper:
            for lc, lb, ls in lower:
                fu, fl = -lc[var], uc[var]
                coeffs = tuple(fu * x + fl * y for x, y in zip(uc, lc))
                row = (coeffs, fu * ub + fl * lb, us or ls)
                if not any(coeffs):
                    if not _trivially_ok(row):
                        return None
                    continue
                key = _normalized(row)
                if key not in seen:
                    seen.add(key)
                    combined.append(row)
        current = combined
    for row in current:
        if not any(row[0]) and not _trivially_ok(row):
            return None

    point = [Fraction(0)] * dim
    for var, involved in reversed(levels):
        lo: Optional[Tuple[Fraction, bool]] = None
        hi: Optional[Tuple[Fraction, bool]] = None
        for coeffs, const, strict in involved:
            rest = sum((c * point[i] for i, c in enumerate(coeffs) if i != var), Fraction(0))
            bound = (const - rest) / coeffs[var]
            if coeffs[var] > 0:
                if hi is None or bound < hi[0] or (bound == hi[0] and strict):
                    hi = (bound, strict)
            else:
                if lo is None or bound > lo[0] or (bound == lo[0] and strict):
                    lo = (bound, strict)
        if lo is not None and hi is not None:
            point[var] = lo[0] if lo[0] == hi[0] else (lo[0] + hi[0]) / 2
        elif lo is not None:
            point[var] = lo[0] + 1 if lo[1] else lo[0]
        elif hi is not None:
            point[var] = hi[0] - 1 if hi[1] else hi[0]
    return point


def _simplex_maximize(
    a: List[List[Fraction]], b: List[Fraction], c: List[Fraction]
) -> Optional[Tuple[Fraction, List[Fraction]]]:
    """Maximize c.y subject to a.y <= b, y >= 0. None if infeasible.

    Two-phase tableau simplex with Bland's rule. The objective is assumed
    bounded (callers cap it with an explicit constraint).
    """
    m, nvars = len(a), len(c)
    # columns: y (nvars), slacks (m), artificials (one per negative rhs row)
    art_rows = [i for i in range(m) if b[i] < 0]
    ncols = nvars + m + len(art_rows)
    tableau: List[List[Fraction]] = []
    basis: List[int] = []
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [Fraction(sign) * x for x in a[i]]
        row += [Fraction(sign if j == i else 0) for j in range(m)]
        row += [Fraction(1 if r == i else 0) for r in art_rows]
        row.append(Fraction(sign) * b[i])
        tableau.append(row)
        basis.append(nvars + m + art_rows.index(i) if b[i] < 0 else nvars + i)

    def pivot(r: int, col: int) -> None:
        lead = tableau[r][col]
        tableau[r] = [x / lead for x in tableau[r]]
        for i in range(m):
            if i != r and tableau[i][col] != 0:
                f = tableau[i][col]
                tableau[i] = [x - f * y for x, y in zip(tableau[i], tableau[r])]
        basis[r] = col

    def run(cost: List[Fraction], allowed: int) -> None:
        while True:
            # reduced costs for a maximization of cost.x
            duals = [cost[basis[i]] for i in range(m)]
            entering = None
            for col in range(allowed):
                if col in basis:
                    continue
                reduced = cost[col] - sum(duals[i] * tableau[i][col] for i in range(m))
                if reduced > 0:
                    entering = col
                    break
            if entering is None:
                return
            best: Optional[Tuple[Fraction, int]] = None
            for i in range(m):
                if tableau[i][entering] > 0:
                    ratio = tableau[i][-1] / tableau[i][entering]
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise ArithmeticError("unbounded objective")
            pivot(best[1], entering)

    if art_rows:
        phase1 = [Fraction(0)] * (nvars + m) + [Fraction(-1)] * len(art_rows)
        run(phase1, ncols)
        if any(tableau[i][-1] != 0 for i in range(m) if basis[i] >= nvars + m):
            return None
        # drive zero-valued artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= nvars + m:
                col = next(
                    (j for j in range(nvars + m) if j not in basis and tableau[i][j] != 0),
                    None,
                )
                if col is not None:
                    pivot(i, col)
    cost = list(c) + [Fraction(0)] * (m + len(art_rows))
    run(cost, nvars + m)
    y = [Fraction(0)] * nvars
    for i, col in enumerate(basis):
        if col < nvars:
            y[col] = tableau[i][-1]
    return sum((ci * yi for ci, yi in zip(c, y)), Fraction(0)), y


def _simplex_feasible(system: LinearSystem) -> Optional[List[Fraction]]:
    dim = system.dimension
    rows: List[Tuple[List[Fraction], Fraction, bool]] = []
    for co, b in system.equalities:
        rows.append(([Fraction(x) for x in co], Fraction(b), False))
        rows.append(([-Fraction(x) for x in co], -Fraction(b), False))
    for co, b in system.strict:
        rows.append(([Fraction(x) for x in co], Fraction(b), True))
    for co, b in system.non_strict:
        rows.append(([Fraction(x) for x in co], Fraction(b), False))
    # y = (x+, x-, eps); strict rows get + eps; eps <= 1
    a: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    for co, b, strict in rows:
        a.append(co + [-x for x in co] + [Fraction(1 if strict else 0)])
        rhs.append(b)
    a.append([Fraction(0)] * (2 * dim) + [Fraction(1)])
    rhs.append(Fraction(1))
    objective = [Fraction(0)] * (2 * dim) + [Fraction(1)]
    result = _simplex_maximize(a, rhs, objective)
    if result is None:
        return None
    value, y = result
    if any(strict for _, _, strict in rows) and value <= 0:
        return None
    return [y[i] - y[dim + i] for i in range(dim)]


def rational_feasible(system: LinearSystem) -> Optional[RationalVector]:
    """Decide feasibility of a rational linear system and return a witness.

    Parameters
    ----------
    system : LinearSystem
        The constraints.

    Returns
    -------
    Optional[RationalVector]
        A point satisfying every constraint exactly (strict ones strictly),
        or None if the system is infeasible. The witness is deterministic for
        a fixed input.
    """
    dim = system.dimension
    if dim > FM_MAX_DIMENSION:
        point = _simplex_feasible(system)
    else:
        reduced = _eliminate_equalities(system)
        if reduced is None:
            return None
        ineqs, subs = reduced
        pivots = {p for p, _, _ in subs}
        free = [i for i in range(dim) if i not in pivots]
        point = _fourier_motzkin(ineqs, free, dim)
        if point is not None:
            for p, expr, value in reversed(subs):
                point[p] = value - sum((e * point[i] for i, e in enumerate(expr)), Fraction(0))
    if point is None:
        return None
    witness = tuple(point)
    if not system.satisfied_by(witness):
        # should be unreachable; keep the failure loud
        logger.bind(system=system, witness=witness).error("Feasibility witness check failed")
        raise ArithmeticError("feasibility witness does not satisfy the system")
    return witness
