"""Exact symbolic algebra over Q with formal Kähler parameters.

A `SymbolicRing` is a universe of named variables and parameters backed by a
sympy rational function field over QQ. Field elements are kept in lowest terms
by sympy, so equality of `RationalFn` values is equality of canonical forms.
Parameters behave as scalars for `dlog`.
"""
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.fields import xfield
from sympy.polys.matrices import DomainMatrix

from .exceptions import SymbolicError, UnboundVariable, ZeroDenominator
from .utils import format_rational

Scalar = Union[int, Fraction]
Exponents = Tuple[int, ...]


class SymbolicRing:
    """Named variables and formal parameters over Q.

    Parameters
    ----------
    variables : Sequence[str]
        Variable names, in canonical order.
    parameters : Sequence[str]
        Parameter names (the Kähler parameters and gauge constants).
    """

    def __init__(self, variables: Sequence[str], parameters: Sequence[str] = ()) -> None:
        names = list(variables) + list(parameters)
        if not names:
            raise ValueError("a ring needs at least one variable or parameter")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate names in {names}")
        self.variables: Tuple[str, ...] = tuple(variables)
        self.parameters: Tuple[str, ...] = tuple(parameters)
        self.names: Tuple[str, ...] = tuple(names)
        self._index = {name: i for i, name in enumerate(names)}
        self.field, self._gens = xfield([Symbol(n) for n in names], QQ)

    def __repr__(self) -> str:
        return f"SymbolicRing(variables={list(self.variables)}, parameters={list(self.parameters)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolicRing):
            return NotImplemented
        return self.names == other.names and self.parameters == other.parameters

    def __hash__(self) -> int:
        return hash((self.names, self.parameters))

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnboundVariable(name) from None

    def is_parameter(self, name: str) -> bool:
        return name in self.parameters

    def gen(self, name: str) -> "RationalFn":
        return RationalFn(self, self._gens[self.index(name)])

    def const(self, value: Scalar) -> "RationalFn":
        v = Fraction(value)
        return RationalFn(self, self.field.ground_new(QQ(v.numerator, v.denominator)))

    @property
    def zero(self) -> "RationalFn":
        return RationalFn(self, self.field.zero)

    @property
    def one(self) -> "RationalFn":
        return RationalFn(self, self.field.one)

    def monomial(self, exponents: Mapping[str, int], coefficient: Scalar = 1) -> "RationalFn":
        result = self.const(coefficient)
        for name, e in exponents.items():
            if e:
                result = result * self.gen(name) ** e
        return result

    def from_terms(self, terms: Mapping[Exponents, Any]) -> "RationalFn":
        """Build a polynomial from `{full exponent vector: QQ coefficient}`."""
        poly = self.field.ring.from_dict(dict(terms))
        return RationalFn(self, self.field.new(poly))

    def convert(self, f: "RationalFn") -> "RationalFn":
        """Move `f` into this ring, matching generators by name."""
        if f.ring == self:
            return RationalFn(self, f._element)
        return substitute(f, {}, target=self)


class RationalFn:
    """A rational function in the variables and parameters of a `SymbolicRing`."""

    __slots__ = ("ring", "_element")

    def __init__(self, ring: SymbolicRing, element: Any) -> None:
        self.ring = ring
        self._element = element

    @classmethod
    def from_parts(cls, numerator: "LaurentPoly", denominator: "LaurentPoly") -> "RationalFn":
        num, den = numerator.to_rational(), denominator.to_rational()
        if den.is_zero:
            raise ZeroDenominator("rational function with zero denominator")
        return num / den

    def _coerce(self, other: Any) -> Any:
        if isinstance(other, RationalFn):
            if other.ring != self.ring:
                raise SymbolicError(f"cannot combine elements of {self.ring} and {other.ring}")
            return other._element
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.ring.const(other)._element
        return NotImplemented

    def _wrap(self, element: Any) -> "RationalFn":
        return RationalFn(self.ring, element)

    def __add__(self, other: Any) -> "RationalFn":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self._element + o)

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RationalFn":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self._element - o)

    def __rsub__(self, other: Any) -> "RationalFn":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(o - self._element)

    def __mul__(self, other: Any) -> "RationalFn":
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self._element * o)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if not o:
            raise ZeroDenominator("division by zero")
        return self._wrap(self._element / o)

    def __rtruediv__(self, other: Any) -> "RationalFn":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.is_zero:
            raise ZeroDenominator("division by zero")
        return self._wrap(o / self._element)

    def __neg__(self) -> "RationalFn":
        return self._wrap(-self._element)

    def __pow__(self, exponent: int) -> "RationalFn":
        if exponent < 0 and self.is_zero:
            raise ZeroDenominator("negative power of zero")
        return self._wrap(self._element**exponent)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (RationalFn, int, Fraction)):
            o = self._coerce(other)
            return bool(self._element == o)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ring, str(self._element)))

    def __repr__(self) -> str:
        return f"RationalFn({self.to_string()!r})"

    def __str__(self) -> str:
        return self.to_string()

    @property
    def is_zero(self) -> bool:
        return not self._element

    @property
    def numerator_terms(self) -> Dict[Exponents, Fraction]:
        return _terms(self._element.numer)

    @property
    def denominator_terms(self) -> Dict[Exponents, Fraction]:
        return _terms(self._element.denom)

    def support(self) -> List[str]:
        """Names of the generators that actually occur."""
        used = set()
        for terms in (self.numerator_terms, self.denominator_terms):
            for monom in terms:
                used.update(i for i, e in enumerate(monom) if e)
        return [self.ring.names[i] for i in sorted(used)]

    @property
    def is_scalar(self) -> bool:
        """True if no variable (parameters allowed) occurs."""
        return not any(name in self.ring.variables for name in self.support())

    def diff(self, name: str) -> "RationalFn":
        """Formal partial derivative."""
        x = self.ring.field.ring.gens[self.ring.index(name)]
        num, den = self._element.numer, self._element.denom
        return self._wrap(self.ring.field.new(num.diff(x) * den - num * den.diff(x), den * den))

    def to_laurent(self) -> "LaurentPoly":
        return to_laurent(self)

    def to_string(self) -> str:
        try:
            return to_laurent(self).to_string()
        except ValueError:
            num = _format_poly(self.numerator_terms, self.ring.names)
            den = _format_poly(self.denominator_terms, self.ring.names)
            return f"({num})/({den})"


ParamScalar = RationalFn
"""A `RationalFn` in which only parameters occur."""


def _to_fraction(c: Any) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _terms(poly: Any) -> Dict[Exponents, Fraction]:
    return {tuple(monom): _to_fraction(c) for monom, c in poly.terms()}


def _format_monomial(
    exponents: Sequence[int], names: Sequence[str], coefficient: Fraction = Fraction(1)
) -> str:
    factors = []
    for name, e in zip(names, exponents):
        if e == 1:
            factors.append(name)
        elif e:
            factors.append(f"{name}^{e}")
    if not factors:
        return format_rational(coefficient)
    if coefficient == 1:
        return "*".join(factors)
    if coefficient == -1:
        return "-" + "*".join(factors)
    return "*".join([format_rational(coefficient)] + factors)


def _join_terms(parts: Iterable[str]) -> str:
    out = ""
    for part in parts:
        if not out:
            out = part
        elif part.startswith("-"):
            out += part
        else:
            out += "+" + part
    return out or "0"


def _sort_key(
    exponents: Sequence[int], names: Sequence[str]
) -> Tuple[int, List[Tuple[str, int]]]:
    nonzero = sorted((names[i], e) for i, e in enumerate(exponents) if e)
    return (1 if nonzero else 0, nonzero)


def _format_poly(terms: Mapping[Exponents, Fraction], names: Sequence[str]) -> str:
    ordered = sorted(terms.items(), key=lambda kv: _sort_key(kv[0], names))
    return _join_terms(_format_monomial(m, names, c) for m, c in ordered)


class LaurentPoly:
    """A Laurent polynomial in the variables of a ring with `ParamScalar` coefficients.

    Only addition, subtraction and multiplication are defined; division goes
    through `RationalFn`.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: SymbolicRing, terms: Mapping[Exponents, RationalFn]) -> None:
        self.ring = ring
        self.terms: Dict[Exponents, RationalFn] = {}
        width = len(ring.variables)
        for exps, coeff in terms.items():
            if len(exps) != width:
                raise ValueError(f"exponent vector {exps} does not match {width} variables")
            if not coeff.is_scalar:
                raise ValueError("Laurent coefficients may only involve parameters")
            if not coeff.is_zero:
                self.terms[tuple(exps)] = coeff

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.ring.variables

    def _combine(self, other: "LaurentPoly", sign: int) -> "LaurentPoly":
        if other.ring != self.ring:
            raise SymbolicError("Laurent polynomials over different rings")
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = terms.get(exps, self.ring.zero) + coeff * sign
        return LaurentPoly(self.ring, terms)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self._combine(other, 1)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self._combine(other, -1)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if other.ring != self.ring:
            raise SymbolicError("Laurent polynomials over different rings")
        terms: Dict[Exponents, RationalFn] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, self.ring.zero) + c1 * c2
        return LaurentPoly(self.ring, terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_string()!r})"

    def __str__(self) -> str:
        return self.to_string()

    def to_rational(self) -> RationalFn:
        result = self.ring.zero
        for exps, coeff in self.terms.items():
            result = result + coeff * self.ring.monomial(dict(zip(self.variables, exps)))
        return result

    def _term_string(self, exps: Exponents, coeff: RationalFn) -> str:
        nvars = len(self.variables)
        num, den = coeff.numerator_terms, coeff.denominator_terms
        if len(num) == 1 and len(den) == 1:
            (n_exp, n_c), (d_exp, d_c) = next(iter(num.items())), next(iter(den.items()))
            full = [a - b for a, b in zip(n_exp, d_exp)]
            full[:nvars] = list(exps)
            # parameters print before variables
            order = list(range(nvars, len(full))) + list(range(nvars))
            return _format_monomial(
                [full[i] for i in order], [self.ring.names[i] for i in order], n_c / d_c
            )
        return f"({coeff.to_string()})*{_format_monomial(exps, self.variables)}"

    def to_string(self) -> str:
        ordered = sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0], self.variables))
        return _join_terms(self._term_string(e, c) for e, c in ordered)

    def to_json(self) -> Dict[str, Any]:
        ordered = sorted(self.terms.items(), key=lambda kv: _sort_key(kv[0], self.variables))
        return {
            "variables": list(self.variables),
            "parameters": list(self.ring.parameters),
            "terms": [
                {"exponents": list(e), "coefficient": c.to_string()} for e, c in ordered
            ],
        }


def to_laurent(f: RationalFn) -> LaurentPoly:
    """Rewrite `f` as a Laurent polynomial in the ring's variables.

    Raises
    ------
    ValueError
        The variable part of the denominator is not a single monomial.
    """
    ring = f.ring
    nvars = len(ring.variables)

    def split(terms: Mapping[Exponents, Fraction]) -> Dict[Exponents, Dict[Exponents, Fraction]]:
        groups: Dict[Exponents, Dict[Exponents, Fraction]] = {}
        for monom, c in terms.items():
            var_part = monom[:nvars]
            param_part = (0,) * nvars + monom[nvars:]
            groups.setdefault(var_part, {})[param_part] = c
        return groups

    den_groups = split(f.denominator_terms)
    if len(den_groups) != 1:
        raise ValueError(f"{f.to_string()} is not a Laurent polynomial")
    (shift, den_param), = den_groups.items()
    den_scalar = ring.from_terms({m: _qq(c) for m, c in den_param.items()})
    terms: Dict[Exponents, RationalFn] = {}
    for var_part, param_terms in split(f.numerator_terms).items():
        coeff = ring.from_terms({m: _qq(c) for m, c in param_terms.items()}) / den_scalar
        terms[tuple(a - b for a, b in zip(var_part, shift))] = coeff
    return LaurentPoly(ring, terms)


def _qq(value: Fraction) -> Any:
    return QQ(value.numerator, value.denominator)


def rf_normalize(f: RationalFn) -> RationalFn:
    """Canonical representative of `f`; idempotent."""
    ring = f.ring
    num = ring.from_terms({m: _qq(c) for m, c in f.numerator_terms.items()})
    den = ring.from_terms({m: _qq(c) for m, c in f.denominator_terms.items()})
    if den.is_zero:
        raise ZeroDenominator("rational function with zero denominator")
    return num / den


def _evaluate(poly: Any, images: Sequence[Any], field: Any) -> Any:
    total = field.zero
    powers: Dict[Tuple[int, int], Any] = {}
    for monom, coeff in poly.terms():
        term = field.ground_new(coeff)
        for i, e in enumerate(monom):
            if e:
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                term = term * powers[key]
        total = total + term
    return total


def substitute(
    f: RationalFn,
    binding: Mapping[str, RationalFn],
    target: Optional[SymbolicRing] = None,
) -> RationalFn:
    """Simultaneously substitute rational functions for generators of `f`.

    Generators missing from `binding` map to the generator of the same name in
    the target ring (by default the ring of the bound values, or `f`'s own).

    Raises
    ------
    UnboundVariable
        A generator occurring in `f` is neither bound nor present in the target.
    ZeroDenominator
        The substitution sends the denominator of `f` to zero.
    """
    if target is None:
        target = next(iter(binding.values())).ring if binding else f.ring
    used = set(f.support())
    images = []
    for name in f.ring.names:
        if name in binding:
            value = binding[name]
            if value.ring != target:
                raise SymbolicError(f"binding for {name!r} lives in another ring")
            images.append(value._element)
        elif name in target:
            images.append(target.gen(name)._element)
        elif name in used:
            raise UnboundVariable(name)
        else:
            images.append(target.field.zero)
    try:
        num = _evaluate(f._element.numer, images, target.field)
        den = _evaluate(f._element.denom, images, target.field)
    except ZeroDivisionError as e:
        raise ZeroDenominator(f"substitution into {f} divides by zero") from e
    if not den:
        raise ZeroDenominator(f"substitution sends the denominator of {f} to zero")
    return RationalFn(target, num / den)


def specialize(f: RationalFn, values: Mapping[str, Scalar]) -> RationalFn:
    """Substitute rational numbers for parameters (numeric Kähler mode)."""
    ring = f.ring
    return substitute(f, {name: ring.const(v) for name, v in values.items()}, target=ring)


class LogForm:
    """A logarithmic differential form sum c * dlog x_1 ^ ... ^ dlog x_p.

    Keys are tuples of variable names in ring order; the sign of reordering is
    absorbed into the coefficient.
    """

    __slots__ = ("ring", "degree", "terms")

    def __init__(
        self, ring: SymbolicRing, degree: int, terms: Mapping[Tuple[str, ...], RationalFn]
    ) -> None:
        self.ring = ring
        self.degree = degree
        self.terms: Dict[Tuple[str, ...], RationalFn] = {}
        for key, coeff in terms.items():
            if len(key) != degree:
                raise ValueError(f"basis element {key} has the wrong degree")
            if not coeff.is_zero:
                self.terms[tuple(key)] = coeff

    @classmethod
    def basis(cls, ring: SymbolicRing, names: Sequence[str]) -> "LogForm":
        """dlog names[0] ^ dlog names[1] ^ ... with coefficient 1."""
        form = cls(ring, 0, {(): ring.one})
        for name in names:
            form = wedge(form, cls(ring, 1, {(name,): ring.one}))
        return form

    def _check(self, other: "LogForm") -> None:
        if other.ring != self.ring:
            raise SymbolicError("forms over different rings")
        if other.degree != self.degree:
            raise SymbolicError("cannot add forms of different degree")

    def __add__(self, other: "LogForm") -> "LogForm":
        self._check(other)
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, self.ring.zero) + c
        return LogForm(self.ring, self.degree, terms)

    def __neg__(self) -> "LogForm":
        return LogForm(self.ring, self.degree, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LogForm") -> "LogForm":
        return self + (-other)

    def __mul__(self, scalar: Union[RationalFn, Scalar]) -> "LogForm":
        return LogForm(self.ring, self.degree, {k: c * scalar for k, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogForm):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"LogForm({self.to_string()!r})"

    def to_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=lambda k: [self.ring.index(n) for n in k]):
            basis = "^".join(f"dlog {n}" for n in key) or "1"
            parts.append(f"({self.terms[key].to_string()})*{basis}")
        return " + ".join(parts)


def dlog(f: RationalFn) -> LogForm:
    """Logarithmic derivative: coefficient of dlog x is x * (df/dx) / f.

    Raises
    ------
    SymbolicError
        `f` is zero.
    """
    if f.is_zero:
        raise SymbolicError("dlog of zero")
    ring = f.ring
    terms = {}
    for name in ring.variables:
        partial = f.diff(name)
        if not partial.is_zero:
            terms[(name,)] = ring.gen(name) * partial / f
    return LogForm(ring, 1, terms)


def _sort_with_sign(names: Sequence[str], ring: SymbolicRing) -> Tuple[Tuple[str, ...], int]:
    idx = [ring.index(n) for n in names]
    inversions = sum(1 for i in range(len(idx)) for j in range(i + 1, len(idx)) if idx[i] > idx[j])
    ordered = tuple(n for _, n in sorted(zip(idx, names)))
    return ordered, -1 if inversions % 2 else 1


def wedge(a: LogForm, b: LogForm) -> LogForm:
    """Graded antisymmetric product of two forms."""
    if a.ring != b.ring:
        raise SymbolicError("forms over different rings")
    terms: Dict[Tuple[str, ...], RationalFn] = {}
    for ka, ca in a.terms.items():
        for kb, cb in b.terms.items():
            if set(ka) & set(kb):
                continue
            key, s = _sort_with_sign(ka + kb, a.ring)
            terms[key] = terms.get(key, a.ring.zero) + ca * cb * s
    return LogForm(a.ring, a.degree + b.degree, terms)


def wedge_all(forms: Sequence[LogForm], ring: SymbolicRing) -> LogForm:
    result = LogForm(ring, 0, {(): ring.one})
    for form in forms:
        result = wedge(result, form)
    return result


def matrix_rank(rows: Sequence[Sequence[RationalFn]], ring: SymbolicRing) -> int:
    """Rank of a matrix of rational functions over the fraction field of `ring`."""
    if not rows or not rows[0]:
        return 0
    entries = [[ring.convert(f)._element for f in row] for row in rows]
    shape = (len(entries), len(entries[0]))
    return DomainMatrix(entries, shape, ring.field.to_domain()).rank()
