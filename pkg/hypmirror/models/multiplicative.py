from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from ..linalg import Minor


class PiMatrix(BaseModel):
    """The n x d matrix of pi*, row k holding the coordinates of u_k."""

    entries: List[List[int]]
    totally_unimodular: bool
    witness: Optional[Tuple[Tuple[int, ...], Tuple[int, ...], int]] = Field(
        None, description="(rows, columns, determinant) of a minor outside {-1, 0, 1}."
    )

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def d(self) -> int:
        return len(self.entries[0])

    def column(self, i: int) -> List[int]:
        return [row[i - 1] for row in self.entries]

    @classmethod
    def from_minor(cls, entries: List[List[int]], minor: Optional[Minor]) -> "PiMatrix":
        if minor is None:
            return cls(entries=entries, totally_unimodular=True)
        return cls(
            entries=entries,
            totally_unimodular=False,
            witness=(
                tuple(r + 1 for r in minor.rows),
                tuple(c + 1 for c in minor.columns),
                minor.determinant,
            ),
        )


class InvariantGenerator(BaseModel):
    index: int
    z: Dict[str, int] = Field(..., description="Exponents of the generator z_i.")
    w: Dict[str, int] = Field(..., description="Exponents of the generator w_i.")


class PhiResidual(BaseModel):
    index: int
    sign: int
    residual: str
    vanishes: bool


class PhiReport(BaseModel):
    residuals: List[PhiResidual]
    wall_identities: Dict[int, bool] = Field(
        default_factory=dict, description="phi(1 + Z_k) = -T_k, per k."
    )

    @property
    def passed(self) -> bool:
        return all(r.vanishes for r in self.residuals) and all(self.wall_identities.values())


class InvariantDecomposition(BaseModel):
    """A monomial z^a w^b written as prod z_i^c_i (or w_i^-c_i) times prod (z_j w_j)^r_j."""

    n: int = Field(..., description="Number of coordinate pairs (z_k, w_k).")
    z_powers: Dict[int, int] = Field(default_factory=dict)
    w_powers: Dict[int, int] = Field(default_factory=dict)
    t_powers: Dict[int, int] = Field(default_factory=dict)
    generators: List[InvariantGenerator] = Field(default_factory=list)

    def expand(self) -> Tuple[List[int], List[int]]:
        """Exponent vectors (a, b) of the original monomial."""
        a, b = [0] * self.n, [0] * self.n
        for gen in self.generators:
            for power, exps in ((self.z_powers.get(gen.index, 0), gen.z), (self.w_powers.get(gen.index, 0), gen.w)):
                for name, e in exps.items():
                    k = int(name[1:]) - 1
                    if name[0] == "z":
                        a[k] += power * e
                    else:
                        b[k] += power * e
        for j, r in self.t_powers.items():
            a[j - 1] += r
            b[j - 1] += r
        return a, b

    def reduced(self, relations: Any) -> Any:
        """The monomial as an element of a `RelationRing`."""
        return relations.reduce(relations.monomial(*self.expand()))

    def to_string(self) -> str:
        parts = []
        for i, c in sorted(self.z_powers.items()):
            parts.append(f"zz{i}" if c == 1 else f"zz{i}^{c}")
        for i, c in sorted(self.w_powers.items()):
            parts.append(f"ww{i}" if c == 1 else f"ww{i}^{c}")
        for j, r in sorted(self.t_powers.items()):
            parts.append(f"(z{j}*w{j})" if r == 1 else f"(z{j}*w{j})^{r}")
        return "*".join(parts) or "1"
