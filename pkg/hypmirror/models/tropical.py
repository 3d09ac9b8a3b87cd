from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from ..types import Label, Rational
from .arrangement import HypertoricData


class TropicalHyperplane(BaseModel):
    """The tropical hyperplane max{tau_i (i in support), constant}."""

    index: int
    support: List[int] = Field(..., description="The set A_k, nonempty.")
    constant: Rational

    @property
    def labels(self) -> List[int]:
        """Monomial labels, 0 standing for the constant."""
        return [0] + list(self.support)


class ChamberLabel(BaseModel):
    label: Label = Field(..., description="Dominant monomial per hyperplane.")
    witness: Tuple[Rational, ...]

    @property
    def key(self) -> str:
        return "C[" + ",".join(str(h) for h in self.label) + "]"


class Cell(BaseModel):
    """A relatively open covector cell: the maximizing labels of every hyperplane."""

    covector: List[Tuple[int, ...]]
    witness: Tuple[Rational, ...]

    @property
    def ties(self) -> Dict[int, Tuple[int, ...]]:
        return {k: v for k, v in enumerate(self.covector, start=1) if len(v) > 1}

    @property
    def codimension(self) -> int:
        return sum(len(v) - 1 for v in self.covector)

    @property
    def is_chamber(self) -> bool:
        return all(len(v) == 1 for v in self.covector)

    @property
    def key(self) -> str:
        return "|".join(f"{k}:" + ",".join(map(str, v)) for k, v in enumerate(self.covector, start=1))


class Stratum(BaseModel):
    id: str = Field(..., description="Stable key, e.g. `1:1|2:2|3:0,1,2`.")
    ties: Dict[int, List[int]] = Field(..., description="Tie sets V_j with |V_j| >= 2.")
    dimension: int
    cells: List[Cell]

    @property
    def key(self) -> str:
        return f"S[{self.id}]"

    @property
    def dominant(self) -> List[Tuple[int, ...]]:
        return self.cells[0].covector


class StratumFrame(BaseModel):
    tangent_vectors: List[Tuple[int, ...]]
    facet_labels: Dict[int, List[int]] = Field(
        ..., description="Per tied hyperplane, the labels m_i opposite each facet."
    )
    facet_normals: Dict[int, List[Tuple[int, ...]]] = Field(
        ..., description="Per tied hyperplane, |sigma|+1 vectors summing to zero."
    )

    def basis(self) -> List[Tuple[int, ...]]:
        """Normals without the last of each group, then the tangent vectors."""
        rows = []
        for j in sorted(self.facet_normals):
            rows.extend(self.facet_normals[j][:-1])
        return rows + list(self.tangent_vectors)


class WallSet(BaseModel):
    indices: Dict[int, List[int]] = Field(..., description="J_j for every direction j.")
    forward: Dict[int, int] = Field(..., description="delta^(h,h')_j")
    backward: Dict[int, int] = Field(..., description="delta^(h',h)_j")


class TropicalArrangement(BaseModel):
    data: HypertoricData
    hyperplanes: List[TropicalHyperplane]
    cells: List[Cell] = Field(default_factory=list)

    @property
    def d(self) -> int:
        return self.data.d

    @property
    def n(self) -> int:
        return self.data.n

    def hyperplane(self, k: int) -> TropicalHyperplane:
        return self.hyperplanes[k - 1]


class ChamberEdge(BaseModel):
    source: Label
    target: Label
    hyperplane: int
    stratum: Optional[str] = None
