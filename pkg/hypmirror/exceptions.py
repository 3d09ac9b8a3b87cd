from typing import Any, Dict, List, Optional, Sequence, Type

from loguru import logger


class HypmirrorException(Exception):
    pass


class InputError(HypmirrorException):
    pass


class ConfigError(InputError):
    def __init__(self, message: str, pointer: str = "", *args: Any) -> None:
        """Initialize a ConfigError.

        Parameters
        ----------
        message : str
            Human readable description of the violation.
        pointer : str
            JSON pointer to the offending location, e.g. `/input/u`.
        """
        super().__init__(message, *args)

        self.pointer = pointer
        """JSON pointer to the offending location in the config document."""


class NonExactLiteral(ConfigError):
    pass


class NonPrimitiveVector(InputError):
    def __init__(self, index: int, vector: Sequence[int]) -> None:
        super().__init__(f"vector u{index} = {tuple(vector)} is not primitive")
        self.index = index
        """1-based index of the offending vector in the input order."""
        self.vector = tuple(vector)


class NotSpanning(InputError):
    def __init__(self, invariant: int) -> None:
        super().__init__(
            f"vectors do not span the lattice over Z (Smith invariant {invariant})"
        )
        self.invariant = invariant
        """The largest Smith invariant factor; the lattice index is their product."""


class RankDeficient(InputError):
    def __init__(self, rank: int, d: int) -> None:
        super().__init__(f"vectors have rank {rank} < {d}")
        self.rank = rank
        self.d = d


class NoUnimodularBasis(InputError):
    pass


class NotNormalized(InputError):
    pass


class InvalidArgument(InputError, ValueError):
    def __init__(self, message: str, argument: str = "") -> None:
        super().__init__(message)
        self.argument = argument
        """Name of the offending argument."""


class EmptyChamber(InputError):
    def __init__(self, signs: str) -> None:
        super().__init__(f"sign vector {signs} does not define a nonempty chamber")
        self.signs = signs


class DimensionTooLarge(InputError):
    def __init__(self, d: int, limit: int = 2) -> None:
        super().__init__(f"cannot render d = {d} (at most {limit})")
        self.d = d


class ArrangementError(HypmirrorException):
    pass


class DegenerateLift(ArrangementError):
    def __init__(self, support: Sequence[int]) -> None:
        super().__init__(
            f"circuit {sorted(support)} pairs to zero with the real lift"
        )
        self.support = list(support)


class NonSimpleArrangement(ArrangementError):
    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.witness: Dict[str, Any] = witness or {}
        """Cell data (ties and a rational point) certifying the violation."""


class MixedWallSet(ArrangementError):
    def __init__(self, direction: int, indices: Sequence[int]) -> None:
        super().__init__(
            f"wall set for direction {direction} mixes crossing directions: {list(indices)}"
        )
        self.direction = direction
        self.indices = list(indices)


class FrameError(ArrangementError):
    pass


class NotAdjacent(ArrangementError):
    def __init__(self, source: str, target: str) -> None:
        super().__init__(f"no transition between non-adjacent charts {source} and {target}")
        self.source = source
        self.target = target


class SymbolicError(HypmirrorException):
    pass


class ZeroDenominator(SymbolicError):
    pass


class UnboundVariable(SymbolicError):
    def __init__(self, name: str) -> None:
        super().__init__(f"variable {name!r} is not bound")
        self.name = name


class NotOnVariety(HypmirrorException):
    def __init__(self, equations: List[int]) -> None:
        super().__init__(f"point does not satisfy equations {equations}")
        self.equations = equations
        """Directions j whose mirror equation fails at the point."""


class NotInvariant(HypmirrorException):
    def __init__(self, obstruction: Sequence[int], pairing: int) -> None:
        super().__init__(
            f"monomial is not invariant: pairing {pairing} with {list(obstruction)}"
        )
        self.obstruction = list(obstruction)
        """Kernel vector (a character of the torus K) pairing nonzero with the monomial."""
        self.pairing = pairing


class NotUnimodular(HypmirrorException):
    def __init__(self, rows: Sequence[int], columns: Sequence[int], determinant: int) -> None:
        super().__init__(
            f"minor on rows {list(rows)}, columns {list(columns)} has determinant {determinant}"
        )
        self.rows = list(rows)
        self.columns = list(columns)
        self.determinant = determinant


def exit_code_for(exc: BaseException) -> int:
    """Map an exception raised while running a task to a CLI exit code.

    Parameters
    ----------
    exc : BaseException
        The exception.

    Returns
    -------
    int
        2 for input errors, 1 for everything else.
    """
    codes: Dict[Type[BaseException], int] = {
        InputError: 2,
        HypmirrorException: 1,
    }
    for cls, code in codes.items():
        if isinstance(exc, cls):
            return code
    logger.bind(error=exc).error("Unexpected error: {}", exc)
    return 1
