from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from ..ports.exceptions import InvalidDataError


class BasisFunction(str, Enum):
    """
    Smooth nonlinearities used by the tilt model and the FastICA baseline.

    G1bar(y) = y exp(-y^2/2), G2bar(y) = exp(-y^2/2),
    G0(y) = y^4 / 4, G1(y) = log cosh(y).
    """
    G1BAR = "G1bar"
    G2BAR = "G2bar"
    G0 = "G0"
    G1 = "G1"


@dataclass(frozen=True)
class BasisSet:
    """Ordered set of distinct basis functions."""
    functions: Tuple[BasisFunction, ...]

    def __post_init__(self):
        functions = tuple(BasisFunction(f) for f in self.functions)
        if not functions:
            raise InvalidDataError("A basis set needs at least one function")
        if len(set(functions)) != len(functions):
            raise InvalidDataError("Basis function ids must be distinct")
        object.__setattr__(self, "functions", functions)

    @property
    def p(self) -> int:
        return len(self.functions)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(f.value for f in self.functions)
