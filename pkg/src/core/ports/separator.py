from abc import ABC, abstractmethod
from typing import Callable, Optional

import numpy as np

from ..domain.signals import DataMatrix
from ..domain.solver import SolverConfig, SolverResult


IterationObserver = Callable[[int, np.ndarray, float], None]


class Separator(ABC):
    """
    Port (interface) for symmetric fixed-point separation methods.
    Implementations operate on whitened data and return an orthonormal W.
    """

    def __init__(self, config: SolverConfig):
        self.config = config

    @property
    @abstractmethod
    def name(self) -> str:
        """Method id as used in study configs and CSV output."""
        pass

    @abstractmethod
    def separate(
        self,
        data_whitened: DataMatrix,
        w_init: Optional[np.ndarray] = None,
        on_iteration: Optional[IterationObserver] = None,
    ) -> SolverResult:
        """
        Estimate the unmixing matrix.

        Args:
            data_whitened: Centered and whitened mixtures
            w_init: Optional starting matrix; decorrelated before use.
                Defaults to a random orthonormal matrix from the config seed.
            on_iteration: Called after every outer iteration with
                (iteration, W, objective)

        Returns:
            SolverResult; non-convergence is reported through `converged`

        Raises:
            NotWhitenedError: If the data covariance is far from identity
            SingularDesignError: If a density fit cannot be solved
        """
        pass
