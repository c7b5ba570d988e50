"""
Nonlinear basis functions with their first and second derivatives.
Each function implements a closed form; all evaluations are vectorized over
numpy arrays.
"""

from typing import Dict, List, Tuple, Union

import numpy as np

from ..domain.basis import BasisFunction, BasisSet
from ..ports.exceptions import DimensionMismatchError, UnknownBasisError


ArrayLike = Union[float, np.ndarray]

BASIS_REGISTRY: Dict[str, BasisSet] = {
    "mica2": BasisSet((BasisFunction.G1BAR, BasisFunction.G2BAR)),
    "mica4": BasisSet((
        BasisFunction.G1BAR,
        BasisFunction.G2BAR,
        BasisFunction.G0,
        BasisFunction.G1,
    )),
}

_LOG2 = np.log(2.0)


class Nonlinearities:
    """Static class evaluating basis functions, basis sets and tilts."""

    @staticmethod
    def evaluate(function: BasisFunction, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Evaluate one basis function.

        Closed forms:
            G1bar: y e^{-y^2/2},  (1 - y^2) e^{-y^2/2},  (y^3 - 3y) e^{-y^2/2}
            G2bar: e^{-y^2/2},    -y e^{-y^2/2},         (y^2 - 1) e^{-y^2/2}
            G0:    y^4 / 4,       y^3,                   3 y^2
            G1:    log cosh y,    tanh y,                1 - tanh^2 y

        Args:
            function: Basis function id
            y: Scalar or array of evaluation points

        Returns:
            (value, first derivative, second derivative), each shaped like y
        """
        y = np.asarray(y, dtype=float)
        if function is BasisFunction.G1BAR:
            gauss = np.exp(-0.5 * y ** 2)
            return y * gauss, (1.0 - y ** 2) * gauss, (y ** 3 - 3.0 * y) * gauss
        if function is BasisFunction.G2BAR:
            gauss = np.exp(-0.5 * y ** 2)
            return gauss, -y * gauss, (y ** 2 - 1.0) * gauss
        if function is BasisFunction.G0:
            return 0.25 * y ** 4, y ** 3, 3.0 * y ** 2
        if function is BasisFunction.G1:
            abs_y = np.abs(y)
            # log cosh(y) = |y| + log((1 + e^{-2|y|}) / 2), no overflow
            value = abs_y + np.log1p(np.exp(-2.0 * abs_y)) - _LOG2
            tanh = np.tanh(y)
            return value, tanh, 1.0 - tanh ** 2
        raise UnknownBasisError(str(function), [f.value for f in BasisFunction])

    @staticmethod
    def design(basis: BasisSet, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Evaluate a basis set at many points.

        Args:
            basis: Ordered basis set
            y: 1-D array of n points

        Returns:
            (values, d1, d2), each an (n, p) matrix with columns in basis order
        """
        y = np.asarray(y, dtype=float).reshape(-1)
        columns = [Nonlinearities.evaluate(f, y) for f in basis.functions]
        return tuple(np.column_stack([c[k] for c in columns]) for k in range(3))

    @staticmethod
    def eval_basis(basis: BasisSet, y: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Values, first and second derivatives of every basis function at scalar y."""
        values, d1, d2 = Nonlinearities.design(basis, np.array([y]))
        return values[0], d1[0], d2[0]

    @staticmethod
    def tilt_terms(beta: np.ndarray, basis: BasisSet, y: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Tilt f = beta^T G and its derivatives at one or many points.

        Raises:
            DimensionMismatchError: If len(beta) != p
        """
        beta = np.asarray(beta, dtype=float).reshape(-1)
        if beta.shape[0] != basis.p:
            raise DimensionMismatchError("tilt coefficients", basis.p, beta.shape[0])
        values, d1, d2 = Nonlinearities.design(basis, y)
        return values @ beta, d1 @ beta, d2 @ beta

    @staticmethod
    def eval_tilt(beta: np.ndarray, basis: BasisSet, y: float) -> Tuple[float, float, float]:
        """
        Evaluate f(y) = beta^T G(y), f'(y) and f''(y) at a scalar.

        Raises:
            DimensionMismatchError: If len(beta) != p
        """
        f, f1, f2 = Nonlinearities.tilt_terms(beta, basis, np.array([y]))
        return float(f[0]), float(f1[0]), float(f2[0])

    @staticmethod
    def supported_bases() -> List[str]:
        return list(BASIS_REGISTRY.keys())

    @staticmethod
    def resolve_basis(name: str) -> BasisSet:
        """
        Look up a basis set by its CLI name ('mica2' or 'mica4').

        Raises:
            UnknownBasisError: If the name is not registered
        """
        try:
            return BASIS_REGISTRY[name]
        except KeyError:
            raise UnknownBasisError(name, Nonlinearities.supported_bases())
