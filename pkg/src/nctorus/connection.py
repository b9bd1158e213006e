"""Compatible connections ∇_k = D_k + π(h_k) on the free module 𝔥_n^∞."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .conf import get_tolerances
from .core import ThetaMatrix, check_axis
from .exceptions import DimensionMismatchException, NotSkewAdjointException, NotUnitaryException
from .matrix import (
    MatrixElement,
    check_scalar_family,
    hs_inner,
    hs_norm,
    mat_adjoint,
    mat_derive,
    mat_multiply,
    mat_trace,
    skew_deviation,
    unitary_deviation,
)

logger = logging.getLogger(__name__)


class Classification(str, Enum):
    """Enum describing the shape of the curvature of a connection."""

    NON_CONSTANT = "NonConstant"
    CONSTANT_SCALAR = "ConstantScalar"
    ZERO = "Zero"


class Connection:
    """The N-tuple (h_1, …, h_N) of skew-adjoint elements defining ∇."""

    __slots__ = ("_theta", "_h")

    def __init__(
        self,
        theta: ThetaMatrix,
        h: Sequence[MatrixElement],
        skew_tolerance: Optional[float] = None,
    ):
        """Initialize the connection.

        Args:
            theta: The torus the coefficients live on
            h: One matrix element per axis
            skew_tolerance: Admission threshold for ‖h_k + h_k*‖, the configured
                ``skew`` tolerance when omitted

        Raises:
            NotSkewAdjointException: Raised if some h_k is not skew-adjoint
        """
        if skew_tolerance is None:
            skew_tolerance = get_tolerances().skew
        self._set(theta, h)
        for axis, element in enumerate(self._h):
            deviation = skew_deviation(element)
            if deviation > skew_tolerance:
                raise NotSkewAdjointException(f"h[{axis}]", deviation, skew_tolerance)

    def _set(self, theta, h):
        h = tuple(h)
        if len(h) != theta.dimension:
            raise DimensionMismatchException(theta.dimension, len(h), "number of h_k")
        size = h[0].n
        for element in h:
            if element.theta != theta or element.n != size:
                raise DimensionMismatchException(size, element.n, "module rank")
        self._theta = theta
        self._h = h

    @classmethod
    def trusted(cls, theta: ThetaMatrix, h: Sequence[MatrixElement]) -> "Connection":
        """Build a connection whose h_k are known to be skew-adjoint by construction."""
        connection = cls.__new__(cls)
        connection._set(theta, h)  # pylint: disable=protected-access
        return connection

    @classmethod
    def trivial(cls, theta: ThetaMatrix, n: int) -> "Connection":
        """The connection D, with every h_k = 0."""
        return cls.trusted(theta, [MatrixElement.zero(theta, n)] * theta.dimension)

    @property
    def theta(self) -> ThetaMatrix:
        return self._theta

    @property
    def n(self) -> int:
        return self._h[0].n

    @property
    def dimension(self) -> int:
        return self._theta.dimension

    @property
    def h(self):
        return self._h

    @property
    def support_degree(self) -> int:
        return max(element.support_degree for element in self._h)

    @property
    def skew_deviation(self) -> float:
        return max(skew_deviation(element) for element in self._h)

    def perturbed(self, perturbations: Sequence[MatrixElement]) -> "Connection":
        """The connection with coefficients h_k + p_k."""
        return Connection(
            self._theta, [element + extra for element, extra in zip(self._h, perturbations)]
        )

    def almost_equal(self, other: "Connection", tolerance: Optional[float] = None) -> bool:
        return all(
            mine.almost_equal(theirs, tolerance) for mine, theirs in zip(self._h, other.h)
        )

    def to_records(self):
        return {"h": [element.to_records() for element in self._h]}

    @classmethod
    def from_records(cls, theta: ThetaMatrix, records) -> "Connection":
        return cls(theta, [MatrixElement.from_records(theta, element) for element in records["h"]])

    def __repr__(self):
        return f"Connection(n={self.n}, N={self.dimension}, degree={self.support_degree})"


@dataclass(frozen=True)
class CurvatureReport:
    """Result of :func:`classify_curvature`.

    ``scalars`` is None for non-constant curvature. ``residual`` is the
    deviation measured by the deciding test: max ‖Θ_ij‖ when the curvature is
    zero, max ‖Θ_ij − c_ij·I‖ otherwise.
    """

    classification: Classification
    scalars: Optional[np.ndarray]
    residual: float
    curvature_norm: float

    @property
    def is_flat(self) -> bool:
        return self.classification is Classification.ZERO


def curvature(connection: Connection, first: int, second: int) -> MatrixElement:
    """Θ_ij = δ_i(h_j) − δ_j(h_i) + h_i h_j − h_j h_i."""
    theta = connection.theta
    check_axis(theta, first)
    check_axis(theta, second)
    if first == second:
        return MatrixElement.zero(theta, connection.n)
    h_i, h_j = connection.h[first], connection.h[second]
    return (
        mat_derive(first, h_j)
        - mat_derive(second, h_i)
        + mat_multiply(h_i, h_j)
        - mat_multiply(h_j, h_i)
    )


def _curvature_pairs(connection: Connection):
    for first in range(connection.dimension):
        for second in range(first + 1, connection.dimension):
            yield first, second, curvature(connection, first, second)


def classify_curvature(
    connection: Connection, tolerance: Optional[float] = None
) -> CurvatureReport:
    if tolerance is None:
        tolerance = get_tolerances().curvature
    size = connection.dimension
    identity = MatrixElement.identity(connection.theta, connection.n)
    scalars = np.zeros((size, size), dtype=complex)
    curvature_norm = 0.0
    remainder_norm = 0.0
    for first, second, theta_ij in _curvature_pairs(connection):
        scalar = mat_trace(theta_ij)
        scalars[first, second] = scalar
        scalars[second, first] = -scalar
        curvature_norm = max(curvature_norm, hs_norm(theta_ij))
        remainder_norm = max(remainder_norm, hs_norm(theta_ij - identity * scalar))

    if curvature_norm <= tolerance:
        report = CurvatureReport(Classification.ZERO, scalars, curvature_norm, curvature_norm)
    elif remainder_norm <= tolerance:
        report = CurvatureReport(
            Classification.CONSTANT_SCALAR, scalars, remainder_norm, curvature_norm
        )
    else:
        report = CurvatureReport(Classification.NON_CONSTANT, None, remainder_norm, curvature_norm)
    logger.debug(
        "Curvature classified as %s (residual %.3e)", report.classification.value, report.residual
    )
    return report


def yang_mills(connection: Connection) -> float:
    """YM(∇) = Σ_{i<j} (τ⊗tr)(Θ_ij* Θ_ij)."""
    return float(
        sum(hs_inner(theta_ij, theta_ij).real for _, _, theta_ij in _curvature_pairs(connection))
    )


def gauge_transform(
    unitary: MatrixElement, connection: Connection, tolerance: Optional[float] = None
) -> Connection:
    """The gauge action γ_u, with h'_k = u h_k u* + u δ_k(u*).

    Raises:
        NotUnitaryException: Raised if ``unitary`` is not unitary within tolerance
    """
    if tolerance is None:
        tolerance = get_tolerances().unitary
    deviation = unitary_deviation(unitary)
    if deviation > tolerance:
        raise NotUnitaryException(deviation, tolerance)
    star = mat_adjoint(unitary)
    transformed = [
        mat_multiply(mat_multiply(unitary, element), star)
        + mat_multiply(unitary, mat_derive(axis, star))
        for axis, element in enumerate(connection.h)
    ]
    return Connection.trusted(connection.theta, transformed)


def gauge_word(unitaries: Iterable[MatrixElement], connection: Connection) -> Connection:
    """Apply γ_{w_1}, then γ_{w_2}, … in order."""
    for unitary in unitaries:
        connection = gauge_transform(unitary, connection)
    return connection


def constant_connection(
    theta: ThetaMatrix,
    family: Sequence[np.ndarray],
    skew_tolerance: Optional[float] = None,
    commutator_tolerance: Optional[float] = None,
) -> Connection:
    """The connection D_k + π(Λ_k) of a commuting family of skew-adjoint scalars."""
    arrays = check_scalar_family(family, skew_tolerance, commutator_tolerance)
    if len(arrays) != theta.dimension:
        raise DimensionMismatchException(theta.dimension, len(arrays), "number of Λ_k")
    return Connection.trusted(theta, [MatrixElement.from_scalar(theta, array) for array in arrays])


def potential(connection: Connection) -> MatrixElement:
    """h = Σ_k (δ_k h_k + h_k²), so that H = Δ − 2Σ_k π(h_k)D_k − π(h)."""
    total = MatrixElement.zero(connection.theta, connection.n)
    for axis, element in enumerate(connection.h):
        total = total + mat_derive(axis, element) + mat_multiply(element, element)
    return total


def curvature_table(connection: Connection) -> List[dict]:
    """Every Θ_ij with i < j, for reporting."""
    return [
        {"axes": [first, second], "curvature": theta_ij}
        for first, second, theta_ij in _curvature_pairs(connection)
    ]
