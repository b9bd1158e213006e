"""The matrix algebra M_n(A_θ^∞) and the Hilbert-Schmidt structure of 𝔥_n.

Scalar matrices are plain ``numpy`` arrays of shape (n, n). They are embedded
as constants with :meth:`MatrixElement.from_scalar`.
"""
import logging
from numbers import Number
from typing import Iterable, Optional, Sequence

import numpy as np

from .conf import get_tolerances
from .core import (
    MultiIndex,
    ThetaMatrix,
    TorusElement,
    adjoint,
    derive,
    multiply,
    torus_act,
    trace,
)
from .exceptions import (
    DimensionMismatchException,
    NonCommutingFamilyException,
    NotAPermutationException,
    NotSkewAdjointException,
    NotUnitaryException,
    ThetaMismatchException,
)

logger = logging.getLogger(__name__)


class MatrixElement:
    """An n×n matrix of :class:`TorusElement` sharing one θ."""

    __slots__ = ("_theta", "_entries")

    def __init__(self, theta: ThetaMatrix, entries: Sequence[Sequence[TorusElement]]):
        rows = [tuple(row) for row in entries]
        size = len(rows)
        if size == 0 or any(len(row) != size for row in rows):
            raise DimensionMismatchException(
                "a square array", [len(row) for row in rows], "matrix shape"
            )
        for row in rows:
            for entry in row:
                if entry.theta != theta:
                    raise ThetaMismatchException()
        self._theta = theta
        self._entries = tuple(rows)

    @classmethod
    def zero(cls, theta: ThetaMatrix, n: int) -> "MatrixElement":
        zero = TorusElement.zero(theta)
        return cls(theta, [[zero] * n for _ in range(n)])

    @classmethod
    def identity(cls, theta: ThetaMatrix, n: int) -> "MatrixElement":
        return cls.from_scalar(theta, np.eye(n))

    @classmethod
    def from_scalar(cls, theta: ThetaMatrix, scalar) -> "MatrixElement":
        """Embed a complex (n, n) array as a constant element."""
        scalar = np.asarray(scalar, dtype=complex)
        if scalar.ndim != 2 or scalar.shape[0] != scalar.shape[1]:
            raise DimensionMismatchException("(n, n)", scalar.shape, "scalar matrix shape")
        return cls(
            theta,
            [[TorusElement.constant(theta, value) for value in row] for row in scalar],
        )

    @classmethod
    def diagonal(cls, theta: ThetaMatrix, elements: Sequence[TorusElement]) -> "MatrixElement":
        zero = TorusElement.zero(theta)
        size = len(elements)
        return cls(
            theta,
            [[elements[p] if p == q else zero for q in range(size)] for p in range(size)],
        )

    @property
    def theta(self) -> ThetaMatrix:
        return self._theta

    @property
    def n(self) -> int:
        return len(self._entries)

    @property
    def entries(self):
        """The rows of the matrix as nested tuples."""
        return self._entries

    def __getitem__(self, position):
        row, column = position
        return self._entries[row][column]

    def _map(self, function) -> "MatrixElement":
        return MatrixElement(
            self._theta, [[function(entry) for entry in row] for row in self._entries]
        )

    @property
    def support_degree(self) -> int:
        return max(entry.support_degree for row in self._entries for entry in row)

    def constant_part(self) -> np.ndarray:
        """The coefficient matrix at α = 0."""
        return np.array([[trace(entry) for entry in row] for row in self._entries], dtype=complex)

    def non_constant_mass(self) -> float:
        """Hilbert-Schmidt norm of everything but the α = 0 coefficients."""
        return hs_norm(self - MatrixElement.from_scalar(self._theta, self.constant_part()))

    def is_constant(self, tolerance: Optional[float] = None) -> bool:
        if tolerance is None:
            tolerance = get_tolerances().equality
        return self.non_constant_mass() <= tolerance

    def chop(self, tolerance: float) -> "MatrixElement":
        return self._map(lambda entry: entry.chop(tolerance))

    def almost_equal(self, other: "MatrixElement", tolerance: Optional[float] = None) -> bool:
        """Sup-norm comparison of every coefficient of every entry."""
        if tolerance is None:
            tolerance = get_tolerances().equality
        _check_compatible(self, other)
        return all(
            mine.almost_equal(theirs, tolerance)
            for row, other_row in zip(self._entries, other.entries)
            for mine, theirs in zip(row, other_row)
        )

    def __eq__(self, other):
        if not isinstance(other, MatrixElement):
            return NotImplemented
        return self._theta == other.theta and self.n == other.n and self.almost_equal(other)

    __hash__ = None

    # numpy scalars on the left defer to __rmul__
    __array_ufunc__ = None

    def __add__(self, other):
        if not isinstance(other, MatrixElement):
            return NotImplemented
        _check_compatible(self, other)
        return MatrixElement(
            self._theta,
            [
                [mine + theirs for mine, theirs in zip(row, other_row)]
                for row, other_row in zip(self._entries, other.entries)
            ],
        )

    def __neg__(self):
        return self._map(lambda entry: -entry)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Number):
            return self._map(lambda entry: entry * other)
        if isinstance(other, MatrixElement):
            return mat_multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def adjoint(self) -> "MatrixElement":
        return mat_adjoint(self)

    def to_records(self):
        """Serialize as an n×n array of term records."""
        return [[entry.to_records() for entry in row] for row in self._entries]

    @classmethod
    def from_records(cls, theta: ThetaMatrix, records: Iterable) -> "MatrixElement":
        return cls(
            theta,
            [[TorusElement.from_records(theta, entry) for entry in row] for row in records],
        )

    def __repr__(self):
        return f"MatrixElement(n={self.n}, entries={[list(row) for row in self._entries]!r})"


def _check_compatible(first: MatrixElement, second: MatrixElement):
    if first.theta != second.theta:
        raise ThetaMismatchException()
    if first.n != second.n:
        raise DimensionMismatchException(first.n, second.n, "matrix size")


def mat_multiply(first: MatrixElement, second: MatrixElement) -> MatrixElement:
    """Matrix product with entries multiplied in A_θ."""
    _check_compatible(first, second)
    size = first.n
    theta = first.theta
    product = []
    for p in range(size):
        row = []
        for q in range(size):
            entry = TorusElement.zero(theta)
            for r in range(size):
                if first[p, r].is_zero or second[r, q].is_zero:
                    continue
                entry = entry + multiply(first[p, r], second[r, q])
            row.append(entry)
        product.append(row)
    return MatrixElement(theta, product)


def mat_adjoint(element: MatrixElement) -> MatrixElement:
    """Conjugate transpose, (A*)_pq = (A_qp)*."""
    size = element.n
    return MatrixElement(
        element.theta,
        [[adjoint(element[q, p]) for q in range(size)] for p in range(size)],
    )


def mat_trace(element: MatrixElement) -> complex:
    """The normalized trace τ⊗tr, with mat_trace(I) = 1."""
    return sum(trace(element[p, p]) for p in range(element.n)) / element.n


def mat_derive(axis: int, element: MatrixElement) -> MatrixElement:
    return element._map(lambda entry: derive(axis, entry))  # pylint: disable=protected-access


def mat_torus_act(z: Sequence[complex], element: MatrixElement) -> MatrixElement:
    """Entrywise action of the dual torus."""
    return element._map(lambda entry: torus_act(z, entry))  # pylint: disable=protected-access


def hs_inner(first: MatrixElement, second: MatrixElement) -> complex:
    """Hilbert-Schmidt inner product (τ⊗tr)(B*A), linear in the first argument."""
    return mat_trace(mat_multiply(mat_adjoint(second), first))


def hs_norm(element: MatrixElement) -> float:
    """sqrt((τ⊗tr)(A*A)).

    By Parseval this is the normalized ℓ² norm of all coefficients, which is
    how it is evaluated.
    """
    total = sum(
        float(np.sum(np.abs(entry.values) ** 2)) for row in element.entries for entry in row
    )
    return float(np.sqrt(total / element.n))


def unitary_deviation(element: MatrixElement) -> float:
    """max of ‖AA* − I‖ and ‖A*A − I‖ in the Hilbert-Schmidt norm."""
    identity = MatrixElement.identity(element.theta, element.n)
    star = mat_adjoint(element)
    return max(
        hs_norm(mat_multiply(element, star) - identity),
        hs_norm(mat_multiply(star, element) - identity),
    )


def is_unitary(element: MatrixElement, tolerance: Optional[float] = None) -> bool:
    if tolerance is None:
        tolerance = get_tolerances().unitary
    return unitary_deviation(element) <= tolerance


def skew_deviation(element: MatrixElement) -> float:
    return hs_norm(element + mat_adjoint(element))


def is_skew_adjoint(element: MatrixElement, tolerance: Optional[float] = None) -> bool:
    if tolerance is None:
        tolerance = get_tolerances().skew
    return skew_deviation(element) <= tolerance


def diag_monomial(theta: ThetaMatrix, alphas: Sequence[MultiIndex]) -> MatrixElement:
    """The diagonal unitary diag(u^{α_1}, …, u^{α_n})."""
    return MatrixElement.diagonal(
        theta, [TorusElement.monomial(theta, alpha) for alpha in alphas]
    )


def check_permutation(permutation: Sequence[int]) -> tuple:
    """Return ``permutation`` as a tuple after checking it is a bijection of range(n)."""
    try:
        images = tuple(int(image) for image in permutation)
    except (TypeError, ValueError) as error:
        raise NotAPermutationException(permutation) from error
    if sorted(images) != list(range(len(images))):
        raise NotAPermutationException(images)
    return images


def permutation_array(permutation: Sequence[int]) -> np.ndarray:
    """The scalar 0/1 matrix sending basis vector e_i to e_ρ(i)."""
    images = check_permutation(permutation)
    size = len(images)
    array = np.zeros((size, size), dtype=complex)
    array[list(images), list(range(size))] = 1.0
    return array


def permutation_matrix(theta: ThetaMatrix, permutation: Sequence[int]) -> MatrixElement:
    """The permutation matrix of ρ (``permutation[i]`` is ρ(i)), as a constant element."""
    return MatrixElement.from_scalar(theta, permutation_array(permutation))


def scalar_hs_norm(scalar: np.ndarray) -> float:
    """Normalized Hilbert-Schmidt norm of a complex (n, n) array."""
    return float(np.linalg.norm(scalar) / np.sqrt(scalar.shape[0]))


def scalar_unitary(theta: ThetaMatrix, scalar, tolerance: Optional[float] = None) -> MatrixElement:
    """Embed a unitary complex matrix, rejecting non-unitary input."""
    if tolerance is None:
        tolerance = get_tolerances().unitary
    scalar = np.asarray(scalar, dtype=complex)
    deviation = scalar_hs_norm(scalar @ scalar.conj().T - np.eye(scalar.shape[0]))
    if deviation > tolerance:
        raise NotUnitaryException(deviation, tolerance)
    return MatrixElement.from_scalar(theta, scalar)


def check_scalar_family(
    family: Sequence[np.ndarray],
    skew_tolerance: Optional[float] = None,
    commutator_tolerance: Optional[float] = None,
) -> list:
    """Validate a family of skew-adjoint, pairwise commuting scalar matrices.

    Returns:
        list: The family as complex arrays.

    Raises:
        NotSkewAdjointException: if some member is not skew-adjoint.
        NonCommutingFamilyException: if two members do not commute.
    """
    tolerances = get_tolerances()
    if skew_tolerance is None:
        skew_tolerance = tolerances.skew
    if commutator_tolerance is None:
        commutator_tolerance = tolerances.commutator
    arrays = [np.asarray(member, dtype=complex) for member in family]
    if not arrays:
        raise DimensionMismatchException("at least one matrix", 0, "family size")
    size = arrays[0].shape[0]
    for axis, array in enumerate(arrays):
        if array.shape != (size, size):
            raise DimensionMismatchException((size, size), array.shape, "scalar matrix shape")
        deviation = scalar_hs_norm(array + array.conj().T)
        if deviation > skew_tolerance:
            raise NotSkewAdjointException(f"Λ[{axis}]", deviation, skew_tolerance)
    for first in range(len(arrays)):
        for second in range(first + 1, len(arrays)):
            commutator = arrays[first] @ arrays[second] - arrays[second] @ arrays[first]
            deviation = scalar_hs_norm(commutator)
            if deviation > commutator_tolerance:
                raise NonCommutingFamilyException(first, second, deviation)
    return arrays
