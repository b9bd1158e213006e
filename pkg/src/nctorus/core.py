"""The smooth non-commutative torus as twisted Fourier series.

Elements of A_θ^∞ are stored as finitely supported maps ℤ^N → ℂ. The product is
the twisted convolution

    (ab)_γ = Σ_{α+β=γ} a_α b_β φ(α, β),    φ(α, β) = exp(2πi αᵀ L β),

where L is the strictly lower triangular part of θ. This is the phase obtained
by reordering u^α u^β into u^{α+β} with u^α = u_1^{α_1}···u_N^{α_N}.
"""
import logging
from numbers import Number
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .conf import get_tolerances
from .exceptions import (
    AxisOutOfRangeException,
    DimensionMismatchException,
    InvalidThetaException,
    NotUnimodularException,
    ThetaMismatchException,
)

logger = logging.getLogger(__name__)

MultiIndex = Tuple[int, ...]

TWO_PI = 2.0 * np.pi


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class ThetaMatrix:
    """Antisymmetric real N×N parameter matrix with entries in ]-1, 1[."""

    __slots__ = ("_entries", "_phase_form")

    def __init__(self, entries):
        matrix = np.array(entries, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise InvalidThetaException(f"expected a square matrix, got shape {matrix.shape}")
        if not np.array_equal(matrix, -matrix.T):
            raise InvalidThetaException("matrix is not antisymmetric")
        if np.any(np.abs(matrix) >= 1.0):
            raise InvalidThetaException("entries must lie strictly inside ]-1, 1[")
        self._entries = _readonly(matrix)
        self._phase_form = _readonly(np.tril(matrix, -1))

    @classmethod
    def zeros(cls, dimension: int) -> "ThetaMatrix":
        """The commutative torus of the given dimension."""
        return cls(np.zeros((dimension, dimension)))

    @property
    def dimension(self) -> int:
        """Number N of unitary generators."""
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of θ."""
        return self._entries

    @property
    def phase_form(self) -> np.ndarray:
        """Strictly lower triangular part L of θ, so that φ(α, β) = exp(2πi αᵀLβ)."""
        return self._phase_form

    @property
    def is_commutative(self) -> bool:
        return not np.any(self._entries)

    def to_list(self):
        return self._entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, ThetaMatrix):
            return NotImplemented
        return self is other or np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash(self._entries.tobytes())

    def __repr__(self):
        return f"ThetaMatrix({self._entries.tolist()!r})"


def _check_index(theta: ThetaMatrix, alpha) -> np.ndarray:
    index = np.asarray(alpha, dtype=np.int64)
    if index.shape != (theta.dimension,):
        raise DimensionMismatchException(theta.dimension, index.shape, "multi-index length")
    return index


def _phase_exponents(theta: ThetaMatrix, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Real exponents αᵀLβ for every pair of rows of ``left`` and ``right``."""
    return left @ theta.phase_form @ right.T


def phase_table(theta: ThetaMatrix, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Table of φ(α_i, β_j) for the rows α_i of ``left`` and β_j of ``right``."""
    if theta.is_commutative:
        return np.ones((left.shape[0], right.shape[0]), dtype=complex)
    return np.exp(1j * TWO_PI * _phase_exponents(theta, left, right))


def phase(theta: ThetaMatrix, alpha: Sequence[int], beta: Sequence[int]) -> complex:
    """Return φ(α, β) such that u^α · u^β = φ(α, β) u^{α+β}.

    The exponent is accumulated in real arithmetic and exponentiated once, so
    the result has modulus one up to a single rounding.
    """
    left = _check_index(theta, alpha)
    right = _check_index(theta, beta)
    exponent = float(left @ theta.phase_form @ right)
    return complex(np.exp(1j * TWO_PI * exponent))


def _normalize(indices: np.ndarray, values: np.ndarray, drop: float):
    """Merge repeated multi-indices, delete dust and sort the support."""
    if indices.shape[0] == 0:
        return indices, values
    support, inverse = np.unique(indices, axis=0, return_inverse=True)
    summed = np.zeros(support.shape[0], dtype=complex)
    np.add.at(summed, np.ravel(inverse), values)
    keep = np.abs(summed) >= drop
    return support[keep], summed[keep]


class TorusElement:
    """A finitely supported element Σ c_α u^α of A_θ^∞.

    Instances are immutable. Coefficients whose magnitude falls below the drop
    tolerance are deleted on construction and after every operation.
    """

    __slots__ = ("_theta", "_indices", "_values")

    def __init__(self, theta: ThetaMatrix, coefficients: Optional[Mapping] = None):
        dimension = theta.dimension
        coefficients = coefficients or {}
        indices = np.zeros((len(coefficients), dimension), dtype=np.int64)
        values = np.zeros(len(coefficients), dtype=complex)
        for row, (alpha, value) in enumerate(coefficients.items()):
            indices[row] = _check_index(theta, alpha)
            values[row] = value
        self._set(theta, indices, values)

    def _set(self, theta, indices, values):
        indices, values = _normalize(indices, values, get_tolerances().drop)
        self._theta = theta
        self._indices = _readonly(np.ascontiguousarray(indices, dtype=np.int64))
        self._values = _readonly(np.ascontiguousarray(values, dtype=complex))

    @classmethod
    def from_arrays(
        cls, theta: ThetaMatrix, indices: np.ndarray, values: np.ndarray
    ) -> "TorusElement":
        """Build an element from a (terms, N) index array and matching coefficients.

        Repeated indices are summed.
        """
        indices = np.asarray(indices, dtype=np.int64).reshape(-1, theta.dimension)
        values = np.asarray(values, dtype=complex).reshape(-1)
        if indices.shape[0] != values.shape[0]:
            raise DimensionMismatchException(indices.shape[0], values.shape[0], "term count")
        element = cls.__new__(cls)
        element._set(theta, indices, values)
        return element

    @classmethod
    def zero(cls, theta: ThetaMatrix) -> "TorusElement":
        return cls(theta)

    @classmethod
    def constant(cls, theta: ThetaMatrix, value: complex = 1.0) -> "TorusElement":
        return cls(theta, {(0,) * theta.dimension: value})

    @classmethod
    def monomial(
        cls, theta: ThetaMatrix, alpha: Sequence[int], coefficient: complex = 1.0
    ) -> "TorusElement":
        """The element c·u^α."""
        return cls(theta, {tuple(int(a) for a in alpha): coefficient})

    @classmethod
    def generator(cls, theta: ThetaMatrix, axis: int, power: int = 1) -> "TorusElement":
        """The unitary u_k^power."""
        check_axis(theta, axis)
        alpha = [0] * theta.dimension
        alpha[axis] = power
        return cls.monomial(theta, alpha)

    @property
    def theta(self) -> ThetaMatrix:
        return self._theta

    @property
    def dimension(self) -> int:
        return self._theta.dimension

    @property
    def indices(self) -> np.ndarray:
        """Read-only (terms, N) array of the support, lexicographically sorted."""
        return self._indices

    @property
    def values(self) -> np.ndarray:
        """Read-only coefficient vector aligned with :attr:`indices`."""
        return self._values

    @property
    def is_zero(self) -> bool:
        return self._values.shape[0] == 0

    @property
    def support(self):
        return [tuple(int(a) for a in row) for row in self._indices]

    @property
    def coefficients(self):
        """The coefficient map as a plain dictionary."""
        return dict(zip(self.support, (complex(v) for v in self._values)))

    def coefficient(self, alpha: Sequence[int]) -> complex:
        index = _check_index(self._theta, alpha)
        rows = np.flatnonzero(np.all(self._indices == index, axis=1))
        return complex(self._values[rows[0]]) if rows.size else 0j

    def __len__(self):
        return self._values.shape[0]

    @property
    def support_degree(self) -> int:
        """max ‖α‖_∞ over the support, 0 for the zero element."""
        if self.is_zero:
            return 0
        return int(np.abs(self._indices).max())

    @property
    def l1_norm(self) -> float:
        """Σ |c_α|, an upper bound for the C*-norm."""
        return float(np.abs(self._values).sum())

    def chop(self, tolerance: float) -> "TorusElement":
        """Delete every coefficient of magnitude below ``tolerance``."""
        keep = np.abs(self._values) >= tolerance
        return TorusElement.from_arrays(self._theta, self._indices[keep], self._values[keep])

    def sup_distance(self, other: "TorusElement") -> float:
        _check_same_theta(self, other)
        difference = self - other
        return float(np.abs(difference.values).max()) if len(difference) else 0.0

    def almost_equal(self, other: "TorusElement", tolerance: Optional[float] = None) -> bool:
        """Sup-norm comparison of coefficient maps."""
        if tolerance is None:
            tolerance = get_tolerances().equality
        return self.sup_distance(other) <= tolerance

    def __eq__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self._theta == other._theta and self.almost_equal(other)

    __hash__ = None

    # numpy scalars on the left defer to __rmul__
    __array_ufunc__ = None

    def __add__(self, other):
        if isinstance(other, Number):
            other = TorusElement.constant(self._theta, other)
        if not isinstance(other, TorusElement):
            return NotImplemented
        _check_same_theta(self, other)
        return TorusElement.from_arrays(
            self._theta,
            np.concatenate([self._indices, other._indices]),
            np.concatenate([self._values, other._values]),
        )

    __radd__ = __add__

    def __neg__(self):
        return TorusElement.from_arrays(self._theta, self._indices, -self._values)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return TorusElement.from_arrays(self._theta, self._indices, self._values * other)
        if isinstance(other, TorusElement):
            return multiply(self, other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return NotImplemented

    def adjoint(self) -> "TorusElement":
        return adjoint(self)

    def to_records(self):
        """Serialize as ``[[α_1, …, α_N, re, im], …]``."""
        return [
            [*alpha, float(value.real), float(value.imag)]
            for alpha, value in zip(self.support, self._values)
        ]

    @classmethod
    def from_records(cls, theta: ThetaMatrix, records: Iterable) -> "TorusElement":
        dimension = theta.dimension
        coefficients = {}
        for record in records:
            record = list(record)
            if len(record) != dimension + 2:
                raise DimensionMismatchException(dimension + 2, len(record), "record length")
            alpha = tuple(int(a) for a in record[:dimension])
            coefficients[alpha] = coefficients.get(alpha, 0j) + complex(
                record[dimension], record[dimension + 1]
            )
        return cls(theta, coefficients)

    def __repr__(self):
        terms = " + ".join(
            f"({complex(v):.6g})u^{alpha}" for alpha, v in zip(self.support, self._values)
        )
        return f"TorusElement({terms or '0'})"


def _check_same_theta(a: TorusElement, b: TorusElement):
    if a.theta != b.theta:
        raise ThetaMismatchException()


def check_axis(theta: ThetaMatrix, axis: int):
    if not 0 <= axis < theta.dimension:
        raise AxisOutOfRangeException(axis, theta.dimension)


def multiply(a: TorusElement, b: TorusElement) -> TorusElement:
    """Twisted convolution product ab."""
    _check_same_theta(a, b)
    theta = a.theta
    if a.is_zero or b.is_zero:
        return TorusElement.zero(theta)
    indices = (a.indices[:, None, :] + b.indices[None, :, :]).reshape(-1, theta.dimension)
    values = np.outer(a.values, b.values) * phase_table(theta, a.indices, b.indices)
    return TorusElement.from_arrays(theta, indices, values.ravel())


def adjoint(a: TorusElement) -> TorusElement:
    """The involution, from (u^α)* = (u^α)^{-1} = conj(φ(α, -α)) u^{-α}."""
    theta = a.theta
    if a.is_zero:
        return a
    quadratic = np.einsum("ij,jk,ik->i", a.indices, theta.phase_form, a.indices)
    values = np.conj(a.values) * np.exp(1j * TWO_PI * quadratic)
    return TorusElement.from_arrays(theta, -a.indices, values)


def trace(a: TorusElement) -> complex:
    """The canonical trace τ(Σ c_α u^α) = c_0."""
    return a.coefficient((0,) * a.dimension)


def derive(axis: int, a: TorusElement) -> TorusElement:
    """The derivation δ_k, acting by (δ_k a)_α = i α_k a_α."""
    check_axis(a.theta, axis)
    return TorusElement.from_arrays(a.theta, a.indices, 1j * a.indices[:, axis] * a.values)


def torus_act(z: Sequence[complex], a: TorusElement) -> TorusElement:
    """The automorphism σ_z(u^α) = z^α u^α of the dual torus action."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (a.dimension,):
        raise DimensionMismatchException(a.dimension, z.shape, "torus action parameter")
    deviation = float(np.abs(np.abs(z) - 1.0).max())
    if deviation > get_tolerances().equality:
        raise NotUnimodularException(deviation)
    angles = a.indices @ np.angle(z)
    return TorusElement.from_arrays(a.theta, a.indices, a.values * np.exp(1j * angles))


def inner(a: TorusElement, b: TorusElement) -> complex:
    """The L²(A_θ, τ) inner product τ(b*a), linear in ``a``."""
    _check_same_theta(a, b)
    return trace(multiply(adjoint(b), a))


def convolve(a: TorusElement, b: TorusElement) -> TorusElement:
    """Untwisted convolution of the coefficient maps, i.e. the θ = 0 product."""
    _check_same_theta(a, b)
    commutative = ThetaMatrix.zeros(a.dimension)
    product = multiply(
        TorusElement.from_arrays(commutative, a.indices, a.values),
        TorusElement.from_arrays(commutative, b.indices, b.values),
    )
    return TorusElement.from_arrays(a.theta, product.indices, product.values)
