"""Points of the moduli space (T^N)^n/σ_n of flat connections on 𝔥_n.

A commuting skew-adjoint family Λ with joint eigenvalues λ_j^k ∈ iℝ defines
the torus coordinates t_j^k = frac(Re(i·λ_j^k)). Gauging by
``diag_monomial`` adds −iα_k to a slot, so the coordinates move by integers
and stay put in T = ℝ/ℤ.
"""
import logging
from dataclasses import dataclass
from math import floor, log10
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .conf import Tolerances, get_tolerances
from .connection import Connection
from .core import adjoint, multiply, trace
from .exceptions import (
    DimensionMismatchException,
    MalformedParamException,
    NoPerfectMatchingException,
    NotUnitaryException,
)
from .matrix import MatrixElement, permutation_array, unitary_deviation
from .spectral import GaugeFixResult, TruncationWindow, gauge_fix, simdiag
from .utils import SeedLike, circular_distance, frac

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ModuliPoint:
    """Canonical representative: n lexicographically sorted rows in [0, 1)^N."""

    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[0] == 0:
            raise MalformedParamException(
                "point", f"expected n rows of N coordinates, got {coords.shape}"
            )
        if np.any(coords < 0.0) or np.any(coords >= 1.0):
            raise MalformedParamException("point", "coordinates must lie in [0, 1)")
        if not np.array_equal(coords, coords[_row_order(coords)]):
            raise MalformedParamException("point", "rows are not sorted lexicographically")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_rows(cls, rows, tolerance: Optional[float] = None) -> "ModuliPoint":
        """Reduce arbitrary real rows modulo one and sort them."""
        return cls(_canonical_rows(np.asarray(rows, dtype=float), tolerance))

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dimension(self) -> int:
        return self.coords.shape[1]

    def to_list(self):
        return self.coords.tolist()

    def __eq__(self, other):
        if not isinstance(other, ModuliPoint):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    __hash__ = None

    def __repr__(self):
        return f"ModuliPoint({self.coords.tolist()!r})"


def _row_order(rows: np.ndarray) -> np.ndarray:
    # np.lexsort treats its last key as the primary one
    return np.lexsort(rows.T[::-1])


def _canonical_rows(rows: np.ndarray, tolerance: Optional[float]) -> np.ndarray:
    """frac, quantize to the snapping resolution, wrap values near 1, sort."""
    if tolerance is None:
        tolerance = get_tolerances().snap
    decimals = max(0, int(floor(-log10(tolerance))))
    coords = np.round(frac(rows), decimals)
    coords[coords >= 1.0 - tolerance] = 0.0
    # normalizes -0.0
    coords = coords + 0.0
    return coords[_row_order(coords)]


def canonicalize(
    family: Sequence[np.ndarray],
    tolerance: Optional[float] = None,
    commutator_tolerance: Optional[float] = None,
) -> ModuliPoint:
    """The moduli point of a commuting skew-adjoint family Λ."""
    _, tuples = simdiag(family, commutator_tolerance)
    return ModuliPoint(_canonical_rows((1j * tuples).real, tolerance))


def moduli_of_with_result(
    connection: Connection,
    window: Optional[TruncationWindow] = None,
    tolerances: Optional[Tolerances] = None,
    seed: SeedLike = None,
) -> Tuple[ModuliPoint, GaugeFixResult]:
    """Gauge fix a flat connection and canonicalize its constant form."""
    tolerances = tolerances or get_tolerances()
    result = gauge_fix(connection, window, tolerances, seed)
    # Λ is only as commuting as the gauge fixing is accurate
    commutator_tolerance = max(tolerances.commutator, tolerances.gauge_residual)
    point = canonicalize(result.lambdas, tolerances.snap, commutator_tolerance)
    logger.info("Moduli point %s (gauge residual %.3e)", point.to_list(), result.residual)
    return point, result


def moduli_of(
    connection: Connection,
    window: Optional[TruncationWindow] = None,
    tolerances: Optional[Tolerances] = None,
    seed: SeedLike = None,
) -> ModuliPoint:
    return moduli_of_with_result(connection, window, tolerances, seed)[0]


def _check_shapes(first: ModuliPoint, second: ModuliPoint):
    if first.coords.shape != second.coords.shape:
        raise DimensionMismatchException(first.coords.shape, second.coords.shape, "point shape")


def match_rows(
    first: ModuliPoint, second: ModuliPoint, tolerance: Optional[float] = None
) -> Optional[Tuple[int, ...]]:
    """A permutation ρ with row i of ``first`` circularly close to row ρ(i) of ``second``.

    Returns:
        The permutation as a tuple, or None if no perfect matching exists.
    """
    if tolerance is None:
        tolerance = get_tolerances().equivalence
    _check_shapes(first, second)
    distances = circular_distance(first.coords[:, None, :], second.coords[None, :, :])
    allowed = np.all(distances <= tolerance, axis=2)
    matching = maximum_bipartite_matching(csr_matrix(allowed.astype(float)), perm_type="column")
    if np.any(matching < 0):
        return None
    return tuple(int(column) for column in matching)


def equivalent(first: ModuliPoint, second: ModuliPoint, tolerance: Optional[float] = None) -> bool:
    """Whether two points agree in (T^N)^n/σ_n up to ``tolerance``."""
    return match_rows(first, second, tolerance) is not None


def marriage_weights(unitary: MatrixElement) -> np.ndarray:
    """The doubly stochastic matrix x_ij = τ(U_ij U_ij*)."""
    size = unitary.n
    weights = np.zeros((size, size))
    for row in range(size):
        for column in range(size):
            entry = unitary[row, column]
            weights[row, column] = trace(multiply(entry, adjoint(entry))).real
    return weights


def hall_matching(
    unitary: MatrixElement,
    threshold: Optional[float] = None,
    unitary_tolerance: Optional[float] = None,
) -> Tuple[int, ...]:
    """A permutation ρ with x_{iρ(i)} > threshold for every row i.

    Raises:
        NotUnitaryException: Raised if ``unitary`` is not unitary
        NoPerfectMatchingException: Raised if the thresholded graph has no
            perfect matching
    """
    tolerances = get_tolerances()
    if threshold is None:
        threshold = tolerances.matching
    if unitary_tolerance is None:
        unitary_tolerance = tolerances.unitary
    deviation = unitary_deviation(unitary)
    if deviation > unitary_tolerance:
        raise NotUnitaryException(deviation, unitary_tolerance)
    weights = marriage_weights(unitary)
    graph = csr_matrix((weights > threshold).astype(float))
    matching = maximum_bipartite_matching(graph, perm_type="column")
    matched = int(np.count_nonzero(matching >= 0))
    if matched < unitary.n:
        raise NoPerfectMatchingException(matched, unitary.n)
    return tuple(int(column) for column in matching)


def integer_shift(
    family: Sequence[np.ndarray], slot: int, alpha: Sequence[int]
) -> list:
    """Λ after gauging by diag_monomial with u^α in ``slot``: λ_slot^k − iα_k."""
    shifted = []
    for axis, member in enumerate(family):
        member = np.array(member, dtype=complex)
        member[slot, slot] -= 1j * alpha[axis]
        shifted.append(member)
    return shifted


def permute_slots(family: Sequence[np.ndarray], permutation: Sequence[int]) -> list:
    """Λ conjugated by the permutation matrix of ρ."""
    array = permutation_array(permutation)
    return [array @ np.asarray(member, dtype=complex) @ array.T for member in family]
