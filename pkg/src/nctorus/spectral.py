"""Fourier truncation of 𝔥_n, the operators Δ and H, and gauge fixing.

A :class:`TruncationWindow` keeps the basis vectors u^α ⊗ E_pq with
‖α‖_∞ ≤ M. Labels are enumerated lexicographically in (α, p, q), so the flat
index of a label is ``position(α)·n·columns + p·columns + q``.

Covariant derivatives act by left multiplication and therefore commute with
right multiplication by M_n(ℂ): every column of 𝔥_n carries the same
operator. A window with ``columns=1`` keeps a single column, which is all the
gauge fixing induction needs.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .conf import Tolerances, get_tolerances
from .connection import Classification, Connection, classify_curvature, gauge_transform, potential
from .core import ThetaMatrix, TorusElement, phase_table
from .exceptions import (
    AmbiguousRankException,
    AxisOutOfRangeException,
    DimensionMismatchException,
    GaugeFixStalledException,
    JointEigenvectorNotFoundException,
    NotConstantException,
    NotFlatException,
    SimultaneousDiagonalizationException,
)
from .matrix import (
    MatrixElement,
    check_scalar_family,
    hs_norm,
    mat_adjoint,
    mat_derive,
    mat_multiply,
    scalar_hs_norm,
    unitary_deviation,
)
from .utils import SeedLike, make_rng, sorted_eigh

logger = logging.getLogger(__name__)

DEFAULT_CUTOFF = 8


@dataclass(frozen=True)
class TruncationWindow:
    """The finite block ‖α‖_∞ ≤ cutoff of the basis of 𝔥_n."""

    cutoff: int
    n: int
    dimension: int
    columns: Optional[int] = None

    def __post_init__(self):
        if self.cutoff < 0:
            raise DimensionMismatchException("a non-negative value", self.cutoff, "window cutoff")
        if self.columns is None:
            object.__setattr__(self, "columns", self.n)
        if not 1 <= self.columns <= self.n:
            raise DimensionMismatchException(f"1..{self.n}", self.columns, "window columns")

    @classmethod
    def for_connection(
        cls, connection: Connection, cutoff: int = DEFAULT_CUTOFF, columns: Optional[int] = None
    ) -> "TruncationWindow":
        return cls(cutoff, connection.n, connection.dimension, columns)

    @property
    def side(self) -> int:
        return 2 * self.cutoff + 1

    @property
    def block(self) -> int:
        """Number of labels sharing one multi-index."""
        return self.n * self.columns

    @cached_property
    def alphas(self) -> np.ndarray:
        """All multi-indices of the window, lexicographically ordered."""
        span = range(-self.cutoff, self.cutoff + 1)
        alphas = np.array(list(itertools.product(span, repeat=self.dimension)), dtype=np.int64)
        alphas.setflags(write=False)
        return alphas.reshape(-1, self.dimension)

    @property
    def size(self) -> int:
        return self.alphas.shape[0] * self.block

    @property
    def basis(self) -> List[Tuple[Tuple[int, ...], int, int]]:
        """The enumerated (α, p, q) labels."""
        return [
            (tuple(int(a) for a in alpha), p, q)
            for alpha in self.alphas
            for p in range(self.n)
            for q in range(self.columns)
        ]

    def positions(self, alphas: np.ndarray) -> np.ndarray:
        """Position of each row of ``alphas`` in :attr:`alphas`, -1 outside the window."""
        alphas = np.asarray(alphas, dtype=np.int64).reshape(-1, self.dimension)
        strides = self.side ** np.arange(self.dimension - 1, -1, -1, dtype=np.int64)
        positions = (alphas + self.cutoff) @ strides
        inside = np.all(np.abs(alphas) <= self.cutoff, axis=1)
        return np.where(inside, positions, -1)

    def label_index(self, alpha: Sequence[int], p: int, q: int) -> int:
        position = int(self.positions(np.asarray(alpha))[0])
        if position < 0:
            raise DimensionMismatchException(
                f"‖α‖_∞ ≤ {self.cutoff}", tuple(alpha), "window label"
            )
        return position * self.block + p * self.columns + q

    def label_norms(self) -> np.ndarray:
        """‖α‖_∞ of every label, in basis order."""
        return np.repeat(np.abs(self.alphas).max(axis=1), self.block)

    def interior_indices(self, margin: int) -> np.ndarray:
        """Labels whose multi-index satisfies ‖α‖_∞ ≤ cutoff − margin."""
        return np.flatnonzero(self.label_norms() <= self.cutoff - margin)

    def grow(self) -> "TruncationWindow":
        """The window with a doubled cutoff."""
        return replace(self, cutoff=max(1, 2 * self.cutoff))

    def vector_from_element(self, element: MatrixElement) -> np.ndarray:
        """Coefficient vector of the first ``columns`` columns of an element.

        Coefficients outside the window are dropped.
        """
        vector = np.zeros((self.alphas.shape[0], self.n, self.columns), dtype=complex)
        for p in range(self.n):
            for q in range(self.columns):
                entry = element[p, q]
                if entry.is_zero:
                    continue
                positions = self.positions(entry.indices)
                inside = positions >= 0
                vector[positions[inside], p, q] = entry.values[inside]
        return vector.reshape(-1)

    def element_from_vector(
        self, theta: ThetaMatrix, vector: np.ndarray, cut: float = 0.0
    ) -> MatrixElement:
        """The element whose first ``columns`` columns carry ``vector``.

        Coefficients below ``cut`` times the largest magnitude are deleted.
        """
        values = np.asarray(vector, dtype=complex).reshape(-1, self.n, self.columns)
        threshold = cut * float(np.abs(values).max(initial=0.0))
        rows = []
        for p in range(self.n):
            row = []
            for q in range(self.n):
                if q >= self.columns:
                    row.append(TorusElement.zero(theta))
                    continue
                column = values[:, p, q]
                keep = np.abs(column) > threshold
                row.append(TorusElement.from_arrays(theta, self.alphas[keep], column[keep]))
            rows.append(row)
        return MatrixElement(theta, rows)


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """A linear operator on the span of a window's basis."""

    window: TruncationWindow
    sparse: sp.csr_matrix = field(repr=False)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense complex matrix of the operator."""
        return self.sparse.toarray()

    def _wrap(self, sparse) -> "TruncatedOperator":
        return TruncatedOperator(self.window, sp.csr_matrix(sparse))

    def _check(self, other: "TruncatedOperator"):
        if other.window != self.window:
            raise DimensionMismatchException(self.window, other.window, "truncation window")

    def __add__(self, other):
        if not isinstance(other, TruncatedOperator):
            return NotImplemented
        self._check(other)
        return self._wrap(self.sparse + other.sparse)

    def __sub__(self, other):
        if not isinstance(other, TruncatedOperator):
            return NotImplemented
        self._check(other)
        return self._wrap(self.sparse - other.sparse)

    def __neg__(self):
        return self._wrap(-self.sparse)

    def __mul__(self, scalar):
        return self._wrap(self.sparse * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, TruncatedOperator):
            self._check(other)
            return self._wrap(self.sparse @ other.sparse)
        return self.sparse @ other

    def adjoint(self) -> "TruncatedOperator":
        return self._wrap(self.sparse.conj().T)

    def symmetrized(self) -> "TruncatedOperator":
        """(A + A†)/2."""
        return self._wrap((self.sparse + self.sparse.conj().T) / 2)

    def hermitian_defect(self) -> float:
        difference = self.sparse - self.sparse.conj().T
        return float(np.abs(difference.data).max(initial=0.0))


def _diagonal(window: TruncationWindow, values: np.ndarray) -> TruncatedOperator:
    return TruncatedOperator(window, sp.diags(np.repeat(values, window.block), format="csr"))


def build_D(axis: int, window: TruncationWindow) -> TruncatedOperator:
    """D_k: the diagonal i·α_k."""
    if not 0 <= axis < window.dimension:
        raise AxisOutOfRangeException(axis, window.dimension)
    return _diagonal(window, 1j * window.alphas[:, axis])


def build_pi(element: MatrixElement, window: TruncationWindow) -> TruncatedOperator:
    """π(h): left multiplication by ``element``, targets outside the window dropped.

    The term c_β u^β of h_rp sends the label (α, p, q) to (α+β, r, q) with
    coefficient c_β φ(β, α).
    """
    if element.n != window.n or element.theta.dimension != window.dimension:
        raise DimensionMismatchException(
            (window.n, window.dimension), (element.n, element.theta.dimension), "operator shape"
        )
    theta = element.theta
    alphas = window.alphas
    count = alphas.shape[0]
    rows, columns, values = [], [], []
    for r in range(window.n):
        for p in range(window.n):
            entry = element[r, p]
            if entry.is_zero:
                continue
            targets = entry.indices[:, None, :] + alphas[None, :, :]
            positions = window.positions(targets.reshape(-1, window.dimension)).reshape(
                len(entry), count
            )
            coefficients = entry.values[:, None] * phase_table(theta, entry.indices, alphas)
            sources = np.broadcast_to(np.arange(count), positions.shape)
            inside = positions >= 0
            for q in range(window.columns):
                rows.append(positions[inside] * window.block + r * window.columns + q)
                columns.append(sources[inside] * window.block + p * window.columns + q)
                values.append(coefficients[inside])
    if not values:
        return TruncatedOperator(window, sp.csr_matrix((window.size, window.size), dtype=complex))
    matrix = sp.coo_matrix(
        (np.concatenate(values), (np.concatenate(rows), np.concatenate(columns))),
        shape=(window.size, window.size),
    )
    return TruncatedOperator(window, matrix.tocsr())


def build_laplacian(window: TruncationWindow) -> TruncatedOperator:
    """Δ = −Σ_k D_k², the diagonal ‖α‖₂²."""
    return _diagonal(window, np.sum(window.alphas**2, axis=1).astype(complex))


def covariant_derivatives(
    connection: Connection, window: TruncationWindow
) -> List[TruncatedOperator]:
    """The truncated ∇_k = D_k + π(h_k)."""
    return [
        build_D(axis, window) + build_pi(element, window)
        for axis, element in enumerate(connection.h)
    ]


def build_H(connection: Connection, window: TruncationWindow) -> TruncatedOperator:
    """H = −Σ_k ∇_k², symmetrized."""
    total = None
    for derivative in covariant_derivatives(connection, window):
        square = derivative @ derivative
        total = -square if total is None else total - square
    defect = total.hermitian_defect()
    logger.debug("Truncated H of size %d has hermitian defect %.3e", window.size, defect)
    return total.symmetrized()


def build_H_expanded(connection: Connection, window: TruncationWindow) -> TruncatedOperator:
    """H written as Δ − 2Σ_k π(h_k)D_k − π(h) with the potential h.

    It agrees with :func:`build_H` on interior labels.
    """
    total = build_laplacian(window) - build_pi(potential(connection), window)
    for axis, element in enumerate(connection.h):
        total = total - 2 * (build_pi(element, window) @ build_D(axis, window))
    return total


def comparison_constant(connection: Connection) -> float:
    """A constant C with Δ ≤ C(H + 1).

    From D_k = ∇_k − π(h_k) and ‖π(h_k)‖ ≤ Σ_pq ‖(h_k)_pq‖_ℓ¹.
    """
    bound = sum(
        sum(entry.l1_norm for row in element.entries for entry in row) ** 2
        for element in connection.h
    )
    return 2.0 * max(1.0, bound)


def truncated_spectrum(operator: TruncatedOperator) -> np.ndarray:
    """Sorted real eigenvalues of the symmetrized operator."""
    values, _ = sorted_eigh(operator.matrix)
    return values


class EigenCluster(NamedTuple):
    """Eigenvalues within the gap tolerance of their smallest member."""

    value: float
    values: np.ndarray
    vectors: np.ndarray


def eigen_clusters(
    operator: TruncatedOperator, gap: Optional[float] = None
) -> Iterator[EigenCluster]:
    """Group the spectrum of a Hermitian operator from the bottom up."""
    if gap is None:
        gap = get_tolerances().gap
    values, vectors = sorted_eigh(operator.matrix)
    start = 0
    while start < len(values):
        tolerance = max(gap, gap * abs(values[start]))
        stop = start + int(np.searchsorted(values[start:], values[start] + tolerance, "right"))
        yield EigenCluster(float(values[start]), values[start:stop], vectors[:, start:stop])
        start = stop


def lowest_eigenspace(
    operator: TruncatedOperator, gap: Optional[float] = None
) -> Tuple[float, np.ndarray]:
    """Smallest eigenvalue and an orthonormal basis of its cluster."""
    cluster = next(eigen_clusters(operator, gap))
    logger.debug(
        "Lowest eigenvalue %.12g with multiplicity %d", cluster.value, cluster.values.size
    )
    return cluster.value, cluster.vectors


def boundary_mass(window: TruncationWindow, vector: np.ndarray) -> float:
    """Fraction of the ℓ² mass of ``vector`` on the outer shell ‖α‖_∞ = cutoff."""
    weights = np.abs(np.asarray(vector).reshape(-1)) ** 2
    total = float(weights.sum())
    if total == 0.0:
        return 0.0
    return float(weights[window.label_norms() == window.cutoff].sum() / total)


def _joint_eigenvector(
    derivatives: Sequence[TruncatedOperator],
    subspace: np.ndarray,
    tolerances: Tolerances,
    rng: np.random.Generator,
):
    """Diagonalize a random real combination Σ c_k i∇_k on the subspace."""
    images = [derivative @ subspace for derivative in derivatives]
    blocks = [1j * (subspace.conj().T @ image) for image in images]
    residual_log = []
    for attempt in range(tolerances.joint_retries):
        weights = rng.standard_normal(len(blocks))
        combination = sum(weight * block for weight, block in zip(weights, blocks))
        _, mixing = sorted_eigh(combination)
        for candidate in range(mixing.shape[1]):
            vector = subspace @ mixing[:, candidate]
            vector = vector / np.linalg.norm(vector)
            eigenvalues = np.array(
                [np.vdot(vector, derivative @ vector) for derivative in derivatives]
            )
            residual = max(
                float(np.linalg.norm(derivative @ vector - value * vector))
                for derivative, value in zip(derivatives, eigenvalues)
            )
            residual = max(residual, float(np.abs(eigenvalues.real).max()))
            residual_log.append(residual)
            if residual <= tolerances.joint_eigen:
                logger.debug(
                    "Joint eigenvector found on attempt %d (residual %.3e)", attempt + 1, residual
                )
                return vector, 1j * eigenvalues.imag
        logger.debug("Attempt %d found no joint eigenvector, retrying", attempt + 1)
    raise JointEigenvectorNotFoundException(residual_log)


def _check_flat(connection: Connection, tolerances: Tolerances):
    report = classify_curvature(connection, tolerances.curvature)
    if report.classification is not Classification.ZERO:
        raise NotFlatException(report.classification.value, report.residual)


def common_eigenvector(
    connection: Connection,
    subspace: np.ndarray,
    window: TruncationWindow,
    tolerances: Optional[Tolerances] = None,
    seed: SeedLike = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """A unit vector ξ in ``subspace`` with ∇_k ξ = λ_k ξ for every k.

    Args:
        connection: A flat connection
        subspace: Orthonormal columns spanning a ∇-invariant subspace
        window: The window the subspace lives in
        tolerances: Thresholds, the configured ones when omitted
        seed: Seed or generator for the random combination coefficients

    Returns:
        The vector and the purely imaginary eigenvalues (λ_1, …, λ_N).

    Raises:
        NotFlatException: Raised if the connection is not flat
        JointEigenvectorNotFoundException: Raised when every retry fails
    """
    tolerances = tolerances or get_tolerances()
    _check_flat(connection, tolerances)
    derivatives = covariant_derivatives(connection, window)
    return _joint_eigenvector(derivatives, np.asarray(subspace), tolerances, make_rng(seed))


def partial_isometry_from(x: MatrixElement, tolerance: Optional[float] = None) -> MatrixElement:
    """v = x·y^{-1/2} with y = c + (1 − p), where c = x*x is a constant matrix.

    Raises:
        NotConstantException: Raised if x*x carries non-constant modes
        AmbiguousRankException: Raised if an eigenvalue of c sits within a
            decade of the rank threshold
    """
    if tolerance is None:
        tolerance = get_tolerances().rank
    square = mat_multiply(mat_adjoint(x), x)
    deviation = max(hs_norm(mat_derive(axis, square)) for axis in range(x.theta.dimension))
    if deviation > tolerance:
        raise NotConstantException("x*x", deviation)
    constant = square.constant_part()
    constant = (constant + constant.conj().T) / 2
    values, vectors = sorted_eigh(constant)
    if np.any((values > tolerance / 10) & (values < tolerance * 10)):
        raise AmbiguousRankException(values, tolerance)
    support = values > tolerance
    scales = np.where(support, 1.0 / np.sqrt(np.where(support, values, 1.0)), 1.0)
    inverse_root = (vectors * scales) @ vectors.conj().T
    return mat_multiply(x, MatrixElement.from_scalar(x.theta, inverse_root))


def _alignment(projection: np.ndarray, target: np.ndarray, tolerances: Tolerances) -> np.ndarray:
    """The scalar partial isometry |f⟩⟨e|.

    e is the first standard basis vector left over by Gram-Schmidt against
    im(projection); f is the first non-zero column of ``target``, normalized.
    """
    size = projection.shape[0]
    values, vectors = sorted_eigh(projection)
    image = vectors[:, values > 0.5]
    source = None
    for index in range(size):
        residual = np.eye(size)[:, index] - image @ (image.conj().T[:, index])
        if np.linalg.norm(residual) ** 2 > 1.0 / (2 * size):
            source = residual / np.linalg.norm(residual)
            break
    norms = np.linalg.norm(target, axis=0)
    index = int(np.flatnonzero(norms > np.sqrt(tolerances.rank))[0])
    destination = target[:, index] / norms[index]
    return np.outer(destination, source.conj())


@dataclass
class GaugeFixResult:
    """Outcome of :func:`gauge_fix`.

    ``u`` satisfies γ_{u*}(∇) ≈ constant_connection(Λ); ``residual`` measures
    that approximation. ``flagged`` is set when the residual, the unitary
    deviation of ``u`` or the boundary mass of an eigenvector exceeds its
    tolerance.
    """

    u: MatrixElement
    lambdas: List[np.ndarray]
    residual: float
    isometry_log: List[float]
    joint_eigenvalues: np.ndarray
    eigenvalues: List[float]
    boundary_mass: float
    window: TruncationWindow
    unitary_deviation: float = 0.0
    flagged: bool = False


def _annihilated(
    cluster: EigenCluster, projector: Optional[TruncatedOperator], tolerances: Tolerances
) -> np.ndarray:
    """Orthonormal basis of cluster ∩ ker π(P)."""
    if projector is None:
        return cluster.vectors
    compressed = cluster.vectors.conj().T @ (projector @ cluster.vectors)
    values, vectors = sorted_eigh(compressed)
    return cluster.vectors @ vectors[:, values < tolerances.annihilation]


def gauge_fix(
    connection: Connection,
    window: Optional[TruncationWindow] = None,
    tolerances: Optional[Tolerances] = None,
    seed: SeedLike = None,
) -> GaugeFixResult:
    """Find a unitary u and a commuting family Λ with π(u*)∇_kπ(u) = D_k + π(Λ_k).

    The induction collects joint eigenvectors of the covariant derivatives,
    each annihilated by the projections collected so far, and turns them into
    partial isometries v_i whose sum is u.

    Raises:
        NotFlatException: Raised if the connection is not flat
        GaugeFixStalledException: Raised if no admissible eigenvector is found
    """
    tolerances = tolerances or get_tolerances()
    rng = make_rng(seed)
    _check_flat(connection, tolerances)
    theta, size = connection.theta, connection.n
    if window is None:
        window = TruncationWindow.for_connection(connection, columns=1)
    elif window.columns != 1:
        window = replace(window, columns=1)

    derivatives = covariant_derivatives(connection, window)
    clusters = list(eigen_clusters(build_H(connection, window), tolerances.gap))
    logger.debug(
        "Gauge fixing n=%d on %d labels, %d eigenvalue clusters",
        size,
        window.size,
        len(clusters),
    )

    isometries: List[MatrixElement] = []
    projection = np.zeros((size, size), dtype=complex)
    lambdas = [np.zeros((size, size), dtype=complex) for _ in range(connection.dimension)]
    isometry_log: List[float] = []
    joint_eigenvalues = []
    used_eigenvalues: List[float] = []
    worst_boundary = 0.0
    rank = 0.0
    projector = None

    while rank < size - 0.5:
        step = len(isometries) + 1
        for cluster in clusters:
            subspace = _annihilated(cluster, projector, tolerances)
            if subspace.shape[1]:
                break
        else:
            raise GaugeFixStalledException(
                step, rank, {"isometry_log": isometry_log, "eigenvalues": used_eigenvalues}
            )
        vector, eigenvalues = _joint_eigenvector(derivatives, subspace, tolerances, rng)
        mass = boundary_mass(window, vector)
        worst_boundary = max(worst_boundary, mass)
        if mass > tolerances.boundary_mass:
            logger.warning(
                "Eigenvector of step %d has boundary mass %.3e, the window should grow",
                step,
                mass,
            )

        x = window.element_from_vector(theta, vector, tolerances.chop)
        w = partial_isometry_from(x, tolerances.rank)
        w_square = mat_multiply(mat_adjoint(w), w).constant_part()
        v = mat_multiply(
            w, MatrixElement.from_scalar(theta, _alignment(projection, w_square, tolerances))
        )
        v_square = mat_multiply(mat_adjoint(v), v).constant_part()
        v_square = (v_square + v_square.conj().T) / 2

        new_rank = float(np.trace(projection + v_square).real)
        if new_rank - rank < 1.0 - tolerances.rank:
            raise GaugeFixStalledException(
                step,
                new_rank,
                {"isometry_log": isometry_log + [new_rank], "eigenvalues": used_eigenvalues},
            )
        isometries.append(v)
        projection = projection + v_square
        rank = new_rank
        for axis, value in enumerate(eigenvalues):
            lambdas[axis] = lambdas[axis] + value * v_square
        isometry_log.append(rank)
        joint_eigenvalues.append(eigenvalues)
        used_eigenvalues.append(cluster.value)
        logger.debug(
            "Step %d: H eigenvalue %.10g, joint eigenvalues %s, tr(v*v) = %.9f",
            step,
            cluster.value,
            np.round(eigenvalues, 10).tolist(),
            rank,
        )
        range_projection = sum(
            (mat_multiply(isometry, mat_adjoint(isometry)) for isometry in isometries[1:]),
            mat_multiply(isometries[0], mat_adjoint(isometries[0])),
        )
        projector = build_pi(range_projection, window)

    u = sum(isometries[1:], isometries[0])
    deviation = unitary_deviation(u)
    # measured here and reported through the flag
    gauged = gauge_transform(mat_adjoint(u), connection, tolerance=float("inf"))
    residual = max(
        hs_norm(element - MatrixElement.from_scalar(theta, family_member))
        for element, family_member in zip(gauged.h, lambdas)
    )
    flagged = (
        residual > tolerances.gauge_residual
        or deviation > tolerances.unitary
        or worst_boundary > tolerances.boundary_mass
    )
    if deviation > tolerances.unitary:
        logger.warning("Gauge fixing unitary deviates by %.3e", deviation)
    if residual > tolerances.gauge_residual:
        logger.warning(
            "Gauge fixing residual %.3e exceeds %.1e", residual, tolerances.gauge_residual
        )
    logger.info("Gauge fixing finished in %d steps, residual %.3e", len(isometries), residual)
    return GaugeFixResult(
        u=u,
        lambdas=lambdas,
        residual=residual,
        isometry_log=isometry_log,
        joint_eigenvalues=np.array(joint_eigenvalues),
        eigenvalues=used_eigenvalues,
        boundary_mass=worst_boundary,
        window=window,
        unitary_deviation=deviation,
        flagged=flagged,
    )


def _refine(vectors: np.ndarray, family: Sequence[np.ndarray], depth: int, gap: float):
    """Split a degenerate block of joint eigenvectors with the next operator."""
    if depth == len(family):
        return vectors
    hermitian = 1j * (vectors.conj().T @ family[depth] @ vectors)
    values, mixing = sorted_eigh(hermitian)
    refined = vectors @ mixing
    start = 0
    while start < len(values):
        tolerance = max(gap, gap * abs(values[start]))
        (members,) = np.where(np.abs(values - values[start]) < tolerance)
        members = members[members >= start]
        if len(members) > 1:
            refined[:, members] = _refine(refined[:, members], family, depth + 1, gap)
        start = members[-1] + 1
    return refined


def simdiag(
    family: Sequence[np.ndarray],
    tolerance: Optional[float] = None,
    gap: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Simultaneously diagonalize commuting skew-adjoint matrices.

    Returns:
        A unitary û with û Λ_k û* diagonal for every k, and the (n, N) array
        whose row j is the joint tuple (λ_j^1, …, λ_j^N).

    Raises:
        NotSkewAdjointException: Raised if some Λ_k is not skew-adjoint
        NonCommutingFamilyException: Raised if two members do not commute
        SimultaneousDiagonalizationException: Raised if the conjugated family is not
            diagonal within tolerance
    """
    tolerances = get_tolerances()
    if tolerance is None:
        tolerance = tolerances.commutator
    if gap is None:
        gap = tolerances.gap
    arrays = check_scalar_family(family, commutator_tolerance=tolerance)
    size = arrays[0].shape[0]
    off_diagonal = max(float(np.abs(array - np.diag(np.diag(array))).max()) for array in arrays)
    if off_diagonal <= tolerance:
        return np.eye(size, dtype=complex), np.stack([np.diag(array) for array in arrays], axis=1)

    vectors = _refine(np.eye(size, dtype=complex), arrays, 0, gap)
    unitary = vectors.conj().T
    conjugated = [unitary @ array @ vectors for array in arrays]
    tuples = np.stack([np.diag(array) for array in conjugated], axis=1)
    defect = max(scalar_hs_norm(array - np.diag(np.diag(array))) for array in conjugated)
    logger.debug("Simultaneous diagonalization of %d matrices, defect %.3e", len(arrays), defect)
    # a family admitted at a loose commutator tolerance may keep a defect of that order
    limit = max(tolerances.joint_eigen, tolerance)
    if defect > limit:
        raise SimultaneousDiagonalizationException(defect, limit)
    return unitary, tuples
