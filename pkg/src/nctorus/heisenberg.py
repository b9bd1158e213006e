"""Lattices in ℝ^p × ℝ̂^p, their connections on S(ℝ^p) and the induced tori.

A lattice is given by the 2p×2p matrix G whose column k is the generator
g^k = (r^k; φ^k). The unitaries (u_{(r,φ)} f)(m) = exp(i m·φ) f(m + r) obey

    u_g u_h = exp(i r_g·φ_h) u_{g+h},

so the generators commute up to exp(2πi θ_kl) with
θ_kl = (r^k·φ^l − r^l·φ^k)/(2π) = (GᵀJG)_kl/(2π), J = [[0, 1], [−1, 0]].

The connection ∇_k = Σ_l C_kl s_l + Σ_l D_kl ∂_l with s_l f = −i x_l f is
stored through the real matrix K = G⁻¹, with (C D) = −iK.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence

import numpy as np

from .conf import Tolerances, get_tolerances
from .core import ThetaMatrix
from .exceptions import (
    AxisOutOfRangeException,
    DimensionMismatchException,
    DualPairingException,
    SingularLatticeException,
)
from .utils import frac

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

CURVATURE_CONVENTION = "[∇_k, ∇_l] = -i·F_kl, F = K_L K_Rᵀ − K_R K_Lᵀ"
COEFFICIENT_CONVENTION = "(C D) = -i·K with K = G⁻¹"


def symplectic_form(p: int) -> np.ndarray:
    """J = [[0, 1_p], [−1_p, 0]], so that gᵀJh = r_g·φ_h − φ_g·r_h."""
    identity = np.eye(p)
    zero = np.zeros((p, p))
    return np.block([[zero, identity], [-identity, zero]])


def _condition_number(matrix: np.ndarray) -> float:
    condition = float(np.linalg.cond(matrix))
    return condition if np.isfinite(condition) else float("inf")


@dataclass(frozen=True, eq=False)
class HeisenbergLattice:
    """A lattice in ℝ^p × ℝ̂^p given by its generator matrix."""

    p: int
    generators: np.ndarray
    condition_number: float = field(init=False)

    def __post_init__(self):
        generators = np.array(self.generators, dtype=float)
        if self.p < 1 or generators.shape != (2 * self.p, 2 * self.p):
            raise DimensionMismatchException(
                (2 * self.p, 2 * self.p), generators.shape, "lattice generator matrix"
            )
        limit = get_tolerances().lattice_condition
        condition = _condition_number(generators)
        if not condition <= limit:
            raise SingularLatticeException(condition, limit)
        generators.setflags(write=False)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "condition_number", condition)

    @property
    def positions(self) -> np.ndarray:
        """R, the p×2p block of position components r^k."""
        return self.generators[: self.p]

    @property
    def momenta(self) -> np.ndarray:
        """Φ, the p×2p block of frequency components φ^k."""
        return self.generators[self.p :]

    def generator(self, index: int):
        """The pair (r^k, φ^k) of column ``index``."""
        if not 0 <= index < 2 * self.p:
            raise AxisOutOfRangeException(index, 2 * self.p)
        column = self.generators[:, index]
        return column[: self.p], column[self.p :]

    def symplectic_pairing(self, other: Optional["HeisenbergLattice"] = None) -> np.ndarray:
        """The matrix (g^kᵀ J h^l) between the generators of two lattices."""
        other = other or self
        return self.generators.T @ symplectic_form(self.p) @ other.generators

    def to_dict(self):
        return {"p": self.p, "G": self.generators.tolist()}


@dataclass(frozen=True, eq=False)
class ConnectionCoefficients:
    """The coefficients (C D) = −iK of the lattice connection."""

    p: int
    K: np.ndarray  # pylint: disable=invalid-name
    identity_residual: float = 0.0

    @property
    def left(self) -> np.ndarray:
        """K_L, the first p columns of K (C = −iK_L)."""
        return self.K[:, : self.p]

    @property
    def right(self) -> np.ndarray:
        """K_R, the last p columns of K (D = −iK_R)."""
        return self.K[:, self.p :]

    @property
    def C(self) -> np.ndarray:  # pylint: disable=invalid-name
        return -1j * self.left

    @property
    def D(self) -> np.ndarray:  # pylint: disable=invalid-name
        return -1j * self.right


def solve_connection(
    lattice: HeisenbergLattice, tolerances: Optional[Tolerances] = None
) -> ConnectionCoefficients:
    """Solve i(CR + DΦ) = 1 for the connection coefficients.

    With (C D) = −iK this reads K·G = 1, hence K = G⁻¹.
    """
    tolerances = tolerances or get_tolerances()
    inverse = np.linalg.inv(lattice.generators)
    residual = float(np.abs(inverse @ lattice.generators - np.eye(2 * lattice.p)).max())
    if residual > tolerances.lattice_identity:
        logger.warning(
            "K·G deviates from the identity by %.3e (condition number %.3e)",
            residual,
            lattice.condition_number,
        )
    inverse.setflags(write=False)
    return ConnectionCoefficients(lattice.p, inverse, residual)


def _check_axis(coefficients: ConnectionCoefficients, axis: int):
    if not 0 <= axis < 2 * coefficients.p:
        raise AxisOutOfRangeException(axis, 2 * coefficients.p)


def commutator_coefficient(
    coefficients: ConnectionCoefficients,
    axis: int,
    position: Sequence[float],
    momentum: Sequence[float],
) -> float:
    """The real number (K(r; φ))_k.

    [∇_k, u_{(r,φ)}] = i(Cr + Dφ)_k u_{(r,φ)} and i(Cr + Dφ)_k = (K(r; φ))_k.
    """
    _check_axis(coefficients, axis)
    vector = np.concatenate([np.asarray(position, dtype=float), np.asarray(momentum, dtype=float)])
    if vector.shape != (2 * coefficients.p,):
        raise DimensionMismatchException(2 * coefficients.p, vector.shape, "lattice vector")
    return float(coefficients.K[axis] @ vector)


def coefficient_derivation(
    coefficients: ConnectionCoefficients,
    lattice: HeisenbergLattice,
    axis: int,
    coordinates: Sequence[int],
) -> complex:
    """The scalar by which [∇_k, ·] acts on the lattice unitary u_{Gh}.

    Compatibility makes it i·h_k, the derivation δ_k of the induced torus.
    """
    _check_axis(coefficients, axis)
    vector = lattice.generators @ np.asarray(coordinates, dtype=float)
    return 1j * commutator_coefficient(
        coefficients, axis, vector[: lattice.p], vector[lattice.p :]
    )


def curvature_constant(coefficients: ConnectionCoefficients) -> np.ndarray:
    """F = K_L K_Rᵀ − K_R K_Lᵀ, with [∇_k, ∇_l] = −i·F_kl.

    From [s_l, ∂_m] = iδ_lm, the commutator of two covariant derivatives is
    i(CDᵀ − DCᵀ)_kl = −i·F_kl. It is exactly antisymmetric.
    """
    product = coefficients.left @ coefficients.right.T
    return product - product.T


def pairing_defect(first: HeisenbergLattice, second: HeisenbergLattice) -> float:
    """Largest distance of g·Jh/(2π) to ℤ over generator pairs."""
    scaled = first.symplectic_pairing(second) / TWO_PI
    return float(np.abs(scaled - np.round(scaled)).max())


def dual_lattice(
    lattice: HeisenbergLattice, tolerances: Optional[Tolerances] = None
) -> HeisenbergLattice:
    """The lattice {g : r_g·φ_h − r_h·φ_g ∈ 2πℤ for every h in the lattice}.

    Its generator matrix is 2π(JG)^{-T}, whose pairing with G is exactly 2π·1.

    Raises:
        DualPairingException: Raised if the computed generators fail the
            pairing integrality check
    """
    tolerances = tolerances or get_tolerances()
    product = symplectic_form(lattice.p) @ lattice.generators
    dual = HeisenbergLattice(lattice.p, TWO_PI * np.linalg.inv(product).T)
    defect = pairing_defect(dual, lattice)
    if defect > tolerances.pairing:
        raise DualPairingException(defect, tolerances.pairing)
    return dual


def same_lattice(
    first: HeisenbergLattice, second: HeisenbergLattice, tolerance: Optional[float] = None
) -> bool:
    """Whether two generator matrices span the same lattice.

    That is the case when G₁⁻¹G₂ is an integer matrix of determinant ±1.
    """
    if tolerance is None:
        tolerance = get_tolerances().pairing
    if first.p != second.p:
        return False
    change = np.linalg.solve(first.generators, second.generators)
    integral = np.round(change)
    if np.abs(change - integral).max() > tolerance:
        return False
    return round(abs(float(np.linalg.det(integral)))) == 1


def theta_of(lattice: HeisenbergLattice, tolerances: Optional[Tolerances] = None) -> ThetaMatrix:
    """The torus generated by the lattice unitaries.

    θ_kl for k < l is the representative in [0, 1) of (GᵀJG)_kl/(2π), values
    within the pairing tolerance of an integer become 0, and θ_lk = −θ_kl.
    """
    tolerances = tolerances or get_tolerances()
    raw = lattice.symplectic_pairing() / TWO_PI
    size = 2 * lattice.p
    entries = np.zeros((size, size))
    for first in range(size):
        for second in range(first + 1, size):
            value = raw[first, second]
            if abs(value - round(value)) <= tolerances.pairing:
                reduced = 0.0
            else:
                reduced = float(frac(value))
            entries[first, second] = reduced
            entries[second, first] = -reduced
    return ThetaMatrix(entries)


def translation_modulation(position: Sequence[float], momentum: Sequence[float]) -> Callable:
    """The operator u_{(r,φ)}: f ↦ (m ↦ exp(i m·φ) f(m + r)).

    Functions act on arrays of points of shape (..., p).
    """
    position = np.asarray(position, dtype=float)
    momentum = np.asarray(momentum, dtype=float)

    def operator(function: Callable) -> Callable:
        def transformed(points):
            points = np.asarray(points, dtype=float)
            return np.exp(1j * (points @ momentum)) * function(points + position)

        return transformed

    return operator


def gaussian(points):
    points = np.asarray(points, dtype=float)
    return np.exp(-0.5 * np.sum(points**2, axis=-1))


def phase_check(
    lattice: HeisenbergLattice, points: np.ndarray, theta: Optional[ThetaMatrix] = None
) -> float:
    """Largest deviation of u_k u_l = exp(2πi θ_kl) u_l u_k on sampled points."""
    theta = theta or theta_of(lattice)
    points = np.asarray(points, dtype=float).reshape(-1, lattice.p)
    operators = [translation_modulation(*lattice.generator(k)) for k in range(2 * lattice.p)]
    deviation = 0.0
    for first in range(2 * lattice.p):
        for second in range(first + 1, 2 * lattice.p):
            forward = operators[first](operators[second](gaussian))(points)
            backward = operators[second](operators[first](gaussian))(points)
            factor = np.exp(2j * np.pi * theta.entries[first, second])
            deviation = max(deviation, float(np.abs(forward - factor * backward).max()))
    return deviation


def epsilon_of(
    lattice: HeisenbergLattice,
    dual_coefficients: ConnectionCoefficients,
    coefficients: ConnectionCoefficients,
) -> np.ndarray:
    """ε = K̃K⁻¹, so that Σ_l ε_kl ∇_l = ∇̃_k at the coefficient level.

    Raises:
        SingularLatticeException: Raised if K is singular or ill-conditioned
    """
    if coefficients.p != lattice.p or dual_coefficients.p != lattice.p:
        raise DimensionMismatchException(
            lattice.p, (coefficients.p, dual_coefficients.p), "lattice rank"
        )
    limit = get_tolerances().lattice_condition
    condition = _condition_number(coefficients.K)
    if not condition <= limit:
        raise SingularLatticeException(condition, limit)
    return np.linalg.solve(coefficients.K.T, dual_coefficients.K.T).T


@dataclass
class IntegrabilityReport:
    """Everything checkable about the integrability of the lattice connection."""

    lattice: HeisenbergLattice
    dual: HeisenbergLattice
    theta: ThetaMatrix
    dual_theta: ThetaMatrix
    coefficients: ConnectionCoefficients
    dual_coefficients: ConnectionCoefficients
    curvature: np.ndarray
    dual_curvature: np.ndarray
    epsilon: np.ndarray
    epsilon_residual: float
    epsilon_determinant: float
    pairing_defect: float
    phase_deviation: float
    dual_phase_deviation: float
    flags: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.flags.values())


DEFAULT_SAMPLE_POINTS = 5


def integrability_report(
    lattice: HeisenbergLattice,
    tolerances: Optional[Tolerances] = None,
    points: Optional[np.ndarray] = None,
) -> IntegrabilityReport:
    """Run the whole lattice pipeline and collect its checks."""
    tolerances = tolerances or get_tolerances()
    if points is None:
        points = np.linspace(-1.0, 1.0, DEFAULT_SAMPLE_POINTS)[:, None] * np.ones(lattice.p)
    dual = dual_lattice(lattice, tolerances)
    coefficients = solve_connection(lattice, tolerances)
    dual_coefficients = solve_connection(dual, tolerances)
    epsilon = epsilon_of(lattice, dual_coefficients, coefficients)
    epsilon_residual = float(np.abs(epsilon @ coefficients.K - dual_coefficients.K).max())
    determinant = float(np.linalg.det(epsilon))
    theta = theta_of(lattice, tolerances)
    dual_theta = theta_of(dual, tolerances)
    curvature = curvature_constant(coefficients)
    dual_curvature = curvature_constant(dual_coefficients)
    defect = pairing_defect(dual, lattice)
    identity_residual = max(coefficients.identity_residual, dual_coefficients.identity_residual)
    identity_limit = tolerances.lattice_identity * max(
        1.0, lattice.condition_number, dual.condition_number
    )
    phase_deviation = phase_check(lattice, points, theta)
    dual_phase_deviation = phase_check(dual, points, dual_theta)

    if np.abs(curvature).max() > tolerances.lattice_identity:
        logger.warning(
            "Finding: the lattice connection has non-zero constant curvature "
            "(max |F_kl| = %.6g, %s)",
            float(np.abs(curvature).max()),
            CURVATURE_CONVENTION,
        )
    flags = {
        "curvature_constant": bool(np.array_equal(curvature, -curvature.T)),
        "connection_identity": identity_residual <= identity_limit,
        "epsilon_invertible": abs(determinant) > tolerances.equality,
        "epsilon_consistent": epsilon_residual <= tolerances.equality,
        "dual_pairing_integral": defect <= tolerances.pairing,
        "phase_check": max(phase_deviation, dual_phase_deviation) <= TWO_PI * tolerances.pairing,
    }
    logger.info("Integrability report for p=%d: %s", lattice.p, flags)
    return IntegrabilityReport(
        lattice=lattice,
        dual=dual,
        theta=theta,
        dual_theta=dual_theta,
        coefficients=coefficients,
        dual_coefficients=dual_coefficients,
        curvature=curvature,
        dual_curvature=dual_curvature,
        epsilon=epsilon,
        epsilon_residual=epsilon_residual,
        epsilon_determinant=determinant,
        pairing_defect=defect,
        phase_deviation=phase_deviation,
        dual_phase_deviation=dual_phase_deviation,
        flags=flags,
    )
