"""Factories for the ``nctorus`` values.

All randomness is drawn from factory_boy's own generator, so that
``factory.random.reseed_random`` makes a test reproducible.
"""
import factory
import numpy as np
from factory.random import randgen

from .connection import Connection, constant_connection
from .core import ThetaMatrix, TorusElement
from .heisenberg import HeisenbergLattice
from .matrix import MatrixElement, diag_monomial, permutation_matrix, scalar_unitary


def numpy_rng() -> np.random.Generator:
    """A numpy generator seeded from factory_boy's random state."""
    return np.random.default_rng(randgen.getrandbits(64))


def random_theta_entries(dimension: int, bound: float = 0.5) -> np.ndarray:
    upper = np.triu(numpy_rng().uniform(-bound, bound, (dimension, dimension)), 1)
    return upper - upper.T


def random_coefficients(dimension: int, terms: int, degree: int) -> dict:
    """At most ``terms`` coefficients with ‖α‖_∞ ≤ degree."""
    rng = numpy_rng()
    indices = rng.integers(-degree, degree + 1, size=(terms, dimension))
    values = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    coefficients = {}
    for alpha, value in zip(indices, values):
        key = tuple(int(a) for a in alpha)
        coefficients[key] = coefficients.get(key, 0j) + value
    return coefficients


def random_unitary_scalar(n: int) -> np.ndarray:
    """A Haar distributed unitary n×n matrix."""
    rng = numpy_rng()
    gaussian = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    unitary, upper = np.linalg.qr(gaussian)
    phases = np.diag(upper) / np.abs(np.diag(upper))
    return unitary * phases


class ThetaMatrixFactory(factory.Factory):
    """Factory to create random antisymmetric parameter matrices."""

    class Meta:
        model = ThetaMatrix

    class Params:
        dimension = 2
        commutative = factory.Trait(
            entries=factory.LazyAttribute(lambda o: np.zeros((o.dimension, o.dimension)))
        )

    entries = factory.LazyAttribute(lambda o: random_theta_entries(o.dimension))


class TorusElementFactory(factory.Factory):
    """Factory to create random finitely supported elements."""

    class Meta:
        model = TorusElement

    class Params:
        dimension = 2
        terms = 5
        degree = 2

    theta = factory.SubFactory(ThetaMatrixFactory, dimension=factory.SelfAttribute("..dimension"))
    coefficients = factory.LazyAttribute(
        lambda o: random_coefficients(o.theta.dimension, o.terms, o.degree)
    )


def _random_entries(o):
    return [
        [
            TorusElement(o.theta, random_coefficients(o.theta.dimension, o.terms, o.degree))
            for _ in range(o.n)
        ]
        for _ in range(o.n)
    ]


class MatrixElementFactory(factory.Factory):
    """Factory to create random n×n matrix elements."""

    class Meta:
        model = MatrixElement

    class Params:
        dimension = 2
        n = 2
        terms = 3
        degree = 1

    theta = factory.SubFactory(ThetaMatrixFactory, dimension=factory.SelfAttribute("..dimension"))
    entries = factory.LazyAttribute(_random_entries)


def _skew_part(element: MatrixElement) -> MatrixElement:
    return (element - element.adjoint()) * 0.5


class ConnectionFactory(factory.Factory):
    """Factory to create random connections D + π(h) with skew-adjoint h_k."""

    class Meta:
        model = Connection

    class Params:
        dimension = 2
        n = 1
        terms = 3
        degree = 1

    theta = factory.SubFactory(ThetaMatrixFactory, dimension=factory.SelfAttribute("..dimension"))
    h = factory.LazyAttribute(
        lambda o: [
            _skew_part(MatrixElement(o.theta, _random_entries(o)))
            for _ in range(o.theta.dimension)
        ]
    )


def commuting_family(dimension: int, n: int, spread: float = 3.0) -> list:
    """Random commuting skew-adjoint diagonals Λ_k = i·diag(λ^k)."""
    rng = numpy_rng()
    return [np.diag(1j * rng.uniform(-spread, spread, n)) for _ in range(dimension)]


class FlatConnectionFactory(factory.Factory):
    """Factory to create constant connections D + π(Λ) from a commuting family."""

    class Meta:
        model = constant_connection

    class Params:
        dimension = 2
        n = 2

    theta = factory.SubFactory(ThetaMatrixFactory, dimension=factory.SelfAttribute("..dimension"))
    family = factory.LazyAttribute(lambda o: commuting_family(o.theta.dimension, o.n))


class GaugeUnitaryFactory(factory.Factory):
    """Factory to create the unitaries used as gauge words.

    ``kind`` is one of ``monomial`` (a diagonal of monomials), ``permutation``
    or ``constant`` (a Haar unitary scalar matrix), drawn at random by default.
    """

    class Meta:
        model = MatrixElement

    theta = factory.SubFactory(ThetaMatrixFactory)
    n = 2
    degree = 1
    kind = factory.LazyFunction(
        lambda: ("monomial", "permutation", "constant")[randgen.randrange(3)]
    )

    @classmethod
    def _create(cls, model_class, *args, **kwargs):
        theta, kind = kwargs["theta"], kwargs["kind"]
        size, degree = kwargs["n"], kwargs["degree"]
        if kind == "monomial":
            return diag_monomial(
                theta,
                [
                    [randgen.randint(-degree, degree) for _ in range(theta.dimension)]
                    for _ in range(size)
                ],
            )
        if kind == "permutation":
            permutation = list(range(size))
            randgen.shuffle(permutation)
            return permutation_matrix(theta, permutation)
        return scalar_unitary(theta, random_unitary_scalar(size))

    _build = _create


def _well_conditioned(p: int, limit: float = 1e3) -> np.ndarray:
    rng = numpy_rng()
    while True:
        generators = np.eye(2 * p) + 0.4 * rng.normal(size=(2 * p, 2 * p))
        if np.linalg.cond(generators) < limit:
            return generators


def diagonal_generators(p: int) -> np.ndarray:
    """diag(1, …, 1, c, …, c) with c drawn in [0.5, 2]."""
    scale = randgen.uniform(0.5, 2.0)
    return np.diag([1.0] * p + [scale] * p)


class HeisenbergLatticeFactory(factory.Factory):
    """Factory to create well-conditioned lattices in ℝ^p × ℝ̂^p."""

    class Meta:
        model = HeisenbergLattice

    class Params:
        diagonal = factory.Trait(
            generators=factory.LazyAttribute(lambda o: diagonal_generators(o.p))
        )

    p = 1
    generators = factory.LazyAttribute(lambda o: _well_conditioned(o.p))
