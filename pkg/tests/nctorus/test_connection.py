"""Test connections, curvature, the Yang-Mills functional and the gauge action."""
import numpy as np
from django.test import SimpleTestCase
from factory.random import reseed_random

from nctorus.connection import (
    Classification,
    Connection,
    classify_curvature,
    constant_connection,
    curvature,
    gauge_transform,
    gauge_word,
    potential,
    yang_mills,
)
from nctorus.core import ThetaMatrix, TorusElement
from nctorus.exceptions import (
    AxisOutOfRangeException,
    DimensionMismatchException,
    NonCommutingFamilyException,
    NotSkewAdjointException,
    NotUnitaryException,
)
from nctorus.factories import (
    ConnectionFactory,
    GaugeUnitaryFactory,
    MatrixElementFactory,
    ThetaMatrixFactory,
)
from nctorus.matrix import (
    MatrixElement,
    diag_monomial,
    hs_norm,
    is_skew_adjoint,
    mat_adjoint,
    mat_derive,
    mat_multiply,
)


def theta_2(value):
    return ThetaMatrix([[0.0, -value], [value, 0.0]])


def cosine_connection(theta):
    """h_0 = 0, h_1 = i(u_0 + u_0^{-1}) at n = 1."""
    h_1 = TorusElement(theta, {(1, 0): 1j, (-1, 0): 1j})
    return Connection(theta, [MatrixElement.zero(theta, 1), MatrixElement(theta, [[h_1]])])


class ConnectionTestCase(SimpleTestCase):
    """Test the Connection class"""

    def test_trivial_connection(self):
        """D has every h_k = 0."""
        connection = Connection.trivial(theta_2(0.2), 2)
        self.assertEqual(connection.n, 2)
        self.assertEqual(connection.dimension, 2)
        self.assertEqual(connection.support_degree, 0)

    def test_rejects_non_skew_coefficients(self):
        """h_k must be skew-adjoint."""
        theta = theta_2(0.2)
        with self.assertRaises(NotSkewAdjointException):
            Connection(theta, [MatrixElement.identity(theta, 1)] * 2)

    def test_rejects_wrong_arity(self):
        """There must be one h_k per axis."""
        theta = theta_2(0.2)
        with self.assertRaises(DimensionMismatchException):
            Connection(theta, [MatrixElement.zero(theta, 1)])

    def test_records(self):
        """A connection serializes as its h list and reads back."""
        reseed_random(1)
        connection = ConnectionFactory(n=2)
        copy = Connection.from_records(connection.theta, connection.to_records())
        self.assertTrue(copy.almost_equal(connection, 0.0))


class CurvatureTestCase(SimpleTestCase):
    """Test curvature and its classification"""

    def test_trivial_connection_is_flat(self):
        """D has zero curvature and YM(D) = 0."""
        connection = Connection.trivial(theta_2(0.2), 2)
        report = classify_curvature(connection)
        self.assertEqual(report.classification, Classification.ZERO)
        self.assertTrue(report.is_flat)
        self.assertEqual(yang_mills(connection), 0.0)

    def test_cosine_connection(self):
        """Θ_01 = −u_0 + u_0^{-1} and YM = 2."""
        theta = theta_2(0.2)
        connection = cosine_connection(theta)
        expected = MatrixElement(theta, [[TorusElement(theta, {(1, 0): -1.0, (-1, 0): 1.0})]])
        self.assertTrue(curvature(connection, 0, 1).almost_equal(expected))
        self.assertAlmostEqual(yang_mills(connection), 2.0, places=12)
        report = classify_curvature(connection)
        self.assertEqual(report.classification, Classification.NON_CONSTANT)
        self.assertIsNone(report.scalars)

    def test_antisymmetry(self):
        """Θ_ij = −Θ_ji and Θ_ii = 0."""
        reseed_random(2)
        connection = ConnectionFactory(dimension=3, n=2)
        for i in range(3):
            self.assertTrue(hs_norm(curvature(connection, i, i)) == 0.0)
            for j in range(3):
                opposite = -curvature(connection, j, i)
                self.assertTrue(curvature(connection, i, j).almost_equal(opposite, 1e-12))

    def test_axis_range(self):
        """Axes outside 0..N-1 are rejected."""
        with self.assertRaises(AxisOutOfRangeException):
            curvature(Connection.trivial(theta_2(0.2), 1), 0, 2)

    def test_constant_connection_is_flat(self):
        """Commuting constant skew families have zero curvature at N = 2 and N = 3."""
        theta = theta_2(0.3)
        family = [np.diag([0.25j, 0.75j]), np.diag([-1.5j, 0.1j])]
        connection = constant_connection(theta, family)
        self.assertEqual(classify_curvature(connection).classification, Classification.ZERO)
        reseed_random(3)
        theta_3 = ThetaMatrixFactory(dimension=3)
        connection = constant_connection(
            theta_3, [np.diag([1j, 2j]), np.diag([0.5j, -1j]), np.zeros((2, 2))]
        )
        for i in range(3):
            for j in range(3):
                self.assertEqual(hs_norm(curvature(connection, i, j)), 0.0)

    def test_constant_connection_checks_family(self):
        """Non-commuting or non-skew families are rejected."""
        theta = theta_2(0.3)
        with self.assertRaises(NonCommutingFamilyException):
            constant_connection(
                theta, [np.array([[0, 1], [-1, 0]], dtype=complex), np.diag([1j, -1j])]
            )
        with self.assertRaises(NotSkewAdjointException):
            constant_connection(theta, [np.eye(2), np.zeros((2, 2))])

    def test_yang_mills_is_nonnegative_and_flat_minimal(self):
        """YM ≥ 0, with equality at a flat connection, for random skew perturbations."""
        reseed_random(4)
        theta = ThetaMatrixFactory()
        flat = constant_connection(theta, [np.diag([1j, 0.5j]), np.diag([0.2j, -0.3j])])
        for _ in range(5):
            perturbation = ConnectionFactory(theta=theta, n=2)
            perturbed = flat.perturbed(perturbation.h)
            self.assertGreaterEqual(yang_mills(perturbed), yang_mills(flat))
        self.assertEqual(yang_mills(flat), 0.0)

    def test_potential(self):
        """The potential is Σ_k δ_k h_k + h_k²."""
        theta = theta_2(0.2)
        connection = cosine_connection(theta)
        h_1 = connection.h[1]
        expected = mat_derive(1, h_1) + mat_multiply(h_1, h_1)
        self.assertTrue(potential(connection).almost_equal(expected))


class GaugeTransformTestCase(SimpleTestCase):
    """Test the gauge action"""

    def setUp(self):
        super().setUp()
        reseed_random(12)

    def test_identity_acts_trivially(self):
        """γ_I(∇) = ∇."""
        connection = ConnectionFactory(n=2)
        identity = MatrixElement.identity(connection.theta, 2)
        self.assertTrue(gauge_transform(identity, connection).almost_equal(connection))

    def test_monomial_gauge_of_trivial_connection(self):
        """At n = 1, γ_{u_0}(D) has h_k = −iδ_{k0}."""
        theta = theta_2(0.4)
        transformed = gauge_transform(
            diag_monomial(theta, [(1, 0)]), Connection.trivial(theta, 1)
        )
        self.assertTrue(
            transformed.h[0].almost_equal(MatrixElement.from_scalar(theta, [[-1j]]))
        )
        self.assertTrue(transformed.h[1].almost_equal(MatrixElement.zero(theta, 1)))

    def test_rejects_non_unitary(self):
        """Only unitaries act."""
        connection = ConnectionFactory(n=1)
        with self.assertRaises(NotUnitaryException):
            gauge_transform(MatrixElement.identity(connection.theta, 1) * 2, connection)

    def test_result_is_skew_adjoint(self):
        """γ_u(∇) has skew-adjoint coefficients."""
        connection = ConnectionFactory(n=2)
        for kind in ("monomial", "permutation", "constant"):
            unitary = GaugeUnitaryFactory(theta=connection.theta, kind=kind)
            for element in gauge_transform(unitary, connection).h:
                self.assertTrue(is_skew_adjoint(element, 1e-9))

    def test_action_property(self):
        """γ_u ∘ γ_v = γ_{uv}."""
        connection = ConnectionFactory(n=2)
        u = GaugeUnitaryFactory(theta=connection.theta, kind="monomial")
        v = GaugeUnitaryFactory(theta=connection.theta, kind="constant")
        self.assertTrue(
            gauge_transform(u, gauge_transform(v, connection)).almost_equal(
                gauge_transform(mat_multiply(u, v), connection), 1e-9
            )
        )
        self.assertTrue(
            gauge_word([v, u], connection).almost_equal(
                gauge_transform(mat_multiply(u, v), connection), 1e-9
            )
        )

    def test_yang_mills_gauge_invariance(self):
        """YM(γ_u∇) = YM(∇) for products of monomial, permutation and constant unitaries."""
        for _ in range(20):
            connection = ConnectionFactory(n=2)
            word = [GaugeUnitaryFactory(theta=connection.theta) for _ in range(3)]
            self.assertLessEqual(
                abs(yang_mills(gauge_word(word, connection)) - yang_mills(connection)), 1e-9
            )

    def test_classification_is_gauge_invariant(self):
        """Curvature classification is preserved by the gauge action."""
        theta = ThetaMatrixFactory()
        flat = constant_connection(theta, [np.diag([1j, 0.5j]), np.diag([0.2j, -0.3j])])
        generic = ConnectionFactory(theta=theta, n=2)
        for connection in (flat, generic):
            unitary = GaugeUnitaryFactory(theta=theta, kind="monomial")
            self.assertEqual(
                classify_curvature(gauge_transform(unitary, connection)).classification,
                classify_curvature(connection).classification,
            )

    def test_skew_part_of_random_element(self):
        """Random matrix elements become valid coefficients after skew projection."""
        element = MatrixElementFactory(n=2)
        skew = (element - mat_adjoint(element)) * 0.5
        connection = Connection(element.theta, [skew, skew])
        self.assertLessEqual(connection.skew_deviation, 1e-12)
