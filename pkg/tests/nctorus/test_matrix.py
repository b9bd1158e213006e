"""Test the matrix algebra over the noncommutative torus."""
import numpy as np
from django.test import SimpleTestCase
from factory.random import reseed_random

from nctorus.core import ThetaMatrix, TorusElement, multiply
from nctorus.exceptions import (
    DimensionMismatchException,
    NonCommutingFamilyException,
    NotAPermutationException,
    NotSkewAdjointException,
    NotUnitaryException,
)
from nctorus.factories import (
    MatrixElementFactory,
    ThetaMatrixFactory,
    random_unitary_scalar,
)
from nctorus.matrix import (
    MatrixElement,
    check_scalar_family,
    diag_monomial,
    hs_inner,
    hs_norm,
    is_skew_adjoint,
    is_unitary,
    mat_adjoint,
    mat_derive,
    mat_multiply,
    mat_trace,
    permutation_matrix,
    scalar_unitary,
)

LAW_TOLERANCE = 1e-12


def theta_2(value):
    return ThetaMatrix([[0.0, -value], [value, 0.0]])


class MatrixElementTestCase(SimpleTestCase):
    """Test the MatrixElement class"""

    def test_square_shape(self):
        """Ragged entries are rejected."""
        theta = theta_2(0.1)
        one = TorusElement.constant(theta)
        with self.assertRaises(DimensionMismatchException):
            MatrixElement(theta, [[one, one], [one]])

    def test_constant_part(self):
        """The constant part collects the α = 0 coefficients."""
        theta = theta_2(0.1)
        scalar = np.array([[1.0, 2j], [3.0, 4.0]])
        element = MatrixElement.from_scalar(theta, scalar) + diag_monomial(
            theta, [(1, 0), (0, 1)]
        )
        np.testing.assert_array_equal(element.constant_part(), scalar)
        self.assertFalse(element.is_constant())
        self.assertTrue(MatrixElement.from_scalar(theta, scalar).is_constant())

    def test_records(self):
        """Records nest one term list per entry."""
        theta = theta_2(0.1)
        element = MatrixElement.identity(theta, 2)
        self.assertEqual(
            element.to_records(),
            [[[[0, 0, 1.0, 0.0]], []], [[], [[0, 0, 1.0, 0.0]]]],
        )
        self.assertEqual(MatrixElement.from_records(theta, element.to_records()), element)


class MatrixOperationsTestCase(SimpleTestCase):
    """Test products, adjoints, traces and derivations of matrix elements"""

    def setUp(self):
        super().setUp()
        reseed_random(7)

    def test_identity_is_neutral(self):
        """I·A = A·I = A."""
        element = MatrixElementFactory(n=3)
        identity = MatrixElement.identity(element.theta, 3)
        self.assertTrue(mat_multiply(identity, element).almost_equal(element))
        self.assertTrue(mat_multiply(element, identity).almost_equal(element))

    def test_one_by_one_matches_core(self):
        """At n = 1 the matrix product is the product of A_θ."""
        theta = ThetaMatrixFactory()
        a = MatrixElementFactory(theta=theta, n=1)
        b = MatrixElementFactory(theta=theta, n=1)
        self.assertTrue(
            mat_multiply(a, b)[0, 0].almost_equal(multiply(a[0, 0], b[0, 0]), LAW_TOLERANCE)
        )

    def test_associativity_and_involution(self):
        """(AB)C = A(BC) and (AB)* = B*A*."""
        theta = ThetaMatrixFactory()
        for _ in range(5):
            a, b, c = (MatrixElementFactory(theta=theta) for _ in range(3))
            self.assertTrue(
                mat_multiply(mat_multiply(a, b), c).almost_equal(
                    mat_multiply(a, mat_multiply(b, c)), LAW_TOLERANCE
                )
            )
            self.assertTrue(
                mat_adjoint(mat_multiply(a, b)).almost_equal(
                    mat_multiply(mat_adjoint(b), mat_adjoint(a)), LAW_TOLERANCE
                )
            )

    def test_trace(self):
        """The normalized trace of I is one and τ⊗tr(AB) = τ⊗tr(BA)."""
        theta = ThetaMatrixFactory()
        self.assertEqual(mat_trace(MatrixElement.identity(theta, 3)), 1)
        a, b = MatrixElementFactory(theta=theta), MatrixElementFactory(theta=theta)
        self.assertAlmostEqual(mat_trace(mat_multiply(a, b)), mat_trace(mat_multiply(b, a)))

    def test_leibniz_rule(self):
        """δ_k(AB) = δ_k(A)B + Aδ_k(B) entrywise."""
        theta = ThetaMatrixFactory()
        a, b = MatrixElementFactory(theta=theta), MatrixElementFactory(theta=theta)
        for axis in range(2):
            self.assertTrue(
                mat_derive(axis, mat_multiply(a, b)).almost_equal(
                    mat_multiply(mat_derive(axis, a), b) + mat_multiply(a, mat_derive(axis, b)),
                    LAW_TOLERANCE,
                )
            )

    def test_hilbert_schmidt_norm(self):
        """hs_norm(A)² = τ⊗tr(A*A) = hs_inner(A, A)."""
        element = MatrixElementFactory(n=2)
        self.assertAlmostEqual(hs_norm(element) ** 2, hs_inner(element, element).real)
        self.assertAlmostEqual(hs_inner(element, element).imag, 0.0)

    def test_size_mismatch(self):
        """Products need matching sizes."""
        theta = ThetaMatrixFactory()
        with self.assertRaises(DimensionMismatchException):
            mat_multiply(MatrixElement.identity(theta, 2), MatrixElement.identity(theta, 3))


class UnitaryBuildersTestCase(SimpleTestCase):
    """Test the unitary and skew-adjoint predicates and builders"""

    def test_diag_monomial_is_unitary(self):
        """diag(u^{α_1}, …, u^{α_n}) is unitary."""
        theta = theta_2(0.37)
        self.assertTrue(is_unitary(diag_monomial(theta, [(1, -2), (0, 3), (4, 1)])))

    def test_permutation_matrix(self):
        """The permutation matrix of ρ sends e_i to e_ρ(i) and is unitary."""
        theta = theta_2(0.37)
        element = permutation_matrix(theta, [2, 0, 1])
        self.assertTrue(is_unitary(element))
        np.testing.assert_array_equal(
            element.constant_part(), [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
        )

    def test_not_a_permutation(self):
        """Sequences that are not bijections are rejected."""
        with self.assertRaises(NotAPermutationException):
            permutation_matrix(theta_2(0.1), [0, 0, 1])

    def test_scalar_unitary(self):
        """Haar unitaries are accepted, a doubled one is not."""
        reseed_random(4)
        theta = theta_2(0.1)
        unitary = random_unitary_scalar(3)
        self.assertTrue(is_unitary(scalar_unitary(theta, unitary)))
        with self.assertRaises(NotUnitaryException):
            scalar_unitary(theta, 2 * unitary)

    def test_non_unitary(self):
        """2·I is not unitary."""
        theta = theta_2(0.1)
        self.assertFalse(is_unitary(MatrixElement.identity(theta, 2) * 2))

    def test_skew_adjoint(self):
        """A − A* is skew-adjoint and iI is too, I is not."""
        reseed_random(8)
        element = MatrixElementFactory()
        self.assertTrue(is_skew_adjoint(element - mat_adjoint(element)))
        identity = MatrixElement.identity(element.theta, 2)
        self.assertTrue(is_skew_adjoint(identity * 1j))
        self.assertFalse(is_skew_adjoint(identity))

    def test_scalar_family(self):
        """Commuting skew-adjoint families pass, others are rejected."""
        diagonal = [np.diag([1j, -2j]), np.diag([0.5j, 0.0])]
        self.assertEqual(len(check_scalar_family(diagonal)), 2)
        with self.assertRaises(NotSkewAdjointException):
            check_scalar_family([np.eye(2)])
        with self.assertRaises(NonCommutingFamilyException):
            check_scalar_family(
                [np.array([[0, 1], [-1, 0]], dtype=complex), np.diag([1j, -1j])]
            )
