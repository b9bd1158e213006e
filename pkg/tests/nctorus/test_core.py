"""Test the twisted Fourier series algebra."""
import itertools

import numpy as np
from django.test import SimpleTestCase
from factory.random import randgen, reseed_random

from nctorus.core import (
    ThetaMatrix,
    TorusElement,
    adjoint,
    convolve,
    derive,
    inner,
    multiply,
    phase,
    torus_act,
    trace,
)
from nctorus.exceptions import (
    AxisOutOfRangeException,
    DimensionMismatchException,
    InvalidThetaException,
    NotUnimodularException,
    ThetaMismatchException,
)
from nctorus.factories import ThetaMatrixFactory, TorusElementFactory

LAW_TOLERANCE = 1e-12


def theta_2(value):
    return ThetaMatrix([[0.0, -value], [value, 0.0]])


class ThetaMatrixTestCase(SimpleTestCase):
    """Test the ThetaMatrix class"""

    def test_valid_matrix(self):
        """An antisymmetric matrix with entries in ]-1, 1[ is accepted."""
        theta = theta_2(0.3)
        self.assertEqual(theta.dimension, 2)
        self.assertFalse(theta.is_commutative)
        self.assertEqual(theta.phase_form.tolist(), [[0.0, 0.0], [0.3, 0.0]])

    def test_invalid_matrices(self):
        """Non square, non antisymmetric and out of range matrices are rejected."""
        with self.assertRaises(InvalidThetaException):
            ThetaMatrix([[0.0, 0.1]])
        with self.assertRaises(InvalidThetaException):
            ThetaMatrix([[0.0, 0.1], [0.1, 0.0]])
        with self.assertRaises(InvalidThetaException):
            ThetaMatrix([[0.0, -1.0], [1.0, 0.0]])

    def test_entries_are_read_only(self):
        """The entries of a ThetaMatrix cannot be mutated."""
        theta = theta_2(0.3)
        with self.assertRaises(ValueError):
            theta.entries[0, 1] = 0.5

    def test_equality(self):
        """Equal entries give equal and equally hashed matrices."""
        self.assertEqual(theta_2(0.25), theta_2(0.25))
        self.assertEqual(hash(theta_2(0.25)), hash(theta_2(0.25)))
        self.assertNotEqual(theta_2(0.25), theta_2(0.5))


class PhaseTestCase(SimpleTestCase):
    """Test the phase of the product of two monomials"""

    def test_commutative_phase(self):
        """With θ = 0 every phase is one."""
        theta = ThetaMatrix.zeros(3)
        self.assertEqual(phase(theta, (1, 2, 3), (-4, 5, 6)), 1)

    def test_generator_phase(self):
        """φ(e_1, e_0) = exp(2πi θ_10) and φ(e_0, e_1) = 1."""
        theta = theta_2(0.3)
        self.assertAlmostEqual(phase(theta, (0, 1), (1, 0)), np.exp(2j * np.pi * 0.3))
        self.assertEqual(phase(theta, (1, 0), (0, 1)), 1)

    def test_phase_has_modulus_one(self):
        """Phases of large multi-indices stay on the unit circle."""
        theta = theta_2(0.123456789)
        value = phase(theta, (1000, -997), (-3001, 4002))
        self.assertAlmostEqual(abs(value), 1.0, places=14)

    def test_cocycle_identity(self):
        """φ(α, β) φ(α + β, γ) = φ(α, β + γ) φ(β, γ) for random θ and indices."""
        reseed_random(12)
        for index in range(20):
            theta = ThetaMatrixFactory(dimension=2 + index % 2)
            for _ in range(10):
                alpha, beta, gamma = (
                    np.array([randgen.randint(-9, 9) for _ in range(theta.dimension)])
                    for _ in range(3)
                )
                self.assertAlmostEqual(
                    phase(theta, alpha, beta) * phase(theta, alpha + beta, gamma),
                    phase(theta, alpha, beta + gamma) * phase(theta, beta, gamma),
                    places=10,
                )

    def test_wrong_length(self):
        """A multi-index of the wrong length is rejected."""
        with self.assertRaises(DimensionMismatchException):
            phase(theta_2(0.3), (1, 0, 0), (0, 1))


class TorusElementTestCase(SimpleTestCase):
    """Test the TorusElement class"""

    def test_zero_coefficients_are_dropped(self):
        """Coefficients below the drop tolerance vanish on construction."""
        theta = theta_2(0.1)
        element = TorusElement(theta, {(0, 0): 1.0, (1, 0): 1e-16})
        self.assertEqual(element.support, [(0, 0)])

    def test_repeated_records_are_summed(self):
        """Records with the same index add up."""
        theta = theta_2(0.1)
        element = TorusElement.from_records(theta, [[1, 0, 1.0, 0.0], [1, 0, 0.5, 2.0]])
        self.assertEqual(element.coefficient((1, 0)), 1.5 + 2j)

    def test_records(self):
        """Records are the serialization [α…, re, im] in sorted support order."""
        theta = theta_2(0.1)
        element = TorusElement(theta, {(1, 0): 2j, (-1, 3): 0.5})
        self.assertEqual(element.to_records(), [[-1, 3, 0.5, 0.0], [1, 0, 0.0, 2.0]])

    def test_bad_record_length(self):
        """A record with the wrong number of fields is rejected."""
        with self.assertRaises(DimensionMismatchException):
            TorusElement.from_records(theta_2(0.1), [[1, 0, 1.0]])

    def test_support_degree_and_norm(self):
        """support_degree is the largest sup norm of an index, l1_norm sums moduli."""
        theta = theta_2(0.1)
        element = TorusElement(theta, {(1, -3): 3.0, (2, 0): 4j})
        self.assertEqual(element.support_degree, 3)
        self.assertEqual(element.l1_norm, 7.0)

    def test_arithmetic(self):
        """Sum, difference and scaling act on coefficients."""
        theta = theta_2(0.1)
        a = TorusElement.monomial(theta, (1, 0), 2.0)
        b = TorusElement.constant(theta, 1.0)
        self.assertEqual((a + b).coefficients, {(0, 0): 1.0, (1, 0): 2.0})
        self.assertTrue((a - a).is_zero)
        self.assertEqual((3 * a).coefficient((1, 0)), 6.0)
        self.assertEqual((a + 1).coefficient((0, 0)), 1.0)
        scaled = np.complex128(1j) * a
        self.assertIsInstance(scaled, TorusElement)
        self.assertEqual(scaled.coefficient((1, 0)), 2j)

    def test_theta_mismatch(self):
        """Elements over different tori cannot be combined."""
        with self.assertRaises(ThetaMismatchException):
            multiply(
                TorusElement.constant(theta_2(0.1)), TorusElement.constant(theta_2(0.2))
            )


class MultiplyTestCase(SimpleTestCase):
    """Test the twisted product"""

    def test_generator_product(self):
        """u_1 u_0 has coefficient exp(2πi·0.3) at (1, 1)."""
        theta = theta_2(0.3)
        product = multiply(TorusElement.generator(theta, 1), TorusElement.generator(theta, 0))
        self.assertEqual(product.support, [(1, 1)])
        self.assertAlmostEqual(product.coefficient((1, 1)), np.exp(2j * np.pi * 0.3))

    def test_generator_times_inverse(self):
        """u_0 u_0^{-1} = 1."""
        theta = theta_2(0.3)
        product = multiply(
            TorusElement.generator(theta, 0), TorusElement.generator(theta, 0, -1)
        )
        self.assertEqual(product.coefficients, {(0, 0): 1.0})

    def test_zero_absorbs(self):
        """The zero element absorbs products."""
        theta = theta_2(0.3)
        self.assertTrue(multiply(TorusElement.zero(theta), TorusElement.constant(theta)).is_zero)

    def test_commutation_relation(self):
        """u_k u_l = exp(2πi θ_kl) u_l u_k for random θ."""
        reseed_random(2)
        for _ in range(20):
            theta = ThetaMatrixFactory(dimension=4)
            for k, l in itertools.product(range(4), repeat=2):
                u_k = TorusElement.generator(theta, k)
                u_l = TorusElement.generator(theta, l)
                factor = complex(np.exp(2j * np.pi * theta.entries[k, l]))
                difference = multiply(u_k, u_l) - factor * multiply(u_l, u_k)
                self.assertLessEqual(max(np.abs(difference.values), default=0.0), 1e-14)

    def test_commutative_product_is_convolution(self):
        """With θ = 0 the product is exactly the convolution of coefficients."""
        reseed_random(3)
        theta = ThetaMatrixFactory(dimension=3, commutative=True)
        for _ in range(20):
            a = TorusElementFactory(theta=theta)
            b = TorusElementFactory(theta=theta)
            product = multiply(a, b)
            expected = {}
            for alpha, x in a.coefficients.items():
                for beta, y in b.coefficients.items():
                    key = tuple(i + j for i, j in zip(alpha, beta))
                    expected[key] = expected.get(key, 0j) + x * y
            self.assertTrue(product.almost_equal(TorusElement(theta, expected), LAW_TOLERANCE))
            self.assertTrue(convolve(a, b).almost_equal(product, 0.0))


class AlgebraLawsTestCase(SimpleTestCase):
    """Test the algebra laws on random elements"""

    def setUp(self):
        super().setUp()
        reseed_random(11)

    def _random_triples(self, count=500):
        for index in range(count):
            theta = ThetaMatrixFactory(dimension=2 + index % 3)
            yield tuple(TorusElementFactory(theta=theta, terms=4) for _ in range(3))

    def test_associativity_and_distributivity(self):
        """(ab)c = a(bc) and a(b + c) = ab + ac."""
        for a, b, c in self._random_triples():
            left = multiply(multiply(a, b), c)
            self.assertTrue(left.almost_equal(multiply(a, multiply(b, c)), LAW_TOLERANCE))
            self.assertTrue(
                multiply(a, b + c).almost_equal(multiply(a, b) + multiply(a, c), LAW_TOLERANCE)
            )

    def test_involution(self):
        """a** = a, (ab)* = b*a* and (a + b)* = a* + b*."""
        for a, b, _ in self._random_triples():
            self.assertTrue(adjoint(adjoint(a)).almost_equal(a, LAW_TOLERANCE))
            self.assertTrue(
                adjoint(multiply(a, b)).almost_equal(
                    multiply(adjoint(b), adjoint(a)), LAW_TOLERANCE
                )
            )
            self.assertTrue(adjoint(a + b).almost_equal(adjoint(a) + adjoint(b), LAW_TOLERANCE))

    def test_monomial_adjoint_is_inverse(self):
        """(u^α)* u^α = 1."""
        theta = ThetaMatrixFactory(dimension=3)
        monomial = TorusElement.monomial(theta, (2, -1, 3))
        self.assertTrue(
            multiply(adjoint(monomial), monomial).almost_equal(
                TorusElement.constant(theta), LAW_TOLERANCE
            )
        )

    def test_leibniz_rule(self):
        """δ_k(ab) = δ_k(a) b + a δ_k(b)."""
        for a, b, _ in self._random_triples():
            for axis in range(a.dimension):
                self.assertTrue(
                    derive(axis, multiply(a, b)).almost_equal(
                        multiply(derive(axis, a), b) + multiply(a, derive(axis, b)),
                        LAW_TOLERANCE,
                    )
                )

    def test_trace_property(self):
        """τ(ab) = τ(ba) and τ(a*a) ≥ 0."""
        for a, b, _ in self._random_triples():
            self.assertAlmostEqual(trace(multiply(a, b)), trace(multiply(b, a)), places=12)
            self.assertGreaterEqual(inner(a, a).real, 0.0)
            self.assertAlmostEqual(inner(a, a).imag, 0.0, places=12)

    def test_derivation_commutes_with_adjoint(self):
        """δ_k(a*) = δ_k(a)* since δ_k is a *-derivation."""
        for a, _, _ in self._random_triples(10):
            self.assertTrue(
                derive(0, adjoint(a)).almost_equal(adjoint(derive(0, a)), LAW_TOLERANCE)
            )


class DeriveAndActTestCase(SimpleTestCase):
    """Test derivations, the trace and the dual torus action"""

    def test_derive_generator(self):
        """δ_0 u_0 = i u_0 and δ_1 u_0 = 0."""
        theta = theta_2(0.2)
        generator = TorusElement.generator(theta, 0)
        self.assertEqual(derive(0, generator).coefficients, {(1, 0): 1j})
        self.assertTrue(derive(1, generator).is_zero)

    def test_derive_axis_range(self):
        """Axes outside 0..N-1 are rejected."""
        with self.assertRaises(AxisOutOfRangeException):
            derive(2, TorusElement.constant(theta_2(0.2)))

    def test_trace_of_one(self):
        """τ(1) = 1."""
        self.assertEqual(trace(TorusElement.constant(theta_2(0.2))), 1)

    def test_torus_action(self):
        """σ_z multiplies u^α by z^α and is multiplicative."""
        reseed_random(5)
        theta = ThetaMatrixFactory(dimension=2)
        z = [np.exp(0.4j), np.exp(-1.1j)]
        monomial = TorusElement.monomial(theta, (2, 1))
        self.assertAlmostEqual(
            torus_act(z, monomial).coefficient((2, 1)), z[0] ** 2 * z[1], places=12
        )
        a, b = TorusElementFactory(theta=theta), TorusElementFactory(theta=theta)
        self.assertTrue(
            torus_act(z, multiply(a, b)).almost_equal(
                multiply(torus_act(z, a), torus_act(z, b)), LAW_TOLERANCE
            )
        )

    def test_torus_action_requires_unimodular(self):
        """A parameter off the unit circle is rejected."""
        with self.assertRaises(NotUnimodularException):
            torus_act([1.0, 2.0], TorusElement.constant(theta_2(0.2)))
