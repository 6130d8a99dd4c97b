# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import unittest
from unittest.mock import patch

from parameterized import parameterized

from grassmeet.ffield import (
    MatrixFF, PrimeField, RandomState, gram_schmidt_orthogonal
)
from grassmeet.motivic import (
    LPolynomial, MotivicClass, class_grassmannian_25, class_pn,
    class_section, count_and_compare, count_section, identity_derivation,
    incidence_identity, section_class_by_strata
)
from grassmeet.utils import InternalCheckError, InvalidInput

L = LPolynomial.gen()
X = MotivicClass.basis('X')
Y = MotivicClass.basis('Y')


class TestLPolynomial(unittest.TestCase):

    def test_coefficients(self):
        p = LPolynomial.from_coefficients([1, 0, 2, 0])
        self.assertEqual(p.coefficients, (1, 0, 2))
        self.assertEqual(p.degree, 2)
        self.assertEqual(LPolynomial(0).coefficients, ())
        self.assertEqual(LPolynomial(0).degree, -1)

    def test_arithmetic(self):
        self.assertEqual((1 + L) * (1 - L), 1 - L ** 2)
        self.assertEqual(3 - L, LPolynomial.from_coefficients([3, -1]))
        self.assertEqual(-(L + 2), LPolynomial.from_coefficients([-2, -1]))
        self.assertEqual(2 * L, L + L)

    def test_str(self):
        self.assertEqual(str(LPolynomial.from_coefficients([1, 1, 2])),
                         '1 + L + 2*L^2')
        self.assertEqual(str(LPolynomial.from_coefficients([0, -1, 0, 1])),
                         '-L + L^3')
        self.assertEqual(str(LPolynomial(0)), '0')

    def test_evaluate(self):
        self.assertEqual((L ** 4).evaluate(3), 81)
        self.assertEqual(class_pn(9).evaluate(2), 1023)

    def test_negative_power(self):
        with self.assertRaises(InvalidInput):
            L ** -1

    def test_hashable(self):
        self.assertEqual(len({L + 1, 1 + L, L}), 2)


class TestMotivicClass(unittest.TestCase):

    def test_linear_combinations(self):
        c = X * L ** 4 + 3
        self.assertEqual(c.coefficient('X'), L ** 4)
        self.assertEqual(c.coefficient('1'), LPolynomial(3))
        self.assertEqual(c.coefficient('Y'), LPolynomial(0))
        self.assertFalse(c.is_constant)
        self.assertEqual(str(X * L ** 4), '[X]·(L^4)')

    def test_product_of_unknowns(self):
        with self.assertRaises(TypeError):
            X * Y
        with self.assertRaises(TypeError):
            (X + 1) * (Y + L)

    def test_unknown_basis(self):
        with self.assertRaises(InvalidInput):
            MotivicClass({'Z': 1})
        with self.assertRaises(InvalidInput):
            X.coefficient('Z')

    def test_substitute(self):
        c = (X - Y) * L ** 4
        self.assertTrue(c.substitute(Y=X).is_zero())
        self.assertEqual(c.substitute(X=MotivicClass.constant(1)),
                         MotivicClass.constant(L ** 4) - Y * L ** 4)

    def test_evaluate(self):
        c = X * (L + 1) + Y - 2
        self.assertEqual(c.evaluate(2, n_x=5, n_y=7), 5 * 3 + 7 - 2)
        with self.assertRaises(InvalidInput):
            c.evaluate(2, n_x=5)


class TestClasses(unittest.TestCase):

    def test_grassmannian(self):
        self.assertEqual(class_grassmannian_25().coefficients,
                         (1, 1, 2, 2, 2, 1, 1))
        self.assertEqual(class_grassmannian_25().evaluate(2), 155)
        self.assertEqual(class_grassmannian_25().evaluate(3), 1210)

    def test_section_difference(self):
        self.assertEqual(class_section(2) - class_section(4), L ** 4)

    @parameterized.expand([(2,), (4,)])
    def test_strata(self, rank):
        self.assertEqual(section_class_by_strata(rank), class_section(rank))

    @parameterized.expand([
        (2, 2, 91),
        (2, 4, 75),
        (3, 2, 481),
        (3, 4, 400),
    ])
    def test_section_counts(self, q, rank, exp):
        self.assertEqual(class_section(rank).evaluate(q), exp)
        self.assertEqual(count_section(q, rank), exp)

    @parameterized.expand([(0,), (3,), (6,)])
    def test_invalid_rank(self, rank):
        with self.assertRaises(InvalidInput):
            class_section(rank)
        with self.assertRaises(InvalidInput):
            section_class_by_strata(rank)


class TestIncidenceIdentity(unittest.TestCase):

    def test_difference(self):
        ident = incidence_identity()
        self.assertEqual(ident.factor, L ** 4)
        self.assertEqual(ident.difference, (X - Y) * L ** 4)
        self.assertTrue(ident.difference.substitute(Y=X).is_zero())

    def test_expansions(self):
        ident = incidence_identity()
        gr = class_grassmannian_25()
        self.assertEqual(ident.via_p1, X * L ** 4 + gr * class_section(4))
        self.assertEqual(ident.via_p2, Y * L ** 4 + gr * class_section(4))

    def test_inconsistent_sections_caught(self):
        with patch('grassmeet.motivic.class_section',
                   side_effect=lambda rank: class_pn(rank)):
            with self.assertRaises(InternalCheckError):
                incidence_identity()

    def test_derivation(self):
        lines = identity_derivation()
        self.assertEqual(lines[0], '[Gr(2,5)] = 1 + L + 2*L^2 + 2*L^3 + '
                                   '2*L^4 + L^5 + L^6')
        self.assertEqual(lines[3], 'S2 - S4 = L^4')
        self.assertTrue(lines[-1].startswith('hence ([X] - [Y])'))


class TestPointCounts(unittest.TestCase):

    def test_identity_over_f2(self):
        g = MatrixFF.identity(PrimeField(2), 10)
        report = count_and_compare(2, g)
        self.assertEqual(report.n_gr, 155)
        self.assertEqual(report.n_x, 155)
        self.assertEqual(report.n_y, 155)
        self.assertEqual(report.n_q, 155 * 91)
        self.assertTrue(report.verdict)
        obs = report.to_dict()
        self.assertEqual(obs['verdict'], 'PASS')
        self.assertEqual(obs['n_Q'], 155 * 91)

    def test_incidence_skipped_by_default_above_two(self):
        g = MatrixFF.identity(PrimeField(3), 10)
        report = count_and_compare(3, g)
        self.assertIsNone(report.n_q)
        self.assertEqual(report.n_gr, 1210)
        self.assertEqual(set(report.checks),
                         {'n_Gr = [Gr(2,5)](q)', 'n_X = n_Y'})
        self.assertTrue(report.verdict)

    def test_random_pairs_over_f2(self):
        field = PrimeField(2)
        for seed in range(3):
            g = RandomState(seed).random_invertible(field, 10)
            report = count_and_compare(2, g, incidence=True)
            self.assertTrue(report.verdict, report.checks)

    def test_failed_check_logged(self):
        g = MatrixFF.identity(PrimeField(2), 10)
        with patch('grassmeet.motivic.enumerate_rank2_points',
                   side_effect=[155, 154]):
            with self.assertLogs('grassmeet.motivic', level='WARNING'):
                report = count_and_compare(2, g, incidence=False)
        self.assertFalse(report.verdict)
        self.assertEqual(report.to_dict()['verdict'], 'FAIL')

    def test_random_pairs_over_f3(self):
        field = PrimeField(3)
        for seed in range(10):
            g = RandomState(seed).random_invertible(field, 10)
            report = count_and_compare(3, g, incidence=False)
            self.assertEqual(report.n_x, report.n_y)

    def test_orthogonal_over_f3(self):
        g = gram_schmidt_orthogonal(PrimeField(3), 10, RandomState(7))
        report = count_and_compare(3, g, incidence=False)
        self.assertTrue(report.verdict)


if __name__ == "__main__":
    unittest.main()
