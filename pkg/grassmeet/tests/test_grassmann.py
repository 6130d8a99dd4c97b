# ----------------------------------------------------------------------------
# Copyright (c) 2022, Bokulich Laboratories.
#
# Distributed under the terms of the Modified BSD License.
#
# The full license is in the file LICENSE, distributed with this software.
# ----------------------------------------------------------------------------

import unittest
from unittest.mock import patch

import numpy as np
from numpy.testing import assert_array_equal
from parameterized import parameterized

from grassmeet.ffield import MatrixFF, PrimeField, RandomState
from grassmeet.grassmann import (
    PLUECKER_NAMES, PLUECKER_PAIRS, GPK3Instance, PatchVerdict, SkewForm,
    SmoothnessCertificate, certificate_frame, certify_patch,
    certify_smooth_gpk3, chart_point, count_hyperplane_section, double_mirror,
    enumerate_rank2_points, gpk3_patch_ideal, grassmannian_points_rref,
    incidence_pairs, is_tangent_hyperplane, patch_parametrization,
    pfaffian_ideal, plane_of_pluecker, pluecker_ring, rank2_points,
    search_orthogonal_smooth, singular_scheme_ideal, skew_rank,
    tangent_by_pairing, wedge
)
from grassmeet.groebner import ResourceBudget, is_unit_ideal
from grassmeet.multipoly import PolyRing, substitute
from grassmeet.tests._utils import load_fixture, slow
from grassmeet.utils import (
    BudgetExceeded, EnumerationBudgetExceeded, InvalidInput, SearchExhausted,
    SingularMatrixError
)

F103 = PrimeField(103)


def _unit_vector(k, dim=10):
    v = np.zeros(dim, dtype=np.int64)
    v[k] = 1
    return v


class TestPfaffianIdeal(unittest.TestCase):

    def setUp(self):
        self.ring = pluecker_ring(F103)

    def test_variable_order(self):
        self.assertEqual(PLUECKER_NAMES, (
            'x01', 'x02', 'x03', 'x04', 'x12', 'x13', 'x14', 'x23', 'x24',
            'x34'))

    def test_five_quadrics(self):
        ideal = pfaffian_ideal(self.ring)
        self.assertEqual(len(ideal), 5)
        self.assertTrue(all(f.degree() == 2 for f in ideal))

    def test_omit_zero(self):
        r = self.ring
        exp = r('x12') * r('x34') - r('x13') * r('x24') + \
            r('x14') * r('x23')
        self.assertEqual(pfaffian_ideal(r)[0], exp)

    def test_vanishes_on_decomposable_forms(self):
        rng = RandomState(1)
        ideal = pfaffian_ideal(self.ring)
        for _ in range(100):
            x = wedge(F103, rng.random_vector(F103, 5),
                      rng.random_vector(F103, 5))
            self.assertTrue(all(f.evaluate(x) == 0 for f in ideal))

    def test_vanishes_symbolically(self):
        names = [f'u{i}' for i in range(5)] + [f'v{i}' for i in range(5)]
        uv = PolyRing(F103, names)
        images = [uv(f'u{i}') * uv(f'v{j}') - uv(f'u{j}') * uv(f'v{i}')
                  for i, j in PLUECKER_PAIRS]
        for f in pfaffian_ideal(self.ring):
            self.assertTrue(substitute(f, images).is_zero())

    def test_wrong_ring(self):
        with self.assertRaises(InvalidInput):
            pfaffian_ideal(PolyRing(F103, ['a', 'b']))


class TestPatches(unittest.TestCase):

    def setUp(self):
        self.ring = pluecker_ring(F103)

    def test_pivot_01(self):
        chart = patch_parametrization(self.ring, (0, 1))
        t = chart.target
        self.assertEqual(t.names, ('x02', 'x03', 'x04', 'x12', 'x13', 'x14'))
        self.assertEqual(chart.dependent[(2, 3)],
                         t('x02') * t('x13') - t('x03') * t('x12'))
        self.assertEqual(chart.dependent[(2, 4)],
                         t('x02') * t('x14') - t('x04') * t('x12'))
        self.assertEqual(chart.dependent[(3, 4)],
                         t('x03') * t('x14') - t('x04') * t('x13'))

    def test_pivot_34(self):
        chart = patch_parametrization(self.ring, (3, 4))
        t = chart.target
        self.assertEqual(chart.dependent[(0, 1)],
                         t('x03') * t('x14') - t('x04') * t('x13'))

    @parameterized.expand([(pair,) for pair in PLUECKER_PAIRS])
    def test_chart_invariant(self, pivot):
        chart = patch_parametrization(self.ring, pivot)
        self.assertEqual(len(chart.free), 6)
        self.assertEqual(len(chart.dependent), 3)
        for f in chart.pullback(pfaffian_ideal(self.ring)):
            self.assertTrue(f.is_zero())

    def test_invalid_pivot(self):
        with self.assertRaises(InvalidInput):
            patch_parametrization(self.ring, (2, 1))

    def test_charts_cover_grassmannian(self):
        f3 = PrimeField(3)
        ring = pluecker_ring(f3)
        for x in rank2_points(3):
            pivot = PLUECKER_PAIRS[int(np.nonzero(x)[0][0])]
            scaled, free = chart_point(f3, x, pivot)
            chart = patch_parametrization(ring, pivot)
            assert_array_equal(chart.point(free), scaled)


class TestInstances(unittest.TestCase):

    def test_identity_gives_zero_ideal(self):
        inst = GPK3Instance.with_identity(MatrixFF.identity(F103, 10))
        chart = patch_parametrization(pluecker_ring(F103), (0, 1))
        self.assertTrue(all(f.is_zero()
                            for f in gpk3_patch_ideal(inst, chart)))

    def test_singular_matrix(self):
        with self.assertRaises(SingularMatrixError):
            GPK3Instance.with_identity(MatrixFF(F103, np.zeros((10, 10))))

    def test_wrong_shape(self):
        with self.assertRaises(InvalidInput):
            GPK3Instance.with_identity(MatrixFF.identity(F103, 5))

    def test_normalized(self):
        rng = RandomState(2)
        g1 = rng.random_invertible(F103, 10)
        g2 = rng.random_invertible(F103, 10)
        inst = GPK3Instance(F103, g1, g2).normalized()
        self.assertTrue(inst.g1.is_identity())
        self.assertEqual(g1 @ inst.g2, g2)

    def test_double_mirror_fixes_orthogonal(self):
        inst = GPK3Instance.with_identity(load_fixture())
        self.assertEqual(double_mirror(inst), inst)

    def test_double_mirror_involution(self):
        rng = RandomState(20)
        for _ in range(20):
            inst = GPK3Instance(F103, rng.random_invertible(F103, 10),
                                rng.random_invertible(F103, 10))
            self.assertEqual(double_mirror(double_mirror(inst)), inst)

    def test_singular_scheme_empty(self):
        self.assertEqual(singular_scheme_ideal([]), [])

    def test_singular_scheme_linear(self):
        ring = PolyRing(F103, [f'v{i}' for i in range(6)])
        cy = [ring.variable(i) for i in range(5)]
        sing = singular_scheme_ideal(cy)
        self.assertEqual(len(sing), 5 + 200)
        self.assertTrue(any(f == 1 for f in sing))
        self.assertTrue(is_unit_ideal(sing))

    @slow
    def test_singular_scheme_fixture_size(self):
        inst = GPK3Instance.with_identity(load_fixture())
        chart = patch_parametrization(pluecker_ring(F103), (0, 1))
        cy = gpk3_patch_ideal(inst, chart)
        self.assertEqual(len(cy), 5)
        self.assertTrue(all(f.degree() <= 4 for f in cy))
        self.assertEqual(len(singular_scheme_ideal(cy)), 205)


class TestCertification(unittest.TestCase):

    def test_identity_not_smooth(self):
        inst = GPK3Instance.with_identity(MatrixFF.identity(F103, 10))
        cert = certify_smooth_gpk3(inst, progress=False)
        self.assertFalse(cert.smooth)
        self.assertFalse(cert.inconclusive)
        self.assertEqual(len(cert.patches), 10)
        self.assertEqual(cert.first_failure().name, 'x01')

    def test_patch_identity_not_unit(self):
        inst = GPK3Instance.with_identity(MatrixFF.identity(F103, 10))
        verdict = certify_patch(inst, (0, 1))
        self.assertFalse(verdict.unit_ideal)
        self.assertFalse(verdict.inconclusive)
        self.assertEqual(verdict.order, 'degrevlex')
        self.assertEqual(verdict.name, 'x01')

    def test_patch_real_budget_inconclusive(self):
        inst = GPK3Instance.with_identity(load_fixture())
        with self.assertLogs('grassmeet.grassmann', level='WARNING'):
            with self.assertWarns(RuntimeWarning):
                verdict = certify_patch(inst, (0, 1),
                                        budget=ResourceBudget(max_degree=1))
        self.assertTrue(verdict.inconclusive)
        self.assertIsNone(verdict.unit_ideal)
        self.assertGreater(verdict.stats.max_degree, 1)

    @patch('grassmeet.grassmann.groebner_basis',
           side_effect=BudgetExceeded('too many pairs'))
    def test_patch_budget_falls_back_to_lex(self, p_gb):
        inst = GPK3Instance.with_identity(MatrixFF.identity(F103, 10))
        with self.assertLogs('grassmeet.grassmann', level='WARNING') as cm:
            with self.assertWarns(RuntimeWarning):
                verdict = certify_patch(inst, (2, 4))
        self.assertEqual(p_gb.call_count, 2)
        self.assertTrue(verdict.inconclusive)
        self.assertIsNone(verdict.unit_ideal)
        self.assertEqual(verdict.order, 'lex')
        self.assertEqual(len(cm.output), 2)

    @patch('grassmeet.grassmann.groebner_basis',
           side_effect=BudgetExceeded('too many pairs'))
    def test_patch_budget_without_fallback(self, p_gb):
        inst = GPK3Instance.with_identity(MatrixFF.identity(F103, 10))
        with self.assertLogs('grassmeet.grassmann', level='WARNING'):
            verdict = certify_patch(inst, (0, 1), fallback=False)
        p_gb.assert_called_once()
        self.assertTrue(verdict.inconclusive)

    def test_certificate_dict(self):
        verdicts = [PatchVerdict(pair, True, 'degrevlex')
                    for pair in PLUECKER_PAIRS]
        cert = SmoothnessCertificate(103, 'abc', verdicts)
        self.assertTrue(cert.smooth)
        obs = cert.to_dict(timings=False)
        self.assertSetEqual(
            set(obs), {'prime', 'matrix_sha', 'patches', 'smooth',
                       'inconclusive'})
        self.assertNotIn('millis', obs['patches'][0])
        self.assertIn('millis', cert.to_dict()['patches'][0])
        df = certificate_frame(cert)
        self.assertListEqual(list(df.index), list(PLUECKER_NAMES))

    def test_missing_patches_not_smooth(self):
        cert = SmoothnessCertificate(
            103, 'abc', [PatchVerdict((0, 1), True, 'degrevlex')])
        self.assertFalse(cert.smooth)

    @patch('grassmeet.grassmann.certify_smooth_gpk3')
    def test_search_exhausted(self, p_certify):
        p_certify.return_value = SmoothnessCertificate(
            7, 'abc', [PatchVerdict((0, 1), False, 'degrevlex')])
        with self.assertRaises(SearchExhausted) as cm:
            search_orthogonal_smooth(7, seed=5, max_attempts=3,
                                     progress=False)
        attempts = cm.exception.attempts
        self.assertEqual(len(attempts), 3)
        self.assertListEqual(list(attempts['failed_chart']), ['x01'] * 3)
        self.assertEqual(p_certify.call_count, 3)

    @patch('grassmeet.grassmann.certify_smooth_gpk3')
    def test_search_success_is_reproducible(self, p_certify):
        def smooth(inst, *args, **kwargs):
            return SmoothnessCertificate(
                103, 'sha', [PatchVerdict(pair, True, 'degrevlex')
                             for pair in PLUECKER_PAIRS])
        p_certify.side_effect = smooth
        t1, cert = search_orthogonal_smooth(103, seed=42, progress=False)
        t2, _ = search_orthogonal_smooth(103, seed=42, progress=False)
        self.assertTrue(t1.is_orthogonal())
        self.assertEqual(t1, t2)
        self.assertEqual(cert.attempts, 1)

    @slow
    def test_fixture_is_smooth(self):
        inst = GPK3Instance.with_identity(load_fixture(), 'appendixB')
        cert = certify_smooth_gpk3(inst, progress=False)
        self.assertTrue(cert.smooth)
        self.assertTrue(all(v.unit_ideal for v in cert.patches))

    @slow
    def test_simultaneous_smoothness(self):
        rng = RandomState(2024)
        for _ in range(2):
            g = rng.random_invertible(F103, 10)
            inst = GPK3Instance.with_identity(g)
            x = certify_smooth_gpk3(inst, progress=False)
            y = certify_smooth_gpk3(double_mirror(inst), progress=False)
            self.assertEqual(x.smooth, y.smooth)

    @slow
    def test_transpose_same_verdict(self):
        t = load_fixture()
        cert = certify_smooth_gpk3(GPK3Instance.with_identity(t),
                                   progress=False)
        cert_t = certify_smooth_gpk3(GPK3Instance.with_identity(t.T),
                                     progress=False)
        self.assertTrue(cert.smooth)
        self.assertEqual(cert.smooth, cert_t.smooth)

    @slow
    def test_one_row_perturbation_not_smooth(self):
        rows = MatrixFF.identity(F103, 10).tolist()
        rows[9] = [1, 0, 0, 0, 0, 0, 0, 0, 0, 1]
        inst = GPK3Instance.with_identity(MatrixFF(F103, rows))
        cert = certify_smooth_gpk3(inst, progress=False)
        self.assertEqual(len(cert.patches), 10)
        self.assertFalse(cert.smooth)

    @slow
    def test_search_reproducible(self):
        def run():
            try:
                t, cert = search_orthogonal_smooth(7, seed=11, max_attempts=2,
                                                   progress=False)
            except SearchExhausted as e:
                return None, e.attempts
            return t, cert.to_dict(timings=False)

        first, second = run(), run()
        if first[0] is None:
            self.assertIsNone(second[0])
            self.assertTrue(first[1].equals(second[1]))
        else:
            self.assertTrue(first[0].is_orthogonal())
            self.assertEqual(first, second)


class TestSkewForms(unittest.TestCase):

    def test_rank_two(self):
        form = SkewForm.from_pluecker(F103, _unit_vector(0))
        rank, kernel = skew_rank(form)
        self.assertEqual(rank, 2)
        self.assertEqual(len(kernel), 3)
        for v in kernel:
            self.assertFalse(v[0] or v[1])

    def test_rank_four(self):
        x = _unit_vector(0) + _unit_vector(7)
        rank, kernel = skew_rank(SkewForm.from_pluecker(F103, x))
        self.assertEqual(rank, 4)
        self.assertEqual(len(kernel), 1)
        assert_array_equal(kernel[0], [0, 0, 0, 0, 1])

    def test_random_ranks_even(self):
        rng = RandomState(8)
        for _ in range(100):
            form = SkewForm.from_pluecker(F103, rng.random_vector(F103, 10))
            rank, kernel = skew_rank(form)
            self.assertIn(rank, (0, 2, 4))
            self.assertEqual(len(kernel), 5 - rank)

    def test_pluecker_round_trip(self):
        x = RandomState(3).random_vector(F103, 10)
        assert_array_equal(SkewForm.from_pluecker(F103, x).pluecker(), x)

    def test_not_skew(self):
        with self.assertRaises(InvalidInput):
            SkewForm(MatrixFF.identity(F103, 5))

    def test_plane_of_pluecker(self):
        rng = RandomState(6)
        a, b = rng.random_vector(F103, 5), rng.random_vector(F103, 5)
        x = wedge(F103, a, b)
        u, v = plane_of_pluecker(F103, x)
        w = wedge(F103, u, v)
        lead = int(x[np.nonzero(x)[0][0]])
        scale = (lead * F103.inverse(int(w[np.nonzero(w)[0][0]]))) % 103
        assert_array_equal((w * scale) % 103, x)

    def test_plane_of_rank_four(self):
        with self.assertRaises(InvalidInput):
            plane_of_pluecker(F103, _unit_vector(0) + _unit_vector(7))

    def test_tangency_criteria_agree(self):
        f7 = PrimeField(7)
        rng = RandomState(12)
        tangent = 0
        for _ in range(200):
            x = wedge(f7, rng.random_vector(f7, 5), rng.random_vector(f7, 5))
            if not np.any(x):
                continue
            y = rng.random_vector(f7, 10)
            # force some tangent samples: y = e_k∧e_l with A ⊂ ker(y)
            if rng.randbelow(2):
                a, b = plane_of_pluecker(f7, x)
                _, kernel = skew_rank(SkewForm.from_pluecker(
                    f7, wedge(f7, a, b)))
                y = wedge(f7, kernel[0], kernel[1]) if len(kernel) > 1 \
                    else y
            obs = is_tangent_hyperplane(f7, x, y)
            self.assertEqual(obs, tangent_by_pairing(f7, x, y))
            tangent += obs
        self.assertGreater(tangent, 0)


class TestEnumeration(unittest.TestCase):

    @parameterized.expand([(2, 155), (3, 1210)])
    def test_identity_counts(self, q, exp):
        g = MatrixFF.identity(PrimeField(q), 10)
        self.assertEqual(enumerate_rank2_points(q, g, 'X'), exp)
        self.assertEqual(enumerate_rank2_points(q, g, 'Y'), exp)

    @parameterized.expand([(2,), (3,)])
    def test_rref_oracle(self, q):
        rref = grassmannian_points_rref(q)
        enumerated = rank2_points(q)
        self.assertEqual(len(rref), len(enumerated))
        self.assertSetEqual({tuple(r) for r in rref},
                            {tuple(r) for r in enumerated})

    def test_sides_agree_over_f3(self):
        f3 = PrimeField(3)
        rng = RandomState(33)
        for _ in range(3):
            g = rng.random_invertible(f3, 10)
            self.assertEqual(enumerate_rank2_points(3, g, 'X'),
                             enumerate_rank2_points(3, g, 'Y'))

    def test_hyperplane_section_q2(self):
        self.assertEqual(count_hyperplane_section(2, _unit_vector(0)), 91)
        self.assertEqual(
            count_hyperplane_section(2, _unit_vector(0) + _unit_vector(7)),
            75)

    def test_incidence_identity_matrix(self):
        g = MatrixFF.identity(PrimeField(2), 10)
        self.assertEqual(incidence_pairs(2, g), 155 * 91)

    def test_enumeration_cap(self):
        g = MatrixFF.identity(PrimeField(11), 10)
        with self.assertRaises(EnumerationBudgetExceeded):
            enumerate_rank2_points(11, g)

    def test_unknown_side(self):
        g = MatrixFF.identity(PrimeField(2), 10)
        with self.assertRaises(InvalidInput):
            enumerate_rank2_points(2, g, 'Z')

    def test_field_mismatch(self):
        with self.assertRaises(InvalidInput):
            enumerate_rank2_points(3, MatrixFF.identity(F103, 10))


if __name__ == "__main__":
    unittest.main()
