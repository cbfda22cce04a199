import math

import numpy as np
from django.test import SimpleTestCase

from apps.analytic.cells import cell_area, point_success, sample_bank, sample_positive_stable
from apps.analytic.closed_form import success_probability, w1_area
from apps.analytic.params import AnalyticParams, IntegrationSettings
from apps.netmodel.network import Scheme
from core.exceptions import ContractViolation, IntegrationError

COARSE = IntegrationSettings(samples=4096, radial_step=0.1, angular_step=math.pi / 45)


class StableSamplerTests(SimpleTestCase):
    def test_laplace_transform(self):
        rng = np.random.default_rng(0)
        u, e = rng.random(400_000), rng.random(400_000)
        for delta in (0.5, 2.0 / 3.0):
            samples = sample_positive_stable(delta, u, e)
            for s in (0.3, 1.0, 2.5):
                with self.subTest(delta=delta, s=s):
                    self.assertAlmostEqual(float(np.exp(-s * samples).mean()), math.exp(-s ** delta), delta=3e-3)

    def test_invalid_index(self):
        with self.assertRaises(ContractViolation):
            sample_positive_stable(1.0, np.array([0.5]), np.array([0.5]))

    def test_bank_shape(self):
        bank = sample_bank(COARSE, 0.5, 3)
        self.assertEqual((bank.size, bank.terms), (4096, 3))
        self.assertTrue(np.all(bank.stable > 0))


class PointSuccessTests(SimpleTestCase):
    def test_single_term_matches_closed_form(self):
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0)
        bank = sample_bank(params.integration, params.delta, 1)
        points = np.array([[0.2, 0.0], [0.0, 0.6], [-1.0, 0.3]])
        expected = success_probability(np.hypot(points[:, 0], points[:, 1]), params)
        np.testing.assert_allclose(point_success(points, np.zeros((1, 2)), params, bank), expected, rtol=2e-2)

    def test_second_term_helps(self):
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, diversity=2)
        bank = sample_bank(params.integration, params.delta, 2)
        points = np.array([[0.5, 0.0], [0.9, 0.2]])
        eta = np.array([[0.0, 0.0], [0.3, 0.0]])
        single = point_success(points, eta[:1], params, bank)
        combined = point_success(points, eta, params, bank)
        self.assertTrue(np.all(combined >= single))

    def test_bank_must_cover_terms(self):
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0)
        bank = sample_bank(params.integration, params.delta, 1)
        with self.assertRaises(ContractViolation):
            point_success(np.zeros((1, 2)), np.zeros((2, 2)), params, bank)


class CellAreaTests(SimpleTestCase):
    def test_first_cell_matches_closed_form(self):
        for alpha in (3.0, 4.0):
            params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=alpha, rate=3.0)
            with self.subTest(alpha=alpha):
                self.assertAlmostEqual(cell_area(1, params, []) / w1_area(params), 1.0, delta=0.01)

    def test_cells_grow_with_diversity(self):
        for scheme in (Scheme.IRC, Scheme.RC):
            params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, diversity=3,
                                    scheme=scheme, integration=COARSE)
            with self.subTest(scheme=scheme):
                first = cell_area(1, params, [])
                second = cell_area(2, params, [0.06])
                third = cell_area(3, params, [0.06, 0.16])
                self.assertGreaterEqual(second, first)
                self.assertGreaterEqual(third, second)

    def test_prefix_length_checked(self):
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, diversity=2)
        with self.assertRaises(ContractViolation):
            cell_area(2, params, [])

    def test_tail_not_vanishing_raises_with_diagnostics(self):
        settings = IntegrationSettings(samples=1024, radial_extent=1.5, tail_tolerance=1e-12)
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, integration=settings)
        with self.assertRaises(IntegrationError) as caught:
            cell_area(1, params, [])
        self.assertIn("accumulated", caught.exception.diagnostics)
        self.assertGreater(caught.exception.diagnostics["radius"], 0.0)
