import math

import numpy as np
from django.core.cache import cache
from django.test import SimpleTestCase

from apps.analytic.closed_form import w1_area
from apps.analytic.params import AnalyticParams, IntegrationSettings
from apps.analytic.recursion import (
    analytic_prd,
    expected_progress_approx,
    one_hop_progress,
    progress_recursion,
)
from apps.netmodel.network import Scheme

COARSE = IntegrationSettings(samples=4096, radial_step=0.1, angular_step=math.pi / 45)


def reference_recursion(areas, lam, p):
    """Straight transcription of the recursion, kept separate from the library."""
    previous = 0.0
    out = []
    for area in areas:
        c = lam * (1 - p) / 2 * (area + previous * math.sqrt(area))
        factor = 1 - (1 - math.exp(-c)) / c
        previous = (math.sqrt(area) + previous) / 2 * factor
        out.append(previous)
    return out


class ProgressRecursionTests(SimpleTestCase):
    def test_reference_point(self):
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0)
        d_tilde, c = progress_recursion([w1_area(params)], params.intensity, params.map_p)
        self.assertAlmostEqual(c[0], 0.2807, places=4)
        self.assertAlmostEqual(d_tilde[0], 0.05736, places=5)
        self.assertAlmostEqual(one_hop_progress(params), d_tilde[0], places=14)

    def test_matches_independent_transcription(self):
        areas = [0.802, 1.45, 1.9, 2.2]
        for lam, p in ((1.0, 0.3), (0.5, 0.1), (3.0, 0.7)):
            d_tilde, _ = progress_recursion(areas, lam, p)
            reference = reference_recursion(areas, lam, p)
            for ours, theirs in zip(d_tilde, reference):
                self.assertLessEqual(abs(ours - theirs) / theirs, 1e-12)

    def test_dense_receivers_reach_half_cell_width(self):
        params = AnalyticParams(intensity=1.0, map_p=1e-6, alpha=4.0, rate=3.0)
        d1 = one_hop_progress(params)
        self.assertAlmostEqual(d1 / (math.sqrt(w1_area(params)) / 2), 1.0, places=4)

    def test_no_receivers_means_no_progress(self):
        params = AnalyticParams(intensity=1.0, map_p=1 - 1e-6, alpha=4.0, rate=3.0)
        self.assertLess(one_hop_progress(params), 1e-6)

    def test_progress_falls_with_rate(self):
        values = [one_hop_progress(AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=r)) for r in (1, 2, 3, 4)]
        self.assertTrue(all(a > b for a, b in zip(values, values[1:])))


class ExpectedProgressTests(SimpleTestCase):
    def setUp(self):
        cache.clear()

    def test_table_is_monotone(self):
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, diversity=3, integration=COARSE)
        table = expected_progress_approx(params)
        self.assertEqual(table.diversity, 3)
        self.assertTrue(np.all(np.diff(table.d_tilde) > 0))
        self.assertTrue(np.all(np.diff(table.cell_area) >= 0))
        self.assertEqual(table.cell_area[0], w1_area(params))
        self.assertGreater(table.d_tilde[0], 0)

    def test_progress_falls_with_rate_for_two_blocks(self):
        tables = [
            expected_progress_approx(AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=r, diversity=2,
                                                    integration=COARSE))
            for r in (2.0, 3.0, 4.0)
        ]
        second = [t.d_tilde[1] for t in tables]
        self.assertTrue(all(a > b for a, b in zip(second, second[1:])))

    def test_results_are_cached(self):
        params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, diversity=2, integration=COARSE)
        first = expected_progress_approx(params)
        self.assertIsNotNone(cache.get(params.cache_key("analytic-table")))
        second = expected_progress_approx(params)
        np.testing.assert_array_equal(first.d_tilde, second.d_tilde)

    def test_analytic_prd(self):
        nc = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, scheme=Scheme.NC)
        self.assertAlmostEqual(analytic_prd(nc), 3.0 * 0.3 * one_hop_progress(nc), places=12)

        irc = nc.with_changes(scheme=Scheme.IRC, diversity=2, integration=COARSE)
        table = expected_progress_approx(irc)
        self.assertAlmostEqual(analytic_prd(irc), 0.9 * (table.d_tilde[1] - table.d_tilde[0]), places=12)

    def test_cell_areas_nondecreasing_for_every_scheme(self):
        for scheme, diversity in ((Scheme.NC, 1), (Scheme.RC, 3), (Scheme.IRC, 3)):
            params = AnalyticParams(intensity=1.0, map_p=0.3, alpha=4.0, rate=3.0, scheme=scheme,
                                    diversity=diversity, integration=COARSE)
            with self.subTest(scheme=scheme.value):
                table = expected_progress_approx(params)
                self.assertTrue(np.all(np.diff(table.cell_area) >= 0))
                self.assertTrue(np.all(np.diff(table.d_tilde) > 0))

    def test_two_block_irc_beats_no_combining(self):
        for alpha in (3.0, 4.0):
            nc = AnalyticParams(intensity=1.0, map_p=0.3, alpha=alpha, rate=3.0, scheme=Scheme.NC)
            irc = nc.with_changes(scheme=Scheme.IRC, diversity=2, integration=COARSE)
            with self.subTest(alpha=alpha):
                self.assertGreater(analytic_prd(nc), 0.0)
                self.assertGreater(analytic_prd(irc), analytic_prd(nc))
