from unittest import mock

from django.core.cache import cache
from django.test import TestCase
from django.urls import reverse
from rest_framework.test import APIClient

from apps.analytic.throttles import AnalyticTableRateThrottle
from apps.auditing.models import LogEntry
from apps.experiments.models import SimulationDefaults
from core.exceptions import IntegrationError

NC_QUERY = {"intensity": 1, "map_p": 0.3, "alpha": 4, "rate": 3, "scheme": "NC"}


class AnalyticTableAPITests(TestCase):
    def setUp(self):
        cache.clear()
        defaults = SimulationDefaults.get_solo()
        defaults.analytic_throttle_seconds = 0
        defaults.save()
        self.client = APIClient()
        self.url = reverse("analytic-table")

    def test_nc_table(self):
        response = self.client.get(self.url, NC_QUERY)
        self.assertEqual(response.status_code, 200)
        self.assertEqual(len(response.data["rows"]), 1)
        row = response.data["rows"][0]
        self.assertEqual(row["m"], 1)
        self.assertAlmostEqual(row["d_tilde"], 0.05736, places=5)
        self.assertAlmostEqual(response.data["prd"], 0.9 * row["d_tilde"], places=10)

    def test_request_is_audited(self):
        self.client.get(self.url, NC_QUERY)
        entry = LogEntry.objects.get(event__identifier="ANALYTIC_TABLE_SERVED")
        self.assertEqual(entry.details["parameters"]["scheme"], "NC")

    def test_out_of_domain_parameters(self):
        response = self.client.get(self.url, {**NC_QUERY, "map_p": 1.5, "alpha": 2})
        self.assertEqual(response.status_code, 400)
        self.assertIn("map_p", response.data)
        self.assertIn("alpha", response.data)

    def test_nc_with_diversity_rejected(self):
        response = self.client.get(self.url, {**NC_QUERY, "diversity": 2})
        self.assertEqual(response.status_code, 400)
        self.assertIn("diversity", response.data)

    def test_missing_parameter(self):
        response = self.client.get(self.url, {"alpha": 4, "rate": 3})
        self.assertEqual(response.status_code, 400)
        self.assertIn("map_p", response.data)

    def test_integration_failure_is_422(self):
        error = IntegrationError("cell 2 did not converge", {"radius": 30.0})
        with mock.patch("apps.analytic.views.expected_progress_approx", side_effect=error):
            response = self.client.get(self.url, {**NC_QUERY, "scheme": "IRC", "diversity": 2})
        self.assertEqual(response.status_code, 422)
        self.assertEqual(response.data["diagnostics"], {"radius": 30.0})


class AnalyticThrottleTests(TestCase):
    def setUp(self):
        cache.clear()
        self.client = APIClient()
        self.url = reverse("analytic-table")

    def test_second_request_is_throttled_and_audited_once(self):
        defaults = SimulationDefaults.get_solo()
        defaults.analytic_throttle_seconds = 60
        defaults.save()

        self.assertEqual(self.client.get(self.url, NC_QUERY).status_code, 200)
        self.assertEqual(self.client.get(self.url, NC_QUERY).status_code, 429)
        self.assertEqual(self.client.get(self.url, NC_QUERY).status_code, 429)
        self.assertEqual(LogEntry.objects.filter(event__identifier="API_THROTTLED").count(), 1)

    def test_zero_period_disables_throttle(self):
        defaults = SimulationDefaults.get_solo()
        defaults.analytic_throttle_seconds = 0
        defaults.save()
        self.assertIsNone(AnalyticTableRateThrottle().get_rate())

    def test_parse_rate(self):
        throttle = AnalyticTableRateThrottle.__new__(AnalyticTableRateThrottle)
        self.assertEqual(throttle.parse_rate("1/10s"), (1, 10))
        self.assertEqual(throttle.parse_rate("2/3m"), (2, 180))
        self.assertEqual(throttle.parse_rate("bogus"), (None, None))
        self.assertEqual(throttle.parse_rate(None), (None, None))
