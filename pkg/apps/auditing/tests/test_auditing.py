import json
from unittest import mock

import numpy as np
import requests
from django.contrib.auth import get_user_model
from django.template import Context, Template
from django.test import RequestFactory, TestCase

from apps.auditing.events import EVENT_DEFINITIONS
from apps.auditing.models import Event, LogEntry, Webhook
from apps.auditing.signals import event_logged
from apps.auditing.utils import get_client_ip
from apps.auditing.webhooks import build_context, send_webhook_request, trigger_webhooks
from apps.experiments.models import ExperimentRun


class EventSynchronizationTests(TestCase):
    def test_every_definition_is_in_the_database(self):
        identifiers = set(Event.objects.values_list("identifier", flat=True))
        self.assertEqual(identifiers, {item["identifier"] for item in EVENT_DEFINITIONS})


class SignalTests(TestCase):
    def test_new_run_logs_run_started(self):
        run = ExperimentRun.objects.create(name="fig4", source="suite:fig4", seed=1)
        entry = LogEntry.objects.get(event__identifier="RUN_STARTED")
        self.assertEqual(entry.run, run)
        self.assertEqual(entry.details["source"], "suite:fig4")

    def test_saving_existing_run_does_not_log_again(self):
        run = ExperimentRun.objects.create(name="fig4", source="suite:fig4", seed=1)
        run.status = ExperimentRun.Status.FINISHED
        run.save()
        self.assertEqual(LogEntry.objects.filter(event__identifier="RUN_STARTED").count(), 1)

    def test_custom_signal_records_details(self):
        event_logged.send(sender=self.__class__, event_identifier="SPEC_REJECTED", details={"problems": 2})
        self.assertEqual(LogEntry.objects.get(event__identifier="SPEC_REJECTED").details, {"problems": 2})

    def test_unknown_event_is_ignored(self):
        event_logged.send(sender=self.__class__, event_identifier="NO_SUCH_EVENT")
        self.assertFalse(LogEntry.objects.exists())

    def test_admin_login_is_logged(self):
        user = get_user_model().objects.create_superuser("admin", "admin@example.com", "pass")
        self.client.login(username="admin", password="pass")
        entry = LogEntry.objects.get(event__identifier="ADMIN_LOGIN")
        self.assertEqual(entry.user, user)


class ClientIpTests(TestCase):
    def test_forwarded_header_wins(self):
        request = RequestFactory().get("/", HTTP_X_FORWARDED_FOR="10.0.0.1, 10.0.0.2", REMOTE_ADDR="127.0.0.1")
        self.assertEqual(get_client_ip(request), "10.0.0.1")

    def test_remote_addr_fallback(self):
        request = RequestFactory().get("/", REMOTE_ADDR="192.168.1.5")
        self.assertEqual(get_client_ip(request), "192.168.1.5")


class WebhookTests(TestCase):
    def setUp(self):
        self.event = Event.objects.get(identifier="RUN_FINISHED")
        self.run = ExperimentRun.objects.create(name="fig5", source="suite:fig5", seed=3)
        self.entry = LogEntry.objects.create(event=self.event, run=self.run, details={"gain": 0.265})

    def make_webhook(self, **overrides):
        values = dict(name="notify", url="https://hooks.example.com/prd", http_method=Webhook.HttpMethod.POST)
        values.update(overrides)
        webhook = Webhook.objects.create(**values)
        webhook.triggers.add(self.event)
        return webhook

    @mock.patch("apps.auditing.webhooks.requests.request")
    def test_default_body_is_json(self, request):
        webhook = self.make_webhook()
        send_webhook_request(webhook, build_context(self.entry))
        kwargs = request.call_args.kwargs
        self.assertEqual(kwargs["method"], "POST")
        self.assertEqual(kwargs["json"]["event"], "RUN_FINISHED")
        self.assertEqual(kwargs["json"]["run"], self.run.pk)
        self.assertEqual(kwargs["json"]["details"], {"gain": 0.265})

    @mock.patch("apps.auditing.webhooks.requests.request")
    def test_template_body_and_get_params(self, request):
        webhook = self.make_webhook(
            http_method=Webhook.HttpMethod.GET,
            body_template='{"run": "{{ run.name }}", "details": {{ details|json_dump }}}',
            headers={"X-Key": "abc"},
        )
        send_webhook_request(webhook, build_context(self.entry))
        kwargs = request.call_args.kwargs
        self.assertEqual(kwargs["params"], {"run": "fig5", "details": {"gain": 0.265}})
        self.assertEqual(kwargs["headers"]["X-Key"], "abc")

    @mock.patch("apps.auditing.webhooks.requests.request")
    def test_invalid_json_template_is_not_sent(self, request):
        webhook = self.make_webhook(body_template="not json")
        with self.assertLogs("apps.auditing.webhooks", level="ERROR"):
            send_webhook_request(webhook, build_context(self.entry))
        request.assert_not_called()

    @mock.patch("apps.auditing.webhooks.requests.request")
    def test_network_error_is_logged(self, request):
        request.side_effect = requests.exceptions.ConnectionError("down")
        webhook = self.make_webhook()
        with self.assertLogs("apps.auditing.webhooks", level="ERROR"):
            send_webhook_request(webhook, build_context(self.entry))

    @mock.patch("apps.auditing.webhooks.send_webhook_request")
    def test_only_active_subscribed_webhooks_fire(self, send):
        active = self.make_webhook()
        self.make_webhook(name="inactive", is_active=False)
        Webhook.objects.create(name="other", url="https://hooks.example.com/other")
        threads = trigger_webhooks(self.entry)
        for thread in threads:
            thread.join()
        self.assertEqual(len(threads), 1)
        self.assertEqual(send.call_args.args[0], active)


class JsonDumpFilterTests(TestCase):
    def test_renders_unescaped_json(self):
        rendered = Template("{{ value|json_dump }}").render(Context({"value": {"a": "<b>"}}))
        self.assertEqual(rendered, '{"a": "<b>"}')

    def test_none_renders_empty(self):
        self.assertEqual(Template("{{ value|json_dump }}").render(Context({"value": None})), "")

    def test_numpy_values_from_run_summaries(self):
        rendered = Template("{{ value|json_dump }}").render(
            Context({"value": {"gain": np.float64(0.25), "d_tilde": np.array([0.5, 1.0]), "n": np.int64(3)}})
        )
        self.assertEqual(json.loads(rendered), {"gain": 0.25, "d_tilde": [0.5, 1.0], "n": 3})
