from typing import Optional

from django.contrib import admin
from django.http import HttpRequest
from solo.admin import SingletonModelAdmin
from unfold.admin import ModelAdmin, TabularInline

from .models import ExperimentRun, Observation, SimulationDefaults


@admin.register(SimulationDefaults)
class SimulationDefaultsAdmin(ModelAdmin, SingletonModelAdmin):
    """Admin interface for the singleton SimulationDefaults model."""
    fieldsets = (
        ("Моделирование", {"fields": ("trials", "retry_cap", "window_scale", "contention_bits")}),
        (
            "Аналитическое приближение",
            {
                "fields": ("integration_samples", "tail_tolerance"),
                "description": "Параметры численного интегрирования площади областей декодирования.",
            },
        ),
        ("API", {"fields": ("analytic_throttle_seconds",)}),
    )


class ObservationInline(TabularInline):
    model = Observation
    fields = ("experiment", "scheme", "objective", "sweep_axis", "sweep_value", "metric", "mean", "std_error", "n")
    readonly_fields = fields
    extra = 0
    can_delete = False
    show_change_link = True

    def has_add_permission(self, request: HttpRequest, obj: Optional[ExperimentRun] = None) -> bool:
        return False


@admin.register(ExperimentRun)
class ExperimentRunAdmin(ModelAdmin):
    """
    Read-only admin for experiment runs.

    Runs are created by the management commands, never by hand.
    """
    list_display = ("name", "source", "status", "seed", "workers", "trials_scale", "started_at", "finished_at")
    list_filter = ("status", "started_at")
    search_fields = ("name", "source")
    readonly_fields = (
        "name", "source", "seed", "workers", "trials_scale", "status",
        "output_dir", "summary", "error", "started_at", "finished_at",
    )
    inlines = [ObservationInline]

    def has_add_permission(self, request: HttpRequest) -> bool:
        """
        Prevent adding runs from the admin interface.

        Args:
            request: The current HTTP request.

        Returns:
            False to disable the 'Add' functionality.
        """
        return False

    def has_change_permission(self, request: HttpRequest, obj: Optional[ExperimentRun] = None) -> bool:
        return False


@admin.register(Observation)
class ObservationAdmin(ModelAdmin):
    """Admin interface for the Observation model."""
    list_display = ("run", "experiment", "scheme", "objective", "sweep_axis", "sweep_value", "metric", "mean", "std_error")
    list_filter = ("scheme", "objective", "metric", "experiment")
    search_fields = ("experiment", "run__name")

    def has_add_permission(self, request: HttpRequest) -> bool:
        return False

    def has_change_permission(self, request: HttpRequest, obj: Optional[Observation] = None) -> bool:
        return False
