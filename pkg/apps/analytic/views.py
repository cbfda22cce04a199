# File: apps/analytic/views.py
from typing import Any

from drf_spectacular.utils import OpenApiParameter, OpenApiResponse, extend_schema
from rest_framework.request import Request
from rest_framework.response import Response
from rest_framework.views import APIView

from apps.auditing.signals import event_logged
from apps.auditing.utils import get_client_ip
from apps.experiments.models import SimulationDefaults

from .params import AnalyticParams, IntegrationSettings
from .recursion import analytic_prd, expected_progress_approx
from .serializers import AnalyticQuerySerializer, AnalyticTableSerializer
from .throttles import AnalyticTableRateThrottle


@extend_schema(
    tags=["analytic"],
    summary="Рассчитать аналитическую таблицу продвижения",
    description=(
        "Вычисляет приближения d̃_1 … d̃_M ожидаемого продвижения, площади областей декодирования "
        "и PRD для заданной рабочей точки. Результаты кэшируются по набору параметров."
    ),
    parameters=[AnalyticQuerySerializer],
    responses={
        200: OpenApiResponse(response=AnalyticTableSerializer, description="Таблица успешно рассчитана."),
        400: OpenApiResponse(description="Параметры вне области определения."),
        422: OpenApiResponse(description="Численное интегрирование не сошлось."),
        429: OpenApiResponse(description="Слишком много запросов."),
    },
)
class AnalyticTableAPIView(APIView):
    """
    API endpoint computing the analytic progress table for one operating point.
    """
    permission_classes: list[Any] = []
    throttle_classes = [AnalyticTableRateThrottle]

    def get(self, request: Request, *args: Any, **kwargs: Any) -> Response:
        """
        Handle GET requests for an analytic table.

        Args:
            request: The DRF request object.
            *args: Variable length argument list.
            **kwargs: Arbitrary keyword arguments.

        Returns:
            A DRF Response with the serialized table.
        """
        query = AnalyticQuerySerializer(data=request.query_params)
        query.is_valid(raise_exception=True)

        defaults = SimulationDefaults.get_solo()
        integration = IntegrationSettings(samples=defaults.integration_samples, tail_tolerance=defaults.tail_tolerance)
        params = AnalyticParams(**query.validated_data, integration=integration)

        table = expected_progress_approx(params)
        payload = {
            "intensity": params.intensity,
            "map_p": params.map_p,
            "alpha": params.alpha,
            "rate": params.rate,
            "diversity": params.diversity,
            "scheme": params.scheme.value,
            "rows": table.as_rows(),
            "prd": analytic_prd(params),
        }

        event_logged.send(
            sender=self.__class__,
            event_identifier="ANALYTIC_TABLE_SERVED",
            details={
                "ip_address": get_client_ip(request),
                "parameters": query.validated_data,
                "prd": payload["prd"],
            },
        )
        return Response(AnalyticTableSerializer(payload).data)
