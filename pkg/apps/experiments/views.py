# File: apps/experiments/views.py
from typing import Any

from django.db.models import Count, QuerySet
from drf_spectacular.utils import OpenApiResponse, extend_schema
from rest_framework import generics

from .models import ExperimentRun
from .serializers import ExperimentRunDetailSerializer, ExperimentRunSerializer


@extend_schema(
    tags=["experiments"],
    summary="Список запусков экспериментов",
    description="Возвращает запуски экспериментов, начиная с последнего, с числом сохранённых наблюдений.",
    responses={
        200: OpenApiResponse(
            response=ExperimentRunSerializer(many=True),
            description="Список запусков успешно получен.",
        ),
    },
)
class ExperimentRunListAPIView(generics.ListAPIView):
    """
    API endpoint listing every experiment run.
    """
    permission_classes: list[Any] = []
    serializer_class = ExperimentRunSerializer

    def get_queryset(self) -> "QuerySet[ExperimentRun]":
        """
        Annotate each run with the number of its observations.

        Returns:
            A QuerySet of ExperimentRun objects, newest first.
        """
        return ExperimentRun.objects.annotate(observation_count=Count('observations')).order_by('-started_at')


@extend_schema(
    tags=["experiments"],
    summary="Получить запуск эксперимента",
    description="Возвращает запуск со сводкой выигрышей и всеми наблюдениями (строками CSV).",
    responses={
        200: OpenApiResponse(
            response=ExperimentRunDetailSerializer,
            description="Запуск успешно получен.",
        ),
        404: OpenApiResponse(description="Запуск с таким идентификатором не найден."),
    },
)
class ExperimentRunDetailAPIView(generics.RetrieveAPIView):
    """
    API endpoint returning one run with its observations.
    """
    permission_classes: list[Any] = []
    serializer_class = ExperimentRunDetailSerializer
    queryset = ExperimentRun.objects.prefetch_related('observations')
