# File: apps/experiments/urls.py
from django.urls import path
from .views import ExperimentRunDetailAPIView, ExperimentRunListAPIView

urlpatterns = [
    path('runs/', ExperimentRunListAPIView.as_view(), name='experiment-runs'),
    path('runs/<int:pk>/', ExperimentRunDetailAPIView.as_view(), name='experiment-run-detail'),
]
