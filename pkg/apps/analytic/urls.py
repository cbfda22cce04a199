# File: apps/analytic/urls.py
from django.urls import path
from .views import AnalyticTableAPIView

urlpatterns = [
    path('table/', AnalyticTableAPIView.as_view(), name='analytic-table'),
]
