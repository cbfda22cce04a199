# File: apps/experiments/serializers.py
from rest_framework import serializers

from .models import ExperimentRun, Observation


class ObservationSerializer(serializers.ModelSerializer):
    """Serializer for a single CSV row of a run."""
    class Meta:
        model = Observation
        fields = [
            'experiment', 'scheme', 'objective', 'sweep_axis', 'sweep_value',
            'metric', 'mean', 'std_error', 'n', 'seed', 'parameters',
        ]


class ExperimentRunSerializer(serializers.ModelSerializer):
    """Serializer for the run list; observations are left out."""
    observation_count = serializers.IntegerField(read_only=True)

    class Meta:
        model = ExperimentRun
        fields = [
            'id', 'name', 'source', 'seed', 'workers', 'trials_scale', 'status',
            'started_at', 'finished_at', 'observation_count',
        ]


class ExperimentRunDetailSerializer(serializers.ModelSerializer):
    """
    Serializer for a single run with its summary and every observation.
    """
    observations = ObservationSerializer(many=True, read_only=True)

    class Meta:
        model = ExperimentRun
        fields = [
            'id', 'name', 'source', 'seed', 'workers', 'trials_scale', 'status',
            'output_dir', 'summary', 'error', 'started_at', 'finished_at', 'observations',
        ]
