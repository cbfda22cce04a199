# File: apps/analytic/serializers.py
from typing import Any, Dict

from rest_framework import serializers

from apps.netmodel.network import Scheme


class AnalyticQuerySerializer(serializers.Serializer):
    """Query parameters of the analytic table endpoint."""
    intensity = serializers.FloatField(default=1.0, help_text="Плотность узлов λ.")
    map_p = serializers.FloatField(help_text="Вероятность доступа к среде p, 0 < p < 1.")
    alpha = serializers.FloatField(help_text="Показатель затухания α > 2.")
    rate = serializers.FloatField(help_text="Скорость кода R > 0.")
    diversity = serializers.IntegerField(default=1, min_value=1, max_value=8, help_text="Порядок разнесения M.")
    scheme = serializers.ChoiceField(choices=[s.value for s in Scheme], default=Scheme.IRC.value)

    def validate(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Check the operating point against the domain of the approximation.

        Args:
            data: The dictionary of query parameters to be validated.

        Returns:
            The validated data dictionary.

        Raises:
            serializers.ValidationError: If a value lies outside its domain.
        """
        errors = {}
        if data['intensity'] <= 0:
            errors['intensity'] = "Must be > 0."
        if not 0 < data['map_p'] < 1:
            errors['map_p'] = "Must lie in (0, 1)."
        if data['alpha'] <= 2:
            errors['alpha'] = "Must be > 2."
        if data['rate'] <= 0:
            errors['rate'] = "Must be > 0."
        if data['scheme'] == Scheme.NC.value and data['diversity'] != 1:
            errors['diversity'] = "NC has diversity 1."
        if errors:
            raise serializers.ValidationError(errors)
        return data


class AnalyticRowSerializer(serializers.Serializer):
    m = serializers.IntegerField()
    d_tilde = serializers.FloatField()
    cell_area = serializers.FloatField()
    c = serializers.FloatField()


class AnalyticTableSerializer(serializers.Serializer):
    """
    Serializer for a computed table: d̃_m, |W_m| and c_m per hop plus the PRD.
    """
    intensity = serializers.FloatField()
    map_p = serializers.FloatField()
    alpha = serializers.FloatField()
    rate = serializers.FloatField()
    diversity = serializers.IntegerField()
    scheme = serializers.CharField()
    rows = AnalyticRowSerializer(many=True)
    prd = serializers.FloatField()
