"""Experiment spec files: YAML in, validated dataclasses out.

A spec holds one or more experiments. Each experiment sweeps a single axis
(``p``, ``R``, ``alpha`` or ``M``) with the remaining operating point fixed::

    name: fig2
    seed: 1
    experiments:
      - name: prd-vs-p
        mode: evaluate
        sweep: {axis: p, start: 0.02, stop: 0.6, step: 0.02}
        fixed: {intensity: 1.0, alpha: 3.0, rate: 3.0, diversity: 2}
        schemes: [NC, RC, IRC]
        objectives: [simulated, analytic]
        trials: 10000

Unknown keys are rejected. Every problem is reported with the line of the
offending key.
"""
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import yaml
from rest_framework import serializers

from apps.analytic.params import IntegrationSettings
from apps.experiments.estimation import MIN_TRIALS
from apps.experiments.optimization import Objective, SearchBounds
from apps.netmodel.network import MIN_EXPECTED_NODES, NetworkConfig, Scheme, Selection
from core.exceptions import ConfigurationError, SpecValidationError

# Sweep axis -> NetworkConfig field.
AXIS_FIELDS = {"p": "map_p", "R": "rate", "alpha": "alpha", "M": "diversity"}
OPTIMIZABLE_AXES = ("alpha", "M")
MAX_SEED = 2 ** 63 - 1

Path_ = Tuple[Union[str, int], ...]


class Mode:
    EVALUATE = "evaluate"
    OPTIMIZE = "optimize"
    CHOICES = (EVALUATE, OPTIMIZE)


class StrictSerializer(serializers.Serializer):
    """Serializer that rejects keys it does not declare."""

    def to_internal_value(self, data: Any) -> Dict[str, Any]:
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: ["Unknown field."] for key in unknown})
        return super().to_internal_value(data)


def sweep_values(start: float, stop: float, step: float) -> List[float]:
    """Points ``start, start + step, ...`` not beyond ``stop``."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + step * index, 10) for index in range(count)]


class SweepSerializer(StrictSerializer):
    axis = serializers.ChoiceField(choices=list(AXIS_FIELDS))
    values = serializers.ListField(child=serializers.FloatField(), required=False, min_length=1)
    start = serializers.FloatField(required=False)
    stop = serializers.FloatField(required=False)
    step = serializers.FloatField(required=False)

    def validate(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Expand a range into explicit values.

        Exactly one of ``values`` or ``start``/``stop``/``step`` is allowed.
        """
        has_range = any(key in data for key in ("start", "stop", "step"))
        if "values" in data and has_range:
            raise serializers.ValidationError("Give either values or start/stop/step, not both.")
        if "values" not in data:
            missing = [key for key in ("start", "stop", "step") if key not in data]
            if missing:
                raise serializers.ValidationError({key: ["This field is required."] for key in missing})
            if not data["step"] > 0:
                raise serializers.ValidationError({"step": ["must be > 0."]})
            if data["stop"] < data["start"]:
                raise serializers.ValidationError({"stop": [f"must be >= start ({data['start']})."]})
            data["values"] = sweep_values(data["start"], data["stop"], data["step"])
        if data["axis"] == "M":
            bad = [value for value in data["values"] if value != int(value)]
            if bad:
                raise serializers.ValidationError({"values": [f"M must be an integer, got {bad[0]}."]})
            data["values"] = [int(value) for value in data["values"]]
        return data


class FixedSerializer(StrictSerializer):
    intensity = serializers.FloatField(required=False)
    map_p = serializers.FloatField(required=False)
    alpha = serializers.FloatField(required=False)
    rate = serializers.FloatField(required=False)
    diversity = serializers.IntegerField(required=False)
    window_radius = serializers.FloatField(required=False, allow_null=True)
    retry_cap = serializers.IntegerField(required=False)
    selection = serializers.ChoiceField(choices=[s.value for s in Selection], required=False)
    contention_bits = serializers.IntegerField(required=False)
    contention_d_max = serializers.FloatField(required=False, allow_null=True)


class SearchSerializer(StrictSerializer):
    rate = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2, required=False)
    map_p = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2, required=False)
    rate_step = serializers.FloatField(required=False)
    map_p_step = serializers.FloatField(required=False)
    tolerance = serializers.FloatField(required=False)
    refinements = serializers.IntegerField(required=False)

    def validate(self, data: Dict[str, Any]) -> Dict[str, Any]:
        values = {key: tuple(value) if isinstance(value, list) else value for key, value in data.items()}
        try:
            SearchBounds(**values)
        except ConfigurationError as exc:
            raise serializers.ValidationError(str(exc))
        return values


class IntegrationSerializer(StrictSerializer):
    samples = serializers.IntegerField(required=False)
    tail_tolerance = serializers.FloatField(required=False)
    radial_step = serializers.FloatField(required=False)

    def validate(self, data: Dict[str, Any]) -> Dict[str, Any]:
        try:
            IntegrationSettings(**data)
        except ConfigurationError as exc:
            raise serializers.ValidationError(str(exc))
        return data


class ExperimentSerializer(StrictSerializer):
    name = serializers.RegexField(r"^[A-Za-z0-9_.-]+$", max_length=100)
    mode = serializers.ChoiceField(choices=Mode.CHOICES, default=Mode.EVALUATE)
    sweep = SweepSerializer()
    fixed = FixedSerializer(required=False, default=dict)
    schemes = serializers.ListField(child=serializers.ChoiceField(choices=[s.value for s in Scheme]), min_length=1)
    objectives = serializers.ListField(
        child=serializers.ChoiceField(choices=[o.value for o in Objective]), min_length=1,
        default=lambda: [Objective.SIMULATED.value],
    )
    trials = serializers.IntegerField(required=False, min_value=MIN_TRIALS)
    seed = serializers.IntegerField(required=False, min_value=0, max_value=MAX_SEED)
    workers = serializers.IntegerField(required=False, min_value=1)
    search = SearchSerializer(required=False)
    integration = IntegrationSerializer(required=False)

    def validate(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Check the operating point at every sweep value.

        Raises:
            serializers.ValidationError: Keyed by the offending field, so the
                error can be traced to its line.
        """
        axis = data["sweep"]["axis"]
        axis_field = AXIS_FIELDS[axis]
        fixed = data["fixed"]

        if axis_field in fixed:
            raise serializers.ValidationError({"fixed": {axis_field: [f"is swept along '{axis}'; remove it from fixed."]}})
        if len(set(data["schemes"])) != len(data["schemes"]):
            raise serializers.ValidationError({"schemes": ["Schemes must be distinct."]})
        if len(set(data["objectives"])) != len(data["objectives"]):
            raise serializers.ValidationError({"objectives": ["Objectives must be distinct."]})

        if data["mode"] == Mode.OPTIMIZE:
            if axis not in OPTIMIZABLE_AXES:
                raise serializers.ValidationError(
                    {"sweep": {"axis": [f"optimize mode sweeps one of {', '.join(OPTIMIZABLE_AXES)}; R and p are searched."]}}
                )
            searched = ("alpha",)
        else:
            searched = ("alpha", "rate", "map_p")
        required = [name for name in searched if name != axis_field and name not in fixed]
        if required:
            raise serializers.ValidationError({"fixed": {name: ["This field is required."] for name in required}})

        for value in data["sweep"]["values"]:
            try:
                config = template_for(fixed, axis, value)
            except ConfigurationError as exc:
                if exc.field == axis_field:
                    raise serializers.ValidationError({"sweep": {"values": [str(exc)]}})
                raise serializers.ValidationError({"fixed": {exc.field or "non_field_errors": [str(exc)]}})
            if config.expected_nodes < MIN_EXPECTED_NODES:
                raise serializers.ValidationError({"fixed": {"window_radius": [
                    f"holds only {config.expected_nodes:.3g} nodes on average; at least {MIN_EXPECTED_NODES} are required."
                ]}})
        return data


class RunSpecSerializer(StrictSerializer):
    name = serializers.CharField(required=False, max_length=255)
    seed = serializers.IntegerField(required=False, min_value=0, max_value=MAX_SEED)
    workers = serializers.IntegerField(required=False, min_value=1)
    experiments = ExperimentSerializer(many=True, allow_empty=False)

    def validate_experiments(self, experiments: List[Dict[str, Any]]) -> List[Dict[str, Any]]:
        names = [experiment["name"] for experiment in experiments]
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise serializers.ValidationError(f"Experiment names must be unique; repeated: {', '.join(duplicates)}.")
        return experiments


def template_for(fixed: Dict[str, Any], axis: str, value: float, seed: int = 0) -> NetworkConfig:
    """Operating point of one sweep value.

    ``rate`` and ``map_p`` missing in optimize mode get placeholders; the
    optimizer overwrites them.
    """
    values: Dict[str, Any] = {"intensity": 1.0, "rate": 1.0, "map_p": 0.1, "seed": seed}
    values.update({key: item for key, item in fixed.items() if item is not None or key == "window_radius"})
    values[AXIS_FIELDS[axis]] = int(value) if axis == "M" else value
    return NetworkConfig(**values)


@dataclass(frozen=True)
class ExperimentSpec:
    """One validated experiment of a spec file."""
    name: str
    mode: str
    axis: str
    values: List[float]
    fixed: Dict[str, Any]
    schemes: List[Scheme]
    objectives: List[Objective]
    trials: Optional[int] = None
    seed: Optional[int] = None
    workers: Optional[int] = None
    search: Optional[SearchBounds] = None
    integration: Dict[str, Any] = field(default_factory=dict)

    @property
    def axis_field(self) -> str:
        return AXIS_FIELDS[self.axis]

    def template(self, value: float, seed: int = 0, **defaults: Any) -> NetworkConfig:
        """NetworkConfig at a sweep value; ``defaults`` fill fields the spec file leaves out."""
        fixed = {key: item for key, item in defaults.items() if key not in self.fixed and item is not None}
        fixed.update(self.fixed)
        return template_for(fixed, self.axis, value, seed)


@dataclass(frozen=True)
class RunSpec:
    name: str
    source: str
    experiments: List[ExperimentSpec]
    seed: Optional[int] = None
    workers: Optional[int] = None


def _line_map(node: yaml.Node, path: Path_, lines: Dict[Path_, int]) -> None:
    """Record the 1-based line of every key and list item."""
    lines.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = path + (str(key_node.value),)
            lines[child] = key_node.start_mark.line + 1
            _line_map(value_node, child, lines)
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            _line_map(item, path + (index,), lines)


def _flatten(errors: Any, path: Path_) -> Iterator[Tuple[Path_, str]]:
    if isinstance(errors, dict):
        for key, value in errors.items():
            child = path if key == "non_field_errors" else path + (key,)
            yield from _flatten(value, child)
    elif isinstance(errors, list):
        if all(isinstance(item, str) for item in errors):
            for item in errors:
                yield path, str(item)
        else:
            for index, item in enumerate(errors):
                if item:
                    yield from _flatten(item, path + (index,))
    else:
        yield path, str(errors)


def format_path(path: Path_) -> str:
    text = ""
    for part in path:
        text += f"[{part}]" if isinstance(part, int) else (f".{part}" if text else str(part))
    return text or "<root>"


def _line_of(path: Path_, lines: Dict[Path_, int]) -> Optional[int]:
    for end in range(len(path), -1, -1):
        if path[:end] in lines:
            return lines[path[:end]]
    return None


def parse_spec(text: str, source: str = "<string>") -> RunSpec:
    """Parse and validate spec text.

    Raises:
        SpecValidationError: With one ``(line, field, message)`` per problem.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise SpecValidationError([(line, "<yaml>", str(getattr(exc, "problem", None) or exc))])

    if not isinstance(data, dict):
        raise SpecValidationError([(1, "<root>", "A spec must be a mapping with an 'experiments' list.")])

    lines: Dict[Path_, int] = {}
    _line_map(node, (), lines)

    serializer = RunSpecSerializer(data=data)
    if not serializer.is_valid():
        problems = [(_line_of(path, lines), format_path(path), message) for path, message in _flatten(serializer.errors, ())]
        problems.sort(key=lambda problem: (problem[0] is None, problem[0] or 0))
        raise SpecValidationError(problems)

    validated = serializer.validated_data
    experiments = [
        ExperimentSpec(
            name=item["name"],
            mode=item["mode"],
            axis=item["sweep"]["axis"],
            values=list(item["sweep"]["values"]),
            fixed=dict(item["fixed"]),
            schemes=[Scheme(value) for value in item["schemes"]],
            objectives=[Objective(value) for value in item["objectives"]],
            trials=item.get("trials"),
            seed=item.get("seed"),
            workers=item.get("workers"),
            search=SearchBounds(**item["search"]) if "search" in item else None,
            integration=dict(item.get("integration", {})),
        )
        for item in validated["experiments"]
    ]
    return RunSpec(
        name=validated.get("name") or Path(source).stem,
        source=source,
        experiments=experiments,
        seed=validated.get("seed"),
        workers=validated.get("workers"),
    )


def load_spec(path: Union[str, Path]) -> RunSpec:
    """Read and validate a spec file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecValidationError([(None, "<file>", f"Cannot read {path}: {exc.strerror or exc}")])
    return parse_spec(text, source=str(path))
