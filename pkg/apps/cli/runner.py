"""Runs validated experiment specs: sweeps, CSV output, persistence and audit events."""
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from django.db import DatabaseError
from django.utils import timezone

from apps.analytic.params import AnalyticParams, IntegrationSettings
from apps.analytic.recursion import analytic_prd, expected_progress_approx
from apps.auditing.signals import event_logged
from apps.experiments.estimation import MIN_TRIALS, estimate_progress, progress_rate_density
from apps.experiments.models import ExperimentRun, Observation, SimulationDefaults
from apps.experiments.optimization import Objective, OptimizationResult, SearchBounds, joint_search, optimize_prd
from apps.netmodel.network import DEFAULT_WINDOW_SCALE, NetworkConfig, Scheme, Selection

from .csvio import CsvSink, ObservationRow, config_parameters
from .specs import ExperimentSpec, Mode, RunSpec

logger = logging.getLogger(__name__)

SCHEME_ORDER = (Scheme.NC, Scheme.RC, Scheme.IRC)


@dataclass(frozen=True)
class RunDefaults:
    """Values used where a spec is silent; mirrors :class:`SimulationDefaults`."""
    trials: int = 10_000
    retry_cap: int = 10
    window_scale: float = DEFAULT_WINDOW_SCALE
    contention_bits: int = 10
    integration_samples: int = 10_000
    tail_tolerance: float = 1e-3

    @classmethod
    def load(cls) -> "RunDefaults":
        """Read the admin-editable defaults, or fall back to the code constants."""
        try:
            stored = SimulationDefaults.get_solo()
        except DatabaseError as e:
            logger.warning(f"Simulation defaults unavailable ({e}); using built-in values.")
            return cls()
        return cls(
            trials=stored.trials,
            retry_cap=stored.retry_cap,
            window_scale=stored.window_scale,
            contention_bits=stored.contention_bits,
            integration_samples=stored.integration_samples,
            tail_tolerance=stored.tail_tolerance,
        )


def derive_seed(master: int, index: int) -> int:
    """Independent 63-bit seed of experiment ``index`` under ``master``."""
    state = np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))


def is_unimodal(means: List[float], errors: List[float]) -> bool:
    """True when the sequence rises to a single peak and then falls, up to two standard errors."""
    if len(means) < 3:
        return True
    peak = int(np.argmax(means))

    def drops(a: int, b: int) -> bool:
        return means[b] < means[a] - 2 * math.hypot(errors[a], errors[b])

    rising = all(not drops(i, i + 1) for i in range(peak))
    falling = all(not drops(i + 1, i) for i in range(peak, len(means) - 1))
    return rising and falling


@dataclass
class RunSummary:
    """What a finished run reports back to the command."""
    name: str
    seed: int
    out_dir: str
    paths: List[str] = field(default_factory=list)
    gains: List[Dict[str, Any]] = field(default_factory=list)
    shapes: List[Dict[str, Any]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    run_id: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def table(self) -> List[str]:
        """Headline gains over NC, one line per experiment, objective and sweep value."""
        lines = []
        grouped: Dict[Tuple[str, str, float], Dict[str, float]] = {}
        for gain in self.gains:
            key = (gain["experiment"], gain["objective"], gain["sweep_value"])
            grouped.setdefault(key, {})[gain["scheme"]] = gain["gain"]
        if grouped:
            lines.append(f"{'experiment':<24} {'objective':<10} {'sweep':>12}  {'RC/NC':>8}  {'IRC/NC':>8}")
        for (experiment, objective, value), schemes in grouped.items():
            cells = [f"{schemes[s] * 100:+7.1f}%" if s in schemes else f"{'-':>8}" for s in ("RC", "IRC")]
            lines.append(f"{experiment:<24} {objective:<10} {value:>12g}  {cells[0]}  {cells[1]}")
        for shape in self.shapes:
            lines.append(f"{shape['experiment']}: {shape['check']} {shape['label']} -> {shape['result']}")
        lines.extend(f"warning: {item}" for item in self.warnings)
        return lines


class ExperimentRunner:
    """
    Executes every experiment of a spec and streams its rows to CSV.

    The run is recorded as an :class:`ExperimentRun` with one
    :class:`Observation` per row when the database is reachable; recording
    failures are logged and never stop the simulation.

    Args:
        spec: The validated spec.
        out_dir: Directory receiving the CSV files.
        seed: Master seed overriding every seed of the spec file.
        workers: Worker processes overriding the spec file's.
        trials_scale: Multiplier applied to every trial count.
        record: Persist the run and its observations.
        defaults: Values used where the spec file is silent; loaded from the
            database when omitted.
    """

    def __init__(self, spec: RunSpec, out_dir: Path, seed: Optional[int] = None, workers: Optional[int] = None,
                 trials_scale: float = 1.0, record: bool = True, defaults: Optional[RunDefaults] = None) -> None:
        self.spec = spec
        self.out_dir = Path(out_dir)
        self.seed_override = seed
        self.master_seed = seed if seed is not None else (spec.seed or 0)
        self.workers = workers
        self.trials_scale = trials_scale
        self.record = record
        self.defaults = defaults or RunDefaults.load()
        self.run: Optional[ExperimentRun] = None
        self._recording_rows = True
        self.summary = RunSummary(name=spec.name, seed=self.master_seed, out_dir=str(self.out_dir))
        self._results: Dict[Tuple[str, str, float, str, str], Tuple[float, float]] = {}
        self._optima: Dict[Tuple[str, Objective, NetworkConfig], OptimizationResult] = {}

    # Persistence

    def _start_record(self) -> None:
        if not self.record:
            return
        try:
            self.run = ExperimentRun.objects.create(
                name=self.spec.name,
                source=self.spec.source,
                seed=self.master_seed,
                workers=self.workers or self.spec.workers or 1,
                trials_scale=self.trials_scale,
                output_dir=str(self.out_dir),
            )
            self.summary.run_id = self.run.pk
        except DatabaseError as e:
            logger.warning(f"Run '{self.spec.name}' is not recorded: {e}")
            self.run = None

    def _record_row(self, row: ObservationRow) -> None:
        if self.run is None or not self._recording_rows:
            return
        try:
            Observation.objects.create(run=self.run, **asdict(row))
        except DatabaseError as e:
            logger.warning(f"Recording observations of run {self.run.pk} stopped: {e}")
            self._recording_rows = False

    def _finish_record(self, status: str, event: str, error: str = "") -> None:
        details = {"name": self.spec.name, "status": status, "files": len(self.summary.paths)}
        if error:
            details["error"] = error
        if self.run is not None:
            try:
                self.run.status = status
                self.run.summary = self.summary.to_dict()
                self.run.error = error
                self.run.finished_at = timezone.now()
                self.run.save(update_fields=["status", "summary", "error", "finished_at"])
            except DatabaseError as e:
                logger.warning(f"Could not close run {self.run.pk}: {e}")
        if self.record:
            event_logged.send(sender=self.__class__, event_identifier=event, run=self.run,
                              details=details, instance=self.run)

    # Resolution of per-experiment settings

    def experiment_seed(self, index: int, experiment: ExperimentSpec) -> int:
        if experiment.seed is not None and self.seed_override is None:
            return experiment.seed
        return derive_seed(self.master_seed, index)

    def experiment_workers(self, experiment: ExperimentSpec) -> int:
        return self.workers or experiment.workers or self.spec.workers or 1

    def experiment_trials(self, experiment: ExperimentSpec) -> int:
        trials = experiment.trials or self.defaults.trials
        return max(MIN_TRIALS, int(round(trials * self.trials_scale)))

    def integration_for(self, experiment: ExperimentSpec) -> IntegrationSettings:
        values = {"samples": self.defaults.integration_samples, "tail_tolerance": self.defaults.tail_tolerance}
        values.update(experiment.integration)
        return IntegrationSettings(**values)

    def template_for(self, experiment: ExperimentSpec, value: float, seed: int) -> NetworkConfig:
        intensity = experiment.fixed.get("intensity") or 1.0
        return experiment.template(
            value,
            seed=seed,
            retry_cap=self.defaults.retry_cap,
            contention_bits=self.defaults.contention_bits,
            window_radius=self.defaults.window_scale / math.sqrt(intensity),
        )

    # Running

    def run_all(self) -> RunSummary:
        """Run every experiment in order.

        Raises:
            KeyboardInterrupt: Re-raised after the run is marked interrupted;
                rows written so far stay on disk.
        """
        self._start_record()
        logger.info(f"Run '{self.spec.name}' (seed {self.master_seed}) writing to {self.out_dir}")
        try:
            with CsvSink(self.out_dir) as sink:
                try:
                    for index, experiment in enumerate(self.spec.experiments):
                        self.run_experiment(index, experiment, sink)
                finally:
                    self.summary.paths = [str(path) for path in sink.paths]
        except KeyboardInterrupt:
            logger.warning(f"Run '{self.spec.name}' interrupted; {len(self.summary.paths)} file(s) kept.")
            self._finish_record(ExperimentRun.Status.INTERRUPTED, "RUN_INTERRUPTED", "interrupted")
            raise
        except Exception as e:
            logger.error(f"Run '{self.spec.name}' failed: {e}")
            self._finish_record(ExperimentRun.Status.FAILED, "RUN_FAILED", str(e))
            raise

        self._check_shapes()
        self._finish_record(ExperimentRun.Status.FINISHED, "RUN_FINISHED")
        logger.info(f"Run '{self.spec.name}' finished: {len(self.summary.paths)} file(s)")
        return self.summary

    def run_experiment(self, index: int, experiment: ExperimentSpec, sink: CsvSink) -> None:
        seed = self.experiment_seed(index, experiment)
        schemes = sorted(experiment.schemes, key=SCHEME_ORDER.index)
        logger.info(
            f"Experiment '{experiment.name}' ({experiment.mode}): {experiment.axis} over "
            f"{len(experiment.values)} value(s), schemes {[s.value for s in schemes]}, seed {seed}"
        )
        for value in experiment.values:
            logger.info(f"{experiment.name}: {experiment.axis}={value:g}")
            template = self.template_for(experiment, value, seed)
            for scheme in schemes:
                config = template.for_scheme(scheme)
                if experiment.mode == Mode.OPTIMIZE:
                    rows = self._optimize(experiment, value, config, seed)
                else:
                    rows = self._evaluate(experiment, value, config, seed)
                for row in rows:
                    sink.write(row)
                    self._record_row(row)
        self._collect_gains(experiment)

    def _row(self, experiment: ExperimentSpec, value: float, config: NetworkConfig, objective: Objective,
             metric: str, mean: float, std_error: float, n: int, seed: int) -> ObservationRow:
        if metric in ("prd", "prd_star"):
            self._results[(experiment.name, objective.value, value, config.scheme.value, metric)] = (mean, std_error)
        return ObservationRow(
            experiment=experiment.name,
            scheme=config.scheme.value,
            objective=objective.value,
            sweep_axis=experiment.axis,
            sweep_value=value,
            metric=metric,
            mean=float(mean),
            std_error=float(std_error),
            n=int(n),
            seed=seed,
            parameters=config_parameters(config),
        )

    def _simulate(self, experiment: ExperimentSpec, config: NetworkConfig, seed: int):
        trials = self.experiment_trials(experiment)
        sample = estimate_progress(config, trials, seed=seed, workers=self.experiment_workers(experiment))
        return sample, progress_rate_density(config, sample)

    def _evaluate(self, experiment: ExperimentSpec, value: float, config: NetworkConfig,
                  seed: int) -> Iterable[ObservationRow]:
        for objective in experiment.objectives:
            if objective is Objective.SIMULATED:
                sample, prd = self._simulate(experiment, config, seed)
                n = sample.trials
                for hop, estimate in enumerate(sample, start=1):
                    yield self._row(experiment, value, config, objective, f"d_{hop}",
                                    estimate.mean, estimate.std_error, estimate.n, seed)
                yield self._row(experiment, value, config, objective, "prd", prd.mean, prd.std_error, prd.n, seed)
                if prd.anomaly:
                    self.summary.warnings.append(
                        f"{experiment.name}: negative hop progress for {config.scheme.value} at {experiment.axis}={value:g}"
                    )
                rate = sample.failure_rate
                yield self._row(experiment, value, config, objective, "failure_rate",
                                rate, math.sqrt(rate * (1 - rate) / n), n, seed)
                if config.selection is Selection.CONTENTION:
                    yield self._row(experiment, value, config, objective, "collision_rate",
                                    sample.collision_rate, 0.0, n, seed)
                    yield self._row(experiment, value, config, objective, "mismatch_rate",
                                    sample.mismatch_rate, 0.0, n, seed)
            else:
                params = AnalyticParams.from_network(config, self.integration_for(experiment))
                table = expected_progress_approx(params)
                for hop in range(table.diversity):
                    yield self._row(experiment, value, config, objective, f"d_{hop + 1}",
                                    table.d_tilde[hop], 0.0, 0, seed)
                    yield self._row(experiment, value, config, objective, f"cell_area_{hop + 1}",
                                    table.cell_area[hop], 0.0, 0, seed)
                yield self._row(experiment, value, config, objective, "prd", analytic_prd(params), 0.0, 0, seed)

    def _optimize_one(self, experiment: ExperimentSpec, config: NetworkConfig, objective: Objective,
                      seed: int) -> OptimizationResult:
        key = (experiment.name, objective, config)
        if key in self._optima:
            return self._optima[key]

        bounds = experiment.search
        if objective is Objective.SIMULATED and bounds is None:
            analytic = self._optimize_one(experiment, config, Objective.ANALYTIC, seed)
            bounds = SearchBounds.around(analytic.rate_star, analytic.map_p_star)
            logger.info(
                f"{experiment.name}: simulated search for {config.scheme.value} M={config.diversity} "
                f"limited to R in {bounds.rate}, p in {bounds.map_p}"
            )
        kwargs = dict(
            bounds=bounds,
            trials=self.experiment_trials(experiment),
            seed=seed,
            workers=self.experiment_workers(experiment),
            integration=self.integration_for(experiment),
        )
        if not joint_search(config):
            nc = self._optimize_one(experiment, config.for_scheme(Scheme.NC), objective, seed)
            kwargs["nc_map_p"] = nc.map_p_star
        result = optimize_prd(objective, config, **kwargs)
        self._optima[key] = result
        return result

    def _optimize(self, experiment: ExperimentSpec, value: float, config: NetworkConfig,
                  seed: int) -> Iterable[ObservationRow]:
        for objective in experiment.objectives:
            result = self._optimize_one(experiment, config, objective, seed)
            at_optimum = config.with_changes(rate=result.rate_star, map_p=result.map_p_star)
            n = self.experiment_trials(experiment) if objective is Objective.SIMULATED else 0
            if result.warning:
                self.summary.warnings.append(f"{experiment.name} {config.scheme.value} {experiment.axis}={value:g}: {result.warning}")
            yield self._row(experiment, value, at_optimum, objective, "prd_star", result.prd_star, result.std_error, n, seed)
            yield self._row(experiment, value, at_optimum, objective, "rate_star", result.rate_star, 0.0, 0, seed)
            yield self._row(experiment, value, at_optimum, objective, "map_p_star", result.map_p_star, 0.0, 0, seed)
            if objective is Objective.ANALYTIC and Objective.SIMULATED in experiment.objectives:
                _, prd = self._simulate(experiment, at_optimum, seed)
                yield self._row(experiment, value, at_optimum, objective, "prd_simulated_at_optimum",
                                prd.mean, prd.std_error, prd.n, seed)

    # Summary

    def _collect_gains(self, experiment: ExperimentSpec) -> None:
        metric = "prd_star" if experiment.mode == Mode.OPTIMIZE else "prd"
        for objective in experiment.objectives:
            for value in experiment.values:
                base = self._results.get((experiment.name, objective.value, value, Scheme.NC.value, metric))
                if base is None or base[0] <= 0:
                    continue
                for scheme in (Scheme.RC, Scheme.IRC):
                    found = self._results.get((experiment.name, objective.value, value, scheme.value, metric))
                    if found is None:
                        continue
                    self.summary.gains.append({
                        "experiment": experiment.name,
                        "objective": objective.value,
                        "sweep_axis": experiment.axis,
                        "sweep_value": value,
                        "scheme": scheme.value,
                        "gain": found[0] / base[0] - 1.0,
                    })

    def _check_shapes(self) -> None:
        for experiment in self.spec.experiments:
            if experiment.mode == Mode.EVALUATE and experiment.axis == "p":
                for objective in experiment.objectives:
                    for scheme in experiment.schemes:
                        points = [self._results.get((experiment.name, objective.value, value, scheme.value, "prd"))
                                  for value in experiment.values]
                        if any(point is None for point in points):
                            continue
                        unimodal = is_unimodal([p[0] for p in points], [p[1] for p in points])
                        self.summary.shapes.append({
                            "experiment": experiment.name,
                            "check": "unimodal in p",
                            "label": f"{scheme.value}/{objective.value}",
                            "result": unimodal,
                        })
                        if not unimodal:
                            logger.warning(f"{experiment.name}: PRD of {scheme.value}/{objective.value} is not unimodal in p")
            if experiment.mode == Mode.OPTIMIZE and experiment.axis == "alpha":
                for objective in experiment.objectives:
                    gains = [gain["gain"] for gain in self.summary.gains
                             if gain["experiment"] == experiment.name and gain["objective"] == objective.value
                             and gain["scheme"] == Scheme.IRC.value]
                    if len(gains) > 1:
                        self.summary.shapes.append({
                            "experiment": experiment.name,
                            "check": "IRC gain spread over alpha",
                            "label": objective.value,
                            "result": round(max(gains) - min(gains), 6),
                        })
