import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Dict, List, Optional, Tuple

from apps.netmodel.network import NetworkConfig

logger = logging.getLogger(__name__)

OBSERVATION_COLUMNS = ["sweep_value", "scheme", "objective", "metric", "mean", "std_error", "n", "seed", "sweep_axis"]
PARAMETER_COLUMNS = [
    "intensity", "map_p", "alpha", "rate", "diversity", "window_radius",
    "retry_cap", "selection", "contention_bits", "contention_d_max",
]
COLUMNS = OBSERVATION_COLUMNS + PARAMETER_COLUMNS


def format_value(value: Any) -> str:
    """Render a cell; floats use the shortest repr so output is byte-stable."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(float(value))
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def config_parameters(config: NetworkConfig) -> Dict[str, Any]:
    """The full parameter tuple of an operating point, keyed by column."""
    return {
        "intensity": float(config.intensity),
        "map_p": float(config.map_p),
        "alpha": float(config.alpha),
        "rate": float(config.rate),
        "diversity": int(config.diversity),
        "window_radius": float(config.window_radius),
        "retry_cap": int(config.retry_cap),
        "selection": config.selection.value,
        "contention_bits": int(config.contention_bits),
        "contention_d_max": None if config.contention_d_max is None else float(config.contention_d_max),
    }


@dataclass(frozen=True)
class ObservationRow:
    """One CSV line: a metric of one scheme and objective at one sweep value."""
    experiment: str
    scheme: str
    objective: str
    sweep_axis: str
    sweep_value: float
    metric: str
    mean: float
    std_error: float
    n: int
    seed: int
    parameters: Dict[str, Any] = field(default_factory=dict)

    def as_record(self) -> Dict[str, Any]:
        record = {
            "sweep_value": self.sweep_value,
            "scheme": self.scheme,
            "objective": self.objective,
            "metric": self.metric,
            "mean": float(self.mean),
            "std_error": float(self.std_error),
            "n": int(self.n),
            "seed": int(self.seed),
            "sweep_axis": self.sweep_axis,
        }
        record.update({column: self.parameters.get(column) for column in PARAMETER_COLUMNS})
        return record


def csv_name(experiment: str, scheme: str, objective: str) -> str:
    return f"{experiment}__{scheme}__{objective}.csv"


class CsvSink:
    """
    Writes observation rows into one CSV file per (experiment, scheme, objective).

    Files are opened on their first row and flushed after every row, so an
    interrupted run leaves complete lines behind.
    """

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = Path(out_dir)
        self._files: Dict[Tuple[str, str, str], Tuple[IO[str], Any]] = {}
        self.paths: List[Path] = []

    def __enter__(self) -> "CsvSink":
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, *exc_info: Any) -> None:
        self.close()

    def _writer(self, row: ObservationRow) -> Any:
        key = (row.experiment, row.scheme, row.objective)
        if key not in self._files:
            path = self.out_dir / csv_name(*key)
            handle = path.open("w", newline="", encoding="utf-8")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(COLUMNS)
            self._files[key] = (handle, writer)
            self.paths.append(path)
            logger.debug(f"Writing {path}")
        return self._files[key]

    def write(self, row: ObservationRow) -> None:
        handle, writer = self._writer(row)
        record = row.as_record()
        writer.writerow([format_value(record[column]) for column in COLUMNS])
        handle.flush()

    def close(self) -> None:
        for handle, _ in self._files.values():
            handle.close()
        self._files.clear()


def read_rows(path: Path, metric: Optional[str] = None) -> List[Dict[str, str]]:
    """Read a result file back, optionally keeping one metric."""
    with Path(path).open(newline="", encoding="utf-8") as handle:
        rows = list(csv.DictReader(handle))
    if metric is not None:
        rows = [row for row in rows if row["metric"] == metric]
    return rows
