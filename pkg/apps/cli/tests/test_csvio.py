import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from apps.cli.csvio import COLUMNS, CsvSink, ObservationRow, config_parameters, format_value, read_rows
from apps.cli.runner import RunSummary, derive_seed, is_unimodal
from apps.netmodel.network import NetworkConfig, Scheme


def make_row(value, metric="prd", scheme="IRC"):
    config = NetworkConfig(intensity=1.0, map_p=value, alpha=3.0, rate=3.0, diversity=2, scheme=Scheme(scheme))
    return ObservationRow(
        experiment="prd-vs-p", scheme=scheme, objective="simulated", sweep_axis="p", sweep_value=value,
        metric=metric, mean=0.125, std_error=0.001, n=100, seed=9, parameters=config_parameters(config),
    )


class CsvSinkTests(SimpleTestCase):
    def test_header_and_column_order(self):
        self.assertEqual(COLUMNS[:8], ["sweep_value", "scheme", "objective", "metric", "mean", "std_error", "n", "seed"])

    def test_one_file_per_scheme_and_rows_are_flushed(self):
        with tempfile.TemporaryDirectory() as tmp:
            with CsvSink(Path(tmp) / "out") as sink:
                sink.write(make_row(0.1))
                sink.write(make_row(0.2))
                sink.write(make_row(0.1, scheme="NC"))
                irc = Path(tmp) / "out" / "prd-vs-p__IRC__simulated.csv"
                rows = read_rows(irc)
                self.assertEqual([row["sweep_value"] for row in rows], ["0.1", "0.2"])
            self.assertEqual([path.name for path in sink.paths],
                             ["prd-vs-p__IRC__simulated.csv", "prd-vs-p__NC__simulated.csv"])

    def test_rows_carry_the_full_parameter_tuple(self):
        with tempfile.TemporaryDirectory() as tmp:
            with CsvSink(Path(tmp)) as sink:
                sink.write(make_row(0.3))
            row = read_rows(sink.paths[0], metric="prd")[0]
        self.assertEqual(row["map_p"], "0.3")
        self.assertEqual(row["alpha"], "3.0")
        self.assertEqual(row["diversity"], "2")
        self.assertEqual(row["window_radius"], "20.0")
        self.assertEqual(row["selection"], "argmax")
        self.assertEqual(row["contention_d_max"], "")

    def test_format_value(self):
        self.assertEqual(format_value(0.1), "0.1")
        self.assertEqual(format_value(None), "")
        self.assertEqual(format_value(3), "3")
        self.assertEqual(format_value(Scheme.RC), "RC")
        self.assertEqual(format_value(1 / 3), repr(1 / 3))


class RunnerHelperTests(SimpleTestCase):
    def test_derived_seeds_are_stable_and_distinct(self):
        self.assertEqual(derive_seed(7, 0), derive_seed(7, 0))
        self.assertNotEqual(derive_seed(7, 0), derive_seed(7, 1))
        self.assertNotEqual(derive_seed(7, 0), derive_seed(8, 0))
        self.assertLess(derive_seed(7, 0), 2 ** 63)

    def test_unimodality(self):
        self.assertTrue(is_unimodal([0.1, 0.3, 0.5, 0.4, 0.2], [0.0] * 5))
        self.assertFalse(is_unimodal([0.1, 0.5, 0.2, 0.5, 0.1], [0.0] * 5))
        self.assertTrue(is_unimodal([0.1, 0.5, 0.49, 0.5, 0.1], [0.01] * 5))

    def test_summary_table(self):
        summary = RunSummary(name="fig4", seed=1, out_dir="results/fig4", gains=[
            {"experiment": "max-prd", "objective": "analytic", "sweep_value": 3.0, "scheme": "IRC", "gain": 0.265},
        ], warnings=["separated peaks"])
        lines = summary.table()
        self.assertIn("IRC/NC", lines[0])
        self.assertIn("+26.5%", lines[1])
        self.assertEqual(lines[-1], "warning: separated peaks")
