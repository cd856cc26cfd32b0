import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from s2lab.models import BenchRecord


def call(name, *args, **options):
    out = StringIO()
    call_command(name, *args, stdout=out, **options)
    return out.getvalue()


class CommandTestCase(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def half_grid(self, rows=15, cols=15, split_col=7):
        prefix = self.tmp / "grid"
        call("gen", "grid", rows=rows, cols=cols, split_col=split_col, out=str(prefix))
        return f"{prefix}.edges", f"{prefix}.labels"


class GenCommandTests(CommandTestCase):
    def test_grid(self):
        prefix = self.tmp / "g"
        output = call("gen", "grid", rows=2, cols=3, split_col=1, out=str(prefix))
        self.assertEqual(Path(f"{prefix}.edges").read_text(), "6 7\n0 1\n0 3\n1 2\n1 4\n2 5\n3 4\n4 5\n")
        self.assertEqual(Path(f"{prefix}.labels").read_text(), "0 +1\n1 -1\n2 -1\n3 +1\n4 -1\n5 -1\n")
        summary = json.loads(output.strip().splitlines()[-1])
        self.assertEqual((summary["cut_size"], summary["m"], summary["k"]), (2, 1, 2))

    def test_spec_file(self):
        spec = self.tmp / "chain.json"
        spec.write_text(json.dumps({"family": "chain", "params": {"r": 1, "k": 3, "p": 2, "m": 1}}))
        prefix = self.tmp / "chain"
        call("gen", spec=str(spec), out=str(prefix))
        self.assertTrue(Path(f"{prefix}.edges").read_text().startswith("6 5\n"))

    def test_lattice(self):
        prefix = self.tmp / "lattice"
        call("gen", "lattice", w=3, d=3, out=str(prefix))
        self.assertTrue(Path(f"{prefix}.edges").read_text().startswith("27 54\n"))

    def test_infeasible_chain(self):
        with self.assertRaises(CommandError) as cm:
            call("gen", "chain", r=1, k=4, p=2, out=str(self.tmp / "bad"))
        self.assertEqual(cm.exception.returncode, 3)


class AnalyzeCommandTests(CommandTestCase):
    def test_half_grid(self):
        graph, labels = self.half_grid()
        data = json.loads(call("analyze", graph=graph, labels=labels, out=str(self.tmp / "summary.json")))
        self.assertEqual(data["budget_bound"], 102)
        self.assertEqual(data["kappa_star"], 3)
        self.assertEqual(json.loads((self.tmp / "summary.json").read_text())["boundary_size"], 30)

    def test_assumed_kappa(self):
        graph, labels = self.half_grid()
        data = json.loads(call("analyze", graph=graph, labels=labels, kappa=9))
        self.assertEqual(data["budget_bound"], 6 + (8 - 4) + 30 * 5)

    def test_missing_file_is_an_input_error(self):
        with self.assertRaises(CommandError) as cm:
            call("analyze", graph=str(self.tmp / "nope.edges"), labels=str(self.tmp / "nope.labels"))
        self.assertEqual(cm.exception.returncode, 2)

    def test_missing_instance(self):
        with self.assertRaises(CommandError) as cm:
            call("analyze")
        self.assertEqual(cm.exception.returncode, 2)

    def test_malformed_edge_list(self):
        graph = self.tmp / "bad.edges"
        graph.write_text("3 2\n0 1\n")
        labels = self.tmp / "bad.labels"
        labels.write_text("0 +1\n1 -1\n2 -1\n")
        with self.assertRaises(CommandError) as cm:
            call("analyze", graph=str(graph), labels=str(labels))
        self.assertEqual(cm.exception.returncode, 2)

    def test_infeasible_epsilon(self):
        graph, labels = self.half_grid()
        with self.assertRaises(CommandError) as cm:
            call("analyze", graph=graph, labels=labels, epsilon=1.5)
        self.assertEqual(cm.exception.returncode, 3)


class RunCommandTests(CommandTestCase):
    def test_writes_log(self):
        graph, labels = self.half_grid()
        prefix = self.tmp / "run"
        data = json.loads(call("run", graph=graph, labels=labels, budget="auto", seed=4, out=str(prefix)))
        self.assertEqual(data["queries_used"], 102)
        lines = Path(f"{prefix}.log").read_text().splitlines()
        self.assertEqual(len(lines), 102)
        step, phase, vertex, label = lines[0].split()
        self.assertEqual((step, phase), ("0", "random"))
        self.assertIn(label, ("+1", "-1"))

    def test_prints_log_without_out(self):
        graph, labels = self.half_grid(rows=2, cols=2, split_col=1)
        output = call("run", graph=graph, labels=labels, algorithm="random")
        self.assertEqual(len([line for line in output.splitlines() if line[:1].isdigit()]), 4)

    def test_budget_above_n(self):
        graph, labels = self.half_grid(rows=2, cols=2, split_col=1)
        with self.assertRaises(CommandError) as cm:
            call("run", graph=graph, labels=labels, budget="5")
        self.assertEqual(cm.exception.returncode, 2)

    def test_half_noise(self):
        graph, labels = self.half_grid(rows=2, cols=2, split_col=1)
        with self.assertRaises(CommandError) as cm:
            call("run", graph=graph, labels=labels, gamma=0.5)
        self.assertEqual(cm.exception.returncode, 3)


class BenchCommandTests(CommandTestCase):
    def test_csv_is_reproducible(self):
        graph, labels = self.half_grid()
        for name in ("a", "b"):
            call("bench", graph=graph, labels=labels, trials=3, budget="60", no_timing=True, out=str(self.tmp / name))
        self.assertEqual((self.tmp / "a.csv").read_bytes(), (self.tmp / "b.csv").read_bytes())
        report = json.loads((self.tmp / "a.json").read_text())
        self.assertEqual(report["trials"], 3)

    def test_record(self):
        graph, labels = self.half_grid()
        output = call("bench", graph=graph, labels=labels, trials=2, algorithm="random", record=True)
        self.assertIn("Stored bench record", output)
        record = BenchRecord.objects.get()
        self.assertEqual((record.algorithm, record.trials, record.budget), ("random", 2, 225))
        self.assertEqual(record.recovery_rate, 1.0)


class CountCommandTests(CommandTestCase):
    def test_grid_cuts(self):
        data = json.loads(call("count", "grid-cuts", r=2))
        self.assertEqual((data["count"], data["lower_bound"]), (4, 4))

    def test_chain_family(self):
        data = json.loads(call("count", "chain-family", r=1, k=3, p=2, m=1))
        self.assertEqual(data["exact"], 4)
        self.assertTrue(data["verified"])

    def test_chain_family_needs_parameters(self):
        with self.assertRaises(CommandError) as cm:
            call("count", "chain-family", r=1)
        self.assertEqual(cm.exception.returncode, 2)


class IngestCommandTests(CommandTestCase):
    def test_knn_with_classes(self):
        features = self.tmp / "points.csv"
        features.write_text("x,y,class\n0,0,0\n0,1,0\n5,5,1\n5,6,1\n")
        prefix = self.tmp / "points"
        call("ingest", str(features), k=1, class_column=True, positive_class=1, out=str(prefix))
        self.assertEqual(Path(f"{prefix}.edges").read_text(), "4 2\n0 1\n2 3\n")
        self.assertEqual(Path(f"{prefix}.labels").read_text(), "0 -1\n1 -1\n2 +1\n3 +1\n")

    def test_threshold_largest_component(self):
        features = self.tmp / "points.csv"
        features.write_text("0,0\n0,1\n5,5\n5,6\n5,7\n")
        prefix = self.tmp / "points"
        call("ingest", str(features), mode="threshold", t=1.5, largest=True, out=str(prefix))
        self.assertEqual(Path(f"{prefix}.edges").read_text(), "3 2\n0 1\n1 2\n")

    def test_positive_class_needs_class_column(self):
        features = self.tmp / "points.csv"
        features.write_text("0,0\n")
        with self.assertRaises(CommandError) as cm:
            call("ingest", str(features), positive_class=1, out=str(self.tmp / "x"))
        self.assertEqual(cm.exception.returncode, 2)


class NonparamCommandTests(CommandTestCase):
    def test_budget_formula(self):
        data = json.loads(call("nonparam", w=15))
        self.assertEqual(data, {"w": 15, "d": 2, "samples": 12976})

    def test_small_sweep(self):
        out = self.tmp / "risk.csv"
        data = json.loads(call("nonparam", budgets=[2000, 6000], out=str(out)))
        self.assertEqual([p["budget"] for p in data["points"]], [2000, 6000])
        self.assertEqual(out.read_text().splitlines()[0], "budget,w,repetitions,queries,excess_risk")

    def test_half_noise_formula(self):
        with self.assertRaises(CommandError) as cm:
            call("nonparam", w=15, flip=0.5)
        self.assertEqual(cm.exception.returncode, 3)
