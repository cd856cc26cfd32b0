import json

from django.test import Client, TestCase
from django.urls import reverse

from s2lab.experiments import ExperimentConfig, InstanceSpec, bench
from s2lab.models import BenchRecord

SQUARE = {"n": 4, "edges": [[0, 1], [1, 2], [2, 3], [3, 0]], "labels": [1, 1, -1, -1]}


class ApiTests(TestCase):
    def setUp(self):
        self.client = Client()

    def post(self, name, data):
        body = data if isinstance(data, str) else json.dumps(data)
        return self.client.post(reverse(name), body, content_type="application/json")

    def test_health(self):
        response = self.client.get(reverse("health_check"))
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()["status"], "healthy")

    def test_analyze(self):
        response = self.post("s2lab:analyze", SQUARE)
        self.assertEqual(response.status_code, 200)
        data = response.json()
        self.assertEqual((data["cut_size"], data["boundary_size"], data["m"], data["k"]), (2, 4, 1, 2))
        self.assertEqual(data["kappa_star"], 3)

    def test_invalid_json(self):
        response = self.post("s2lab:analyze", "{nope")
        self.assertEqual(response.status_code, 400)
        self.assertIn("error", response.json())

    def test_label_count_mismatch(self):
        response = self.post("s2lab:analyze", {**SQUARE, "labels": [1, -1]})
        self.assertEqual(response.status_code, 400)

    def test_get_not_allowed(self):
        self.assertEqual(self.client.get(reverse("s2lab:analyze")).status_code, 405)

    def test_run(self):
        response = self.post("s2lab:run", {**SQUARE, "seed": 2})
        self.assertEqual(response.status_code, 200)
        data = response.json()
        self.assertEqual(data["summary"]["queries_used"], 4)
        self.assertTrue(data["summary"]["cut_recovered"])
        self.assertEqual(data["found_cuts"], [[0, 3], [1, 2]])
        self.assertEqual(data["predicted"], [1, 1, -1, -1])
        self.assertEqual(sorted(entry[2] for entry in data["log"]), [0, 1, 2, 3])

    def test_run_rejects_half_noise(self):
        response = self.post("s2lab:run", {**SQUARE, "gamma": 0.5})
        self.assertEqual(response.status_code, 422)

    def test_run_rejects_large_budget(self):
        response = self.post("s2lab:run", {**SQUARE, "budget": 9})
        self.assertEqual(response.status_code, 400)

    def test_run_rejects_unknown_algorithm(self):
        response = self.post("s2lab:run", {**SQUARE, "algorithm": "greedy"})
        self.assertEqual(response.status_code, 400)

    def test_bench_records(self):
        report = bench(ExperimentConfig(InstanceSpec("grid", {"rows": 3, "cols": 3}), trials=2))
        BenchRecord.from_report(report).save()
        response = self.client.get(reverse("s2lab:bench_records"), {"limit": 5})
        self.assertEqual(response.status_code, 200)
        records = response.json()["records"]
        self.assertEqual(len(records), 1)
        self.assertEqual(records[0]["trials"], 2)
        self.assertEqual(records[0]["budget"], 9)
        self.assertEqual(self.client.get(reverse("s2lab:bench_records"), {"limit": "x"}).status_code, 400)
