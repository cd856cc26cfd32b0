import itertools
import math

import networkx as nx
import numpy as np
from django.test import SimpleTestCase, tag

from s2lab.complexity import cut_structure
from s2lab.engine import (
    BoundaryKnownRule,
    BudgetRule,
    HoldoutRule,
    Phase,
    bisect_run,
    label_completion,
    mssp,
    path_midpoint,
    random_run,
    run,
    s2_run,
    shortest_opposite_path,
)
from s2lab.exceptions import InputError
from s2lab.generators import grid_graph, half_split_labeling
from s2lab.graph_core import Graph, Labeling, Path, cut_edges, remove_edges, shortest_path
from s2lab.oracle import NoisyOracle, Oracle


def path_graph(length):
    return Graph.from_edges(length + 1, [(v, v + 1) for v in range(length)])


def random_instance(n, p, seed):
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    labels = rng.choice([1, -1], size=n).tolist()
    return Graph.from_edges(n, pairs), Labeling.from_sequence(labels)


def half_grid():
    return grid_graph(15, 15), half_split_labeling(15, 15, 7)


class ThresholdOracle:
    """Noiseless labels on a path: +1 up to `last_plus`, -1 after it."""

    def __init__(self, n, last_plus):
        self.n = n
        self.last_plus = last_plus
        self.query_count = 0

    def query(self, v):
        self.query_count += 1
        return 1 if v <= self.last_plus else -1

    def majority_query(self, v, r):
        self.query_count += r - 1
        return self.query(v)


def closest_opposite_path_by_brute_force(g, observed):
    """Reference: scan all oppositely labeled pairs with networkx distances."""
    lengths = dict(nx.all_pairs_shortest_path_length(g_nx(g)))
    pairs = [
        (lengths[u][v], u, v)
        for u, v in itertools.combinations(sorted(observed), 2)
        if observed[u] != observed[v] and v in lengths[u]
    ]
    if not pairs:
        return None
    _, u, v = min(pairs)
    return shortest_path(g, u, v)


def g_nx(g):
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges)
    return graph


class MsspTests(SimpleTestCase):
    def test_even_length_path(self):
        self.assertEqual(mssp(path_graph(4), {0: 1, 4: -1}), 2)

    def test_odd_length_path_takes_lower_id(self):
        self.assertEqual(mssp(path_graph(3), {0: 1, 3: -1}), 1)

    def test_no_opposite_pair(self):
        self.assertIsNone(mssp(path_graph(3), {0: 1, 3: 1}))
        self.assertIsNone(mssp(path_graph(3), {}))

    def test_disconnected_pair(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        self.assertIsNone(mssp(g, {0: 1, 3: -1}))

    def test_prefers_closest_pair(self):
        # 0 .. 8 path; the -1 at 3 is closer to the +1 at 0 than the -1 at 8
        self.assertIn(mssp(path_graph(8), {0: 1, 3: -1, 8: -1}), (1, 2))

    def test_never_returns_observed_vertex(self):
        g, f = random_instance(12, 0.3, seed=2)
        observed = {0: f[0], 5: f[5], 9: f[9]}
        g = remove_edges(g, cut_edges(g, observed))
        v = mssp(g, observed)
        self.assertTrue(v is None or v not in observed)

    def test_path_midpoint(self):
        self.assertEqual(path_midpoint(Path((7, 3, 9))), 3)
        self.assertEqual(path_midpoint(Path((7, 3, 9, 1))), 3)
        self.assertEqual(path_midpoint(Path((7, 5, 2, 1))), 2)

    def test_closest_pair_matches_all_pairs_scan(self):
        rng = np.random.default_rng(11)
        checked = 0
        for seed in range(60):
            g, f = random_instance(13, 0.22, seed)
            picked = rng.choice(g.n, size=int(rng.integers(2, 8)), replace=False).tolist()
            observed = {v: f[v] for v in picked}
            g = remove_edges(g, cut_edges(g, observed))
            expected = closest_opposite_path_by_brute_force(g, observed)
            self.assertEqual(shortest_opposite_path(g, observed), expected, f"seed {seed}")
            checked += expected is not None
        self.assertGreater(checked, 10)

    def test_path_ties_follow_ascending_neighbor_order(self):
        g = grid_graph(5, 5)
        observed = {0: 1, 12: 1, 24: -1}
        self.assertEqual(shortest_opposite_path(g, observed).vertices, (12, 13, 14, 19, 24))
        observed = {12: 1, 20: -1, 24: -1}
        self.assertEqual(shortest_opposite_path(g, observed).vertices, (12, 11, 10, 15, 20))


class LabelCompletionTests(SimpleTestCase):
    def test_each_component_takes_its_label(self):
        g = Graph.from_edges(4, [(0, 1), (2, 3)])
        self.assertEqual(label_completion(g, {0: 1, 3: -1}).as_array().tolist(), [1, 1, -1, -1])

    def test_no_observations(self):
        self.assertEqual(label_completion(path_graph(3), {}), Labeling.constant(4))

    def test_majority(self):
        self.assertEqual(label_completion(path_graph(3), {0: 1, 1: 1, 2: -1}), Labeling.constant(4))

    def test_unobserved_component_takes_global_majority(self):
        g = Graph.from_edges(6, [(0, 1), (2, 3)])
        predicted = label_completion(g, {0: -1, 2: -1, 3: 1, 5: -1})
        self.assertEqual(predicted.as_array().tolist(), [-1, -1, 1, 1, -1, -1])


class RunTests(SimpleTestCase):
    def test_single_edge(self):
        g = Graph.from_edges(2, [(0, 1)])
        f = Labeling.from_sequence([1, -1])
        result = s2_run(g, NoisyOracle(f), BudgetRule(2), seed=0, truth=f)
        self.assertEqual(sorted(result.queried), [0, 1])
        self.assertEqual(result.found_cuts, frozenset({(0, 1)}))
        self.assertEqual(result.predicted, f)
        self.assertTrue(result.cut_recovered)

    def test_constant_labeling_is_random_sampling(self):
        g, _ = half_grid()
        f = Labeling.constant(g.n)
        s2 = s2_run(g, NoisyOracle(f), BudgetRule(40), seed=8)
        self.assertTrue(all(record.phase is Phase.RANDOM for record in s2.log))
        self.assertEqual(s2.found_cuts, frozenset())
        self.assertEqual(s2.predicted, f)
        self.assertEqual(s2.log, random_run(g, NoisyOracle(f), BudgetRule(40), seed=8).log)
        self.assertEqual(s2.log, bisect_run(g, NoisyOracle(f), BudgetRule(40), seed=8).log)

    def test_random_run_with_full_budget_queries_everything_once(self):
        g, f = half_grid()
        result = random_run(g, NoisyOracle(f), BudgetRule(g.n), seed=3, truth=f)
        self.assertEqual(sorted(result.queried), list(range(g.n)))
        self.assertTrue(result.cut_recovered)
        self.assertEqual(result.predicted, f)

    def test_same_seed_same_log(self):
        g, f = half_grid()
        for strategy in (s2_run, random_run, bisect_run):
            a = strategy(g, NoisyOracle(f), BudgetRule(60), seed=5)
            b = strategy(g, NoisyOracle(f), BudgetRule(60), seed=5)
            self.assertEqual(a.log, b.log)

    def test_bisect_matches_s2_on_a_path(self):
        g = path_graph(40)
        f = Labeling.from_sequence([1] * 13 + [-1] * 28)
        for seed in range(10):
            s2 = s2_run(g, NoisyOracle(f), BudgetRule(g.n), seed=seed)
            bisect = bisect_run(g, NoisyOracle(f), BudgetRule(g.n), seed=seed)
            self.assertEqual(s2.log, bisect.log)

    def test_bisect_recovers_the_cut(self):
        g, f = half_grid()
        result = bisect_run(g, NoisyOracle(f), BoundaryKnownRule(30), seed=1, truth=f)
        self.assertTrue(result.cut_recovered)
        self.assertEqual(len(set(result.queried)), result.queries_used)

    def test_boundary_known_rule_recovers_half_grid(self):
        g, f = half_grid()
        result = s2_run(g, NoisyOracle(f), BoundaryKnownRule(30), seed=0, truth=f)
        self.assertTrue(result.cut_recovered)
        self.assertEqual(result.found_cuts, cut_edges(g, f))
        self.assertLess(result.queries_used, g.n)
        self.assertEqual(result.predicted, f)

    def test_holdout_rule_stops_before_exhausting_the_graph(self):
        g, f = half_grid()
        result = s2_run(g, NoisyOracle(f), HoldoutRule(threshold=0.0, seed=4), seed=0, truth=f)
        self.assertLess(result.queries_used, g.n)

    def test_raw_queries_count_repetitions(self):
        g, f = half_grid()
        result = s2_run(g, NoisyOracle(f, 0.1, seed=2), BudgetRule(20), seed=0, repetitions=5)
        self.assertEqual(result.queries_used, 20)
        self.assertEqual(result.raw_queries, 100)

    def test_warm_start_goes_first(self):
        g, f = half_grid()
        result = s2_run(g, NoisyOracle(f), BudgetRule(10), seed=0, warm_start=[0, 14])
        self.assertEqual(result.queried[:2], [0, 14])
        self.assertEqual(result.log[1].phase, Phase.RANDOM)
        self.assertEqual(result.log[2].phase, Phase.AGGRESSIVE)

    def test_rejects_bad_runs(self):
        f = Labeling.from_sequence([1, -1])
        with self.assertRaises(InputError):
            s2_run(Graph.from_edges(0, []), NoisyOracle(Labeling(0, {})), BudgetRule(1))
        with self.assertRaises(InputError):
            s2_run(Graph.from_edges(2, [(0, 1)]), NoisyOracle(f), BudgetRule(3))
        with self.assertRaises(InputError):
            s2_run(Graph.from_edges(2, [(0, 1)]), NoisyOracle(f), BudgetRule(0))
        with self.assertRaises(InputError):
            s2_run(Graph.from_edges(2, [(0, 1)]), NoisyOracle(f), BudgetRule(2), repetitions=0)

    def test_summary(self):
        g, f = half_grid()
        summary = s2_run(g, NoisyOracle(f), BudgetRule(30), seed=0, truth=f).summary()
        self.assertEqual(summary["algorithm"], "s2")
        self.assertEqual(summary["queries_used"], 30)
        self.assertEqual(summary["budget"], 30)


class RunInvariantTests(SimpleTestCase):
    def replay(self, g, log):
        """Yield (record, observed-before, working-before) for every step of a log."""
        observed = {}
        working = g
        for record in log:
            yield record, dict(observed), working
            exposed = [(record.vertex, u) for u in g.adjacency[record.vertex] if u in observed and observed[u] != record.label]
            observed[record.vertex] = record.label
            if exposed:
                working = remove_edges(working, exposed)

    def test_noiseless_runs(self):
        for seed in range(25):
            g, f = random_instance(14, 0.25, seed)
            truth_cuts = cut_edges(g, f)
            budget = 1 + seed % g.n
            result = s2_run(g, NoisyOracle(f), BudgetRule(budget), seed=seed, truth=f)
            self.assertLessEqual(result.found_cuts, truth_cuts)
            self.assertEqual(len(set(result.queried)), result.queries_used)
            self.assertEqual(result.queries_used, budget)
            for record, observed, working in self.replay(g, result.log):
                if record.phase is Phase.AGGRESSIVE:
                    self.assertEqual(record.vertex, mssp(working, observed))

    def test_full_budget_recovers_every_cut(self):
        for seed in range(10):
            g, f = random_instance(12, 0.3, seed + 100)
            for strategy in (s2_run, random_run, bisect_run):
                result = strategy(g, NoisyOracle(f), BudgetRule(g.n), seed=seed, truth=f)
                self.assertEqual(result.found_cuts, cut_edges(g, f))
                self.assertEqual(result.predicted, f)

    def test_bisection_bound_on_short_paths(self):
        self.assertIsInstance(ThresholdOracle(3, 0), Oracle)
        self.check_bisection_bound(range(2, 129))

    @tag("slow")
    def test_bisection_bound_on_long_paths(self):
        self.check_bisection_bound(range(129, 513))

    def check_bisection_bound(self, lengths):
        """Every cut position of every path length, both ends observed first."""
        for length in lengths:
            g = path_graph(length)
            bound = math.ceil(math.log2(length)) + 1
            for cut in range(length):
                result = run("s2", g, ThresholdOracle(g.n, cut), BoundaryKnownRule(2), warm_start=[0, length])
                self.assertEqual(result.found_cuts, frozenset({(cut, cut + 1)}))
                self.assertLessEqual(result.aggressive_queries, bound, f"length {length}, cut after {cut}")


@tag("slow")
class RecoveryTests(SimpleTestCase):
    def test_budget_bound_recovers_half_grid(self):
        g, f = half_grid()
        recovered = sum(
            s2_run(g, NoisyOracle(f), BudgetRule(102), seed=seed, truth=f).cut_recovered
            for seed in range(200)
        )
        self.assertGreaterEqual(recovered / 200, 0.95)

    def test_s2_reaches_the_boundary_before_random_sampling(self):
        g, f = half_grid()
        boundary = cut_structure(g, f).boundary

        def dc(result):
            seen = set()
            for step, v in enumerate(result.queried, start=1):
                seen.add(v)
                if boundary <= seen:
                    return step
            return result.queries_used

        s2 = [dc(s2_run(g, NoisyOracle(f), BudgetRule(g.n), seed=seed)) for seed in range(50)]
        rand = [dc(random_run(g, NoisyOracle(f), BudgetRule(g.n), seed=seed)) for seed in range(50)]
        self.assertGreater(np.mean(rand), np.mean(s2))

    def test_bisection_needs_at_least_as_many_queries_as_s2(self):
        g, f = half_grid()
        at_least = 0
        for seed in range(50):
            s2 = s2_run(g, NoisyOracle(f), BoundaryKnownRule(30), seed=seed, truth=f)
            bisect = bisect_run(g, NoisyOracle(f), BoundaryKnownRule(30), seed=seed, truth=f)
            self.assertTrue(s2.cut_recovered and bisect.cut_recovered)
            at_least += bisect.queries_used >= s2.queries_used
        self.assertGreaterEqual(at_least, 40)
