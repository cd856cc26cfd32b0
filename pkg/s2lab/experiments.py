"""
Experiment harness: benchmark trials over generated or file-based instances,
recovery rates, the nonparametric excess-risk sweep and the enumeration counts
behind the lower bounds.
"""
import itertools
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Any, NamedTuple, Optional, Union

import numpy as np
from joblib import Parallel, delayed

from . import config
from .complexity import ComplexitySummary, cut_structure, summarize
from .engine import Algorithm, BoundaryKnownRule, BudgetRule, HoldoutRule, QueryRecord, run, s2_run
from .exceptions import InfeasibleNoiseError, InfeasibleParameterError, InputError
from .export_utils import export_to_csv, export_to_json
from .generators import (
    ChainFamilySpec,
    GeometricOracle,
    GeometricTruth,
    Lattice,
    chain_family_graph,
    chain_family_size,
    chain_labeling,
    dithered_core,
    enumerate_chain_labelings,
    grid_graph,
    half_split_labeling,
)
from .graph_core import NEGATIVE, POSITIVE, Graph, Labeling
from .oracle import NoisyOracle, repetitions_needed
from .utils import load_graph, load_labels, parse_budget, trial_seeds

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["trial", "seed", "algorithm", "queries_used", "dc_complexity", "recovered", "ms_elapsed"]
FAMILIES = ("grid", "dithered", "lattice", "chain", "files")


class DcQueryComplexity(NamedTuple):
    value: int
    covered: bool


def dc_query_complexity(log, boundary) -> DcQueryComplexity:
    """
    Length of the shortest log prefix whose queried vertices include every boundary
    vertex. When the log never covers the boundary, covered is False and value is
    the log length.
    """
    remaining = set(boundary)
    if not remaining:
        raise InputError("Boundary is empty; the cut set has no boundary vertices")
    length = 0
    for length, entry in enumerate(log, start=1):
        remaining.discard(entry.vertex if isinstance(entry, QueryRecord) else int(entry))
        if not remaining:
            return DcQueryComplexity(length, True)
    return DcQueryComplexity(length, False)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    truth: Labeling
    description: str


@dataclass(frozen=True)
class InstanceSpec:
    """Generator family plus its parameters, as given on the command line or in a JSON spec file."""

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"Unknown instance family {self.family!r}; expected one of {', '.join(FAMILIES)}")

    @classmethod
    def from_mapping(cls, data: dict) -> "InstanceSpec":
        data = dict(data)
        try:
            family = data.pop("family")
        except KeyError:
            raise InputError("Instance spec needs a 'family' entry")
        return cls(family, data.pop("params", data))

    @classmethod
    def from_json(cls, text: str) -> "InstanceSpec":
        try:
            return cls.from_mapping(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f"Instance spec is not valid JSON: {e}")

    def _get(self, name: str, default: Any = None, kind=int):
        value = self.params.get(name, default)
        if value is None:
            raise InputError(f"Instance family {self.family!r} needs parameter {name!r}")
        try:
            return kind(value)
        except (TypeError, ValueError):
            raise InputError(f"Parameter {name!r} has invalid value {value!r}")

    def build(self) -> Instance:
        family, get = self.family, self._get
        if family == "grid":
            rows = get("rows")
            cols = get("cols", rows)
            split = get("split_col", cols // 2)
            return Instance(grid_graph(rows, cols), half_split_labeling(rows, cols, split), f"grid {rows}x{cols} split {split}")
        if family == "dithered":
            side, core = get("side", 15), get("core_side", 7)
            prob, seed = get("dither_prob", 0.3, float), get("seed", 0)
            g, f = dithered_core(side, core, prob, seed)
            return Instance(g, f, f"dithered side {side} core {core} p {prob} seed {seed}")
        if family == "lattice":
            w, d = get("w"), get("d", 2)
            truth = GeometricTruth.from_mapping({
                "d": d,
                "lower": self.params.get("lower", [0.0] * d),
                "upper": self.params.get("upper", [0.5] + [1.0] * (d - 1)),
                "margin": self.params.get("margin", 0.25),
            })
            lattice = Lattice(w, d)
            return Instance(lattice.graph, lattice.truth_labeling(truth), f"lattice w {w} d {d}")
        if family == "chain":
            spec = ChainFamilySpec(r=get("r"), k=get("k"), p=get("p"), n=get("n", 0) or self._chain_n())
            m = get("m", 1)
            rng = np.random.default_rng(get("seed", 0))
            chosen = sorted(rng.choice(spec.p, size=m, replace=False).tolist())
            cuts = rng.integers(spec.positions, size=m * spec.r).tolist()
            return Instance(chain_family_graph(spec), chain_labeling(spec, chosen, cuts), f"chain {spec} m {m}")
        graph_path = self.params.get("graph")
        labels_path = self.params.get("labels")
        if not graph_path or not labels_path:
            raise InputError("The files family needs 'graph' and 'labels' paths")
        g = load_graph(graph_path)
        return Instance(g, load_labels(labels_path, g.n), f"files {graph_path} {labels_path}")

    def _chain_n(self) -> int:
        r, k, p = self._get("r"), self._get("k"), self._get("p")
        return p * (r * (k - 1) // 2 + 2)


@dataclass
class ExperimentConfig:
    instance: InstanceSpec
    algorithm: Algorithm = Algorithm.S2
    gamma: float = 0.0
    epsilon: float = config.DEFAULT_EPSILON
    budget: Union[int, str, None] = None
    stop: str = "budget"
    holdout_threshold: float = 0.05
    repetitions: Optional[int] = None
    trials: int = 1
    base_seed: int = config.DEFAULT_SEED
    jobs: int = config.DEFAULT_JOBS
    timing: bool = True
    csv_path: Optional[str] = None
    json_path: Optional[str] = None

    def __post_init__(self):
        self.algorithm = Algorithm(self.algorithm)
        self.budget = parse_budget(self.budget)
        if self.trials < 1:
            raise InputError(f"trials must be at least 1, got {self.trials}")
        if self.stop not in ("budget", "boundary", "holdout"):
            raise InputError(f"Unknown stopping rule {self.stop!r}")
        if not (0.0 <= self.gamma < 0.5):
            raise InfeasibleNoiseError(f"gamma must lie in [0, 0.5), got {self.gamma}")
        if not (0.0 < self.epsilon < 1.0):
            raise InfeasibleParameterError(f"epsilon must lie in (0, 1), got {self.epsilon}")

    def resolve_budget(self, instance: Instance, summary: ComplexitySummary) -> int:
        """Logical query budget: explicit, or budget_bound capped at n for 'auto', or n when unset."""
        n = instance.graph.n
        if self.budget is None:
            return n
        if self.budget == "auto":
            return min(n, summary.budget(self.epsilon))
        return self.budget

    def resolve_repetitions(self, n: int) -> int:
        if self.repetitions is not None:
            return self.repetitions
        if self.gamma == 0:
            return 1
        return repetitions_needed(self.gamma, n, self.epsilon)

    def stopping_rule(self, budget: int, summary: ComplexitySummary):
        if self.stop == "boundary":
            return BoundaryKnownRule(target=summary.boundary_size, limit=budget)
        if self.stop == "holdout":
            return HoldoutRule(threshold=self.holdout_threshold, limit=budget, seed=self.base_seed)
        return BudgetRule(budget)

    def describe(self) -> dict:
        data = asdict(self)
        data["algorithm"] = self.algorithm.value
        data["instance"] = {"family": self.instance.family, "params": self.instance.params}
        return data


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    algorithm: str
    queries_used: int
    dc_complexity: Optional[int]
    recovered: bool
    ms_elapsed: float

    def as_row(self) -> list:
        return [
            self.trial,
            self.seed,
            self.algorithm,
            self.queries_used,
            "NA" if self.dc_complexity is None else self.dc_complexity,
            int(self.recovered),
            f"{self.ms_elapsed:.3f}",
        ]


def _stats(values: list[float]) -> Optional[dict]:
    if not values:
        return None
    array = np.asarray(values, dtype=float)
    return {
        "mean": float(array.mean()),
        "std": float(array.std()),
        "min": float(array.min()),
        "max": float(array.max()),
    }


@dataclass
class BenchReport:
    config: ExperimentConfig
    instance: str
    summary: ComplexitySummary
    budget: int
    repetitions: int
    records: list[TrialRecord]

    @property
    def recovery_rate(self) -> float:
        return sum(r.recovered for r in self.records) / len(self.records)

    @property
    def queries_used(self) -> Optional[dict]:
        return _stats([r.queries_used for r in self.records])

    @property
    def dc_complexity(self) -> Optional[dict]:
        return _stats([r.dc_complexity for r in self.records if r.dc_complexity is not None])

    @property
    def covered(self) -> int:
        return sum(r.dc_complexity is not None for r in self.records)

    def to_dict(self) -> dict:
        return {
            "config": self.config.describe(),
            "instance": self.instance,
            "complexity": self.summary.to_dict(),
            "budget": self.budget,
            "repetitions": self.repetitions,
            "trials": len(self.records),
            "recovery_rate": self.recovery_rate,
            "covered": self.covered,
            "queries_used": self.queries_used,
            "dc_complexity": self.dc_complexity,
        }


def _run_trial(instance: Instance, cfg: ExperimentConfig, trial: int, seeds: tuple[int, int],
               budget: int, repetitions: int, summary: ComplexitySummary,
               boundary: frozenset[int]) -> TrialRecord:
    oracle_seed, run_seed = seeds
    oracle = NoisyOracle(instance.truth, cfg.gamma, oracle_seed)
    started = time.perf_counter()
    result = run(
        cfg.algorithm,
        instance.graph,
        oracle,
        cfg.stopping_rule(budget, summary),
        seed=run_seed,
        truth=instance.truth,
        repetitions=repetitions,
    )
    elapsed = (time.perf_counter() - started) * 1000 if cfg.timing else 0.0
    dc = None
    if boundary:
        complexity = dc_query_complexity(result.log, boundary)
        dc = complexity.value if complexity.covered else None
    return TrialRecord(
        trial=trial,
        seed=run_seed,
        algorithm=cfg.algorithm.value,
        queries_used=result.queries_used,
        dc_complexity=dc,
        recovered=bool(result.cut_recovered),
        ms_elapsed=elapsed,
    )


def bench(cfg: ExperimentConfig, instance: Optional[Instance] = None) -> BenchReport:
    """Run cfg.trials seeded trials and aggregate them; writes CSV/JSON when paths are configured."""
    instance = instance or cfg.instance.build()
    summary = summarize(instance.graph, instance.truth)
    budget = cfg.resolve_budget(instance, summary)
    repetitions = cfg.resolve_repetitions(instance.graph.n)
    seeds = trial_seeds(cfg.base_seed, cfg.trials)
    boundary = cut_structure(instance.graph, instance.truth).boundary
    logger.info(
        f"Bench start: {instance.description}, algorithm={cfg.algorithm.value}, trials={cfg.trials}, "
        f"budget={budget}, repetitions={repetitions}, jobs={cfg.jobs}"
    )
    records = Parallel(n_jobs=cfg.jobs)(
        delayed(_run_trial)(instance, cfg, trial, seeds[trial], budget, repetitions, summary, boundary)
        for trial in range(cfg.trials)
    )
    report = BenchReport(
        config=cfg,
        instance=instance.description,
        summary=summary,
        budget=budget,
        repetitions=repetitions,
        records=sorted(records, key=lambda r: r.trial),
    )
    if cfg.csv_path:
        export_to_csv(CSV_COLUMNS, (r.as_row() for r in report.records), cfg.csv_path)
    if cfg.json_path:
        export_to_json(report.to_dict(), cfg.json_path)
    logger.info(f"Bench finished: recovery_rate={report.recovery_rate:.3f}, dc_complexity={report.dc_complexity}")
    return report


def recovery_rate(cfg: ExperimentConfig, instance: Optional[Instance] = None) -> float:
    """Fraction of trials recovering the cut set exactly."""
    return bench(cfg, instance).recovery_rate


# --- nonparametric excess risk ---------------------------------------------

def nonparam_budget(w: int, d: int, c1: float, k: int, beta: float, gamma: float,
                    epsilon: Optional[float] = None) -> int:
    """
    Samples that make noise tolerant S2 recover the lattice cut set, gamma being the
    label flip rate:

        (6 c1 (2w)^(d-1) + (k^2 / 4) ln(w^d) + ln(1 / (beta eps)) / ln(1 / (1 - beta)))
            * ln(w^d / eps) / (2 (0.5 - gamma)^2)

    with eps = 1 / w unless given.
    """
    if gamma >= 0.5:
        raise InfeasibleNoiseError(f"Flip rate must be below 0.5, got {gamma}")
    if w < 1 or d < 1 or k < 1 or c1 <= 0:
        raise InfeasibleParameterError(f"Need w, d, k >= 1 and c1 > 0, got w={w}, d={d}, k={k}, c1={c1}")
    if not (0 < beta < 1):
        raise InfeasibleParameterError(f"beta must lie in (0, 1), got {beta}")
    eps = 1.0 / w if epsilon is None else float(epsilon)
    if not (0 < eps <= 1):
        raise InfeasibleParameterError(f"epsilon must lie in (0, 1], got {eps}")
    boundary_cells = 6 * c1 * (2 * w) ** (d - 1)
    components = (k * k / 4) * d * math.log(w)
    witness = math.log(1 / (beta * eps)) / math.log(1 / (1 - beta))
    repetitions = (d * math.log(w) - math.log(eps)) / (2 * (0.5 - gamma) ** 2)
    return math.ceil((boundary_cells + components + witness) * repetitions - config.CEIL_TOLERANCE)


class RiskPoint(NamedTuple):
    budget: int
    w: int
    repetitions: int
    queries: int
    excess_risk: float


def lattice_side_for_budget(budget: int, d: int, truth: GeometricTruth, c1: float = 1.0,
                            odd_only: bool = True) -> int:
    """Largest lattice side whose sample requirement fits in the budget."""
    step = 2 if odd_only else 1
    w = 3 if odd_only else 2
    best = None
    while nonparam_budget(w, d, c1, 2, truth.beta, truth.flip_prob) <= budget:
        best = w
        w += step
    if best is None:
        raise InfeasibleParameterError(f"Budget {budget} is too small for any lattice of side >= {w}")
    return best


def excess_risk(lattice: Lattice, predicted: Labeling, truth: GeometricTruth) -> float:
    """2 * margin * vol(predicted region xor truth box), exact per cell."""
    return 2 * truth.margin * lattice.symmetric_difference_volume(predicted, truth)


def nonparam_experiment(d: int, gamma: float, truth: GeometricTruth, budgets: list[int], seed: int = 0,
                        trials: int = 1, c1: float = 1.0, odd_lattice: bool = True) -> list[RiskPoint]:
    """
    For every sample budget, fit the largest lattice the budget supports, run noise
    tolerant S2 on it with the cell-sampling oracle and measure the exact excess risk
    of the completed labeling. gamma is the label margin; rows average over trials.
    """
    if truth.d != d:
        raise InputError(f"Truth dimension {truth.d} does not match d={d}")
    truth = replace(truth, margin=gamma)
    seeds = trial_seeds(seed, len(budgets) * trials)
    points = []
    for i, budget in enumerate(budgets):
        w = lattice_side_for_budget(budget, d, truth, c1, odd_lattice)
        lattice = Lattice(w, d)
        r = repetitions_needed(truth.flip_prob, lattice.n, 1.0 / w)
        queries = min(lattice.n, budget // r)
        if queries < 1:
            raise InfeasibleParameterError(f"Budget {budget} does not cover one logical query of {r} repetitions")
        risks = []
        for t in range(trials):
            oracle_seed, run_seed = seeds[i * trials + t]
            oracle = GeometricOracle(truth, lattice, oracle_seed)
            result = s2_run(lattice.graph, oracle, BudgetRule(queries), run_seed, repetitions=r)
            risks.append(excess_risk(lattice, result.predicted, truth))
        point = RiskPoint(budget, w, r, queries, float(np.mean(risks)))
        logger.info(f"Excess risk point: {point}")
        points.append(point)
    return points


def loglog_slope(points: list[RiskPoint]) -> float:
    """Least-squares slope of log(excess risk) against log(budget)."""
    usable = [(p.budget, p.excess_risk) for p in points if p.excess_risk > 0]
    if len(usable) < 2:
        raise InfeasibleParameterError("Need at least two points with positive risk to fit a slope")
    x, y = np.log(np.array(usable, dtype=float)).T
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# --- enumeration counts ------------------------------------------------------

def count_grid_cuts(r: int, max_cut: int) -> int:
    """
    Labelings of the r x r grid with the bottom-left vertex +1 and the top-right
    vertex -1 that split it into exactly two homogeneous components with at most
    max_cut cut edges.
    """
    if not (2 <= r <= config.MAX_GRID_CUT_SIDE):
        raise InputError(f"r must lie in 2..{config.MAX_GRID_CUT_SIDE}, got {r}")
    g = grid_graph(r, r)
    bottom_left, top_right = (r - 1) * r, r - 1
    free = [v for v in range(g.n) if v not in (bottom_left, top_right)]
    labels = np.empty((2 ** len(free), g.n), dtype=np.int8)
    labels[:, free] = np.array(list(itertools.product((POSITIVE, NEGATIVE), repeat=len(free))), dtype=np.int8)
    labels[:, bottom_left] = POSITIVE
    labels[:, top_right] = NEGATIVE
    pairs = np.array(sorted(g.edges))
    cut_sizes = (labels[:, pairs[:, 0]] != labels[:, pairs[:, 1]]).sum(axis=1)
    count = 0
    for row in labels[cut_sizes <= max_cut]:
        if cut_structure(g, Labeling.from_sequence(row.tolist())).k == 2:
            count += 1
    logger.info(f"Counted {count} two-component labelings of the {r}x{r} grid with cut <= {max_cut}")
    return count


class ChainCount(NamedTuple):
    exact: int
    exact_bits: float
    lower_bound_bits: float
    verified: Optional[bool]


def chain_family_bound(n: int, c: int, m: int, kappa: int) -> float:
    """
    Lower bound, in bits, on the number of m-component, c-cut, kappa-clustered labelings:

        m log2(floor(n / (floor(c/m) h + 2)) (h + 1) / m) + (m floor(c/m) - m) log2(h + 1),  h = floor((kappa - 1) / 2)
    """
    if not (1 <= m <= c) or c * (kappa + 2) > n:
        raise InfeasibleParameterError(f"(n={n}, c={c}, m={m}, kappa={kappa}) violates m <= c and c (kappa + 2) <= n")
    return _chain_bound_bits(n, c, m, kappa)


def _chain_bound_bits(n: int, c: int, m: int, kappa: int) -> float:
    h = (kappa - 1) // 2
    r = c // m
    blocks = n // (r * h + 2)
    if blocks < 1:
        raise InfeasibleParameterError(f"No block of {r * h + 2} vertices fits in n={n}")
    return m * math.log2(blocks * (h + 1) / m) + (m * r - m) * math.log2(h + 1)


def chain_family_count(r: int, k: int, p: int, m: int) -> ChainCount:
    """Exact size of the chain labeling family and the lower bound it realizes, verified by enumeration when small."""
    spec = ChainFamilySpec(r=r, k=k, p=p, n=p * (r * (k - 1) // 2 + 2))
    if not (1 <= m <= p):
        raise InputError(f"m must lie in 1..{p}, got {m}")
    exact = chain_family_size(spec, m)
    lower = _chain_bound_bits(spec.n, m * r, m, k)
    verified = None
    if exact <= config.VERIFY_ENUMERATION_LIMIT:
        verified = len(enumerate_chain_labelings(spec, m)) == exact
    return ChainCount(exact, math.log2(exact), lower, verified)
