"""
Query strategies on graphs: S2 (shortest shortest path), the random sampling
baseline and the run-every-search-to-the-end bisection baseline, plus the
component-majority label completion they all finish with.

Every run follows the same loop: pick the next vertex, query it, strip every
edge whose observed endpoints disagree, check the stopping rule. Strategies
differ only in how the next vertex is picked.
"""
import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Optional, Protocol

import numpy as np

from .exceptions import EngineStateError, InputError
from .graph_core import NEGATIVE, POSITIVE, Edge, Graph, Labeling, Path, cut_edges, edge, remove_edges
from .oracle import Oracle

logger = logging.getLogger(__name__)


class Phase(str, Enum):
    RANDOM = "random"
    AGGRESSIVE = "aggressive"


class Algorithm(str, Enum):
    S2 = "s2"
    RANDOM = "random"
    BISECT = "bisect"


@dataclass(frozen=True)
class QueryRecord:
    step: int
    vertex: int
    label: int
    phase: Phase


@dataclass
class RunState:
    """Mutable bookkeeping of one run. `working` is always the original graph minus `found_cuts`."""

    graph: Graph
    working: Graph
    rng: np.random.Generator
    observed: dict[int, int] = field(default_factory=dict)
    found_cuts: set[Edge] = field(default_factory=set)
    log: list[QueryRecord] = field(default_factory=list)
    unqueried: list[int] = field(default_factory=list)
    _position: list[int] = field(default_factory=list, repr=False)

    @classmethod
    def start(cls, g: Graph, seed: int) -> "RunState":
        vertices = list(range(g.n))
        return cls(
            graph=g,
            working=g,
            rng=np.random.default_rng(seed),
            unqueried=vertices,
            _position=list(vertices),
        )

    def random_unqueried(self) -> int:
        return self.unqueried[int(self.rng.integers(len(self.unqueried)))]

    def _mark_queried(self, v: int) -> None:
        i = self._position[v]
        last = self.unqueried.pop()
        if last != v:
            self.unqueried[i] = last
            self._position[last] = i

    def record(self, v: int, label: int, phase: Phase) -> None:
        """Store an answer and strip the cut edges it exposes."""
        if v in self.observed:
            raise EngineStateError(f"Vertex {v} was already queried")
        self._mark_queried(v)
        self.observed[v] = label
        self.log.append(QueryRecord(len(self.log), v, label, phase))
        exposed = [
            edge(v, u)
            for u in self.graph.adjacency[v]
            if u in self.observed and self.observed[u] != label
        ]
        if exposed:
            self.found_cuts.update(exposed)
            self.working = remove_edges(self.working, exposed)

    @property
    def observed_labeling(self) -> Labeling:
        return Labeling(self.graph.n, self.observed)

    @property
    def known_boundary(self) -> set[int]:
        return {v for e in self.found_cuts for v in e}


class StoppingRule(Protocol):
    limit: Optional[int]

    def reached(self, state: RunState) -> bool: ...


@dataclass(frozen=True)
class BudgetRule:
    """Stop after `limit` logical queries."""

    limit: int

    def reached(self, state: RunState) -> bool:
        return False


@dataclass(frozen=True)
class BoundaryKnownRule:
    """Stop once the discovered cut edges touch `target` distinct vertices."""

    target: int
    limit: Optional[int] = None

    def reached(self, state: RunState) -> bool:
        return len(state.known_boundary) >= self.target


@lru_cache(maxsize=64)
def _holdout_vertices(n: int, fraction: float, seed: int) -> frozenset[int]:
    size = int(round(fraction * n))
    order = np.random.default_rng(seed).permutation(n)
    return frozenset(int(v) for v in order[:size])


@dataclass(frozen=True)
class HoldoutRule:
    """
    Stop when labels completed from the non-held-out observations disagree with
    at most `threshold` of the observed held-out vertices. A fixed random
    `fraction` of the vertex set is held out; the rule stays silent until
    `min_size` held-out vertices have been observed.
    """

    threshold: float
    fraction: float = 0.2
    min_size: int = 5
    limit: Optional[int] = None
    seed: int = 0

    def reached(self, state: RunState) -> bool:
        held = _holdout_vertices(state.graph.n, self.fraction, self.seed)
        validation = [v for v in state.observed if v in held]
        if len(validation) < max(1, self.min_size):
            return False
        training = {v: label for v, label in state.observed.items() if v not in held}
        predicted = label_completion(state.working, Labeling(state.graph.n, training))
        wrong = sum(predicted[v] != state.observed[v] for v in validation)
        return wrong / len(validation) <= self.threshold


@dataclass(frozen=True)
class RunResult:
    """
    Outcome of one run. `predicted` is the label completion of the final
    working graph, computed on first access.
    """

    algorithm: Algorithm
    log: tuple[QueryRecord, ...]
    found_cuts: frozenset[Edge]
    queries_used: int
    raw_queries: int
    working: Graph = field(repr=False, compare=False)
    observed: Mapping[int, int] = field(repr=False, compare=False)
    budget: Optional[int] = None
    cut_recovered: Optional[bool] = None

    @cached_property
    def predicted(self) -> Labeling:
        return label_completion(self.working, self.observed)

    @property
    def queried(self) -> list[int]:
        return [record.vertex for record in self.log]

    @property
    def aggressive_queries(self) -> int:
        return sum(record.phase is Phase.AGGRESSIVE for record in self.log)

    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm.value,
            "queries_used": self.queries_used,
            "raw_queries": self.raw_queries,
            "aggressive_queries": self.aggressive_queries,
            "cuts_found": len(self.found_cuts),
            "cut_recovered": self.cut_recovered,
            "budget": self.budget,
        }


def _layers(adjacency: tuple[tuple[int, ...], ...], sources: Iterable[int], depth: int) -> Iterator[list[int]]:
    """Breadth-first layers 0..depth around the sources, neighbors scanned in ascending id order."""
    layer = list(sources)
    seen = set(layer)
    for _ in range(depth + 1):
        if not layer:
            return
        yield layer
        nxt = []
        for x in layer:
            for y in adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        layer = nxt


def shortest_opposite_path(g: Graph, observed: Mapping[int, int]) -> Optional[Path]:
    """
    Shortest path between the closest oppositely labeled observed pair, or None.

    The pair minimizes (distance, v_i, v_j) lexicographically with v_i < v_j,
    and the path is the one `shortest_path(g, v_i, v_j)` returns.
    """
    plus = sorted(v for v, label in observed.items() if label == POSITIVE)
    minus = sorted(v for v, label in observed.items() if label == NEGATIVE)
    if not plus or not minus:
        return None
    adjacency = g.adjacency

    distance, candidates = None, []
    for depth, layer in enumerate(_layers(adjacency, plus, g.n)):
        candidates = [v for v in layer if observed.get(v) == NEGATIVE]
        if candidates:
            distance = depth
            break
    if distance is None:
        return None
    for depth, layer in enumerate(_layers(adjacency, minus, distance)):
        if depth == distance:
            candidates.extend(v for v in layer if observed.get(v) == POSITIVE)

    first = min(candidates)
    wanted = -observed[first]
    parent = {first: first}
    layer = [first]
    for _ in range(distance):
        nxt = []
        for x in layer:
            for y in adjacency[x]:
                if y not in parent:
                    parent[y] = x
                    nxt.append(y)
        layer = nxt
    partner = min(v for v in layer if observed.get(v) == wanted)
    if distance == 1:
        raise EngineStateError(f"Unharvested cut edge ({first}, {partner}) in working graph")
    walk = [partner]
    while walk[-1] != first:
        walk.append(parent[walk[-1]])
    return Path(tuple(reversed(walk)))


def path_midpoint(path: Path) -> int:
    """Centre vertex of the path; for odd lengths the lower id of the two central vertices."""
    length = path.length
    return min(path.vertices[length // 2], path.vertices[(length + 1) // 2])


def mssp(g: Graph, observed: Mapping[int, int]) -> Optional[int]:
    """
    Midpoint of the shortest shortest path between oppositely labeled observed
    vertices, or None when no such pair is connected in g.

    Known cut edges must already be removed from g, so the chosen path has at
    least two edges and its midpoint is never an observed vertex.
    """
    path = shortest_opposite_path(g, observed)
    return None if path is None else path_midpoint(path)


def label_completion(g: Graph, observed: Mapping[int, int]) -> Labeling:
    """
    Component-majority completion: every component of g takes the majority of
    its observed labels, components without observations take the global
    majority, and ties go to +1.
    """
    blocks = g.component_index
    sums = np.zeros(int(blocks.max()) + 1 if g.n else 0, dtype=np.int64)
    seen = np.zeros_like(sums, dtype=bool)
    for v, label in observed.items():
        sums[blocks[v]] += label
        seen[blocks[v]] = True
    fallback = POSITIVE if sum(observed.values()) >= 0 else NEGATIVE
    block_label = np.where(seen, np.where(sums >= 0, POSITIVE, NEGATIVE), fallback)
    return Labeling.from_sequence(block_label[blocks].tolist())


class _Strategy:
    def next_vertex(self, state: RunState) -> Optional[int]:
        return None


class _S2Strategy(_Strategy):
    def next_vertex(self, state: RunState) -> Optional[int]:
        return mssp(state.working, state.observed)


class _BisectStrategy(_Strategy):
    """Keeps bisecting one fixed path until a single edge is left, then asks mssp for a new one."""

    def __init__(self):
        self.segment: Optional[tuple[int, ...]] = None

    def _narrow(self, observed: Mapping[int, int]) -> None:
        segment = self.segment
        while segment is not None and len(segment) > 2:
            i = segment.index(path_midpoint(Path(segment)))
            if segment[i] not in observed:
                break
            if observed[segment[0]] != observed[segment[i]]:
                segment = segment[: i + 1]
            else:
                segment = segment[i:]
        self.segment = segment if segment is not None and len(segment) > 2 else None

    def next_vertex(self, state: RunState) -> Optional[int]:
        self._narrow(state.observed)
        if self.segment is None:
            path = shortest_opposite_path(state.working, state.observed)
            if path is None:
                return None
            self.segment = path.vertices
        return path_midpoint(Path(self.segment))


_STRATEGIES = {
    Algorithm.S2: _S2Strategy,
    Algorithm.RANDOM: _Strategy,
    Algorithm.BISECT: _BisectStrategy,
}


def run(
    algorithm: Algorithm | str,
    g: Graph,
    oracle: Oracle,
    stop: StoppingRule,
    seed: int = 0,
    truth: Optional[Labeling] = None,
    warm_start: Iterable[int] = (),
    repetitions: int = 1,
) -> RunResult:
    """
    Drive one active learning run.

    Args:
        algorithm: s2, random or bisect
        g: graph to learn on
        oracle: anything answering `query` / `majority_query`
        stop: stopping rule; its `limit` caps the logical query count
        seed: seed of the generator picking random-phase vertices
        truth: ground truth, only used to report `cut_recovered`
        warm_start: vertices queried first, before any strategy decision
        repetitions: raw queries per logical query (majority vote when > 1)

    Returns:
        RunResult with the query log and the completed labeling
    """
    algorithm = Algorithm(algorithm)
    if g.n == 0:
        raise InputError("Cannot run on an empty graph")
    if stop.limit is not None and not (1 <= stop.limit <= g.n):
        raise InputError(f"Query budget must lie in 1..{g.n}, got {stop.limit}")
    if repetitions < 1:
        raise InputError(f"Repetitions must be at least 1, got {repetitions}")
    warm = list(dict.fromkeys(int(v) for v in warm_start))
    for v in warm:
        g.check_vertex(v)

    logger.debug(f"Starting {algorithm.value} run: n={g.n}, edges={g.edge_count}, limit={stop.limit}, seed={seed}")
    state = RunState.start(g, seed)
    strategy = _STRATEGIES[algorithm]()
    raw_before = oracle.query_count

    def ask(v: int) -> int:
        return oracle.query(v) if repetitions == 1 else oracle.majority_query(v, repetitions)

    def finished() -> bool:
        if not state.unqueried:
            return True
        if stop.limit is not None and len(state.log) >= stop.limit:
            return True
        return stop.reached(state)

    while not finished():
        if warm:
            v, phase = warm.pop(0), Phase.RANDOM
        else:
            v = strategy.next_vertex(state)
            phase = Phase.AGGRESSIVE
            if v is None:
                v, phase = state.random_unqueried(), Phase.RANDOM
        label = ask(v)
        state.record(v, label, phase)
        logger.debug(f"step={len(state.log) - 1} phase={phase.value} vertex={v} label={label}")

    recovered = None
    if truth is not None:
        recovered = frozenset(state.found_cuts) == cut_edges(g, truth)
    result = RunResult(
        algorithm=algorithm,
        log=tuple(state.log),
        found_cuts=frozenset(state.found_cuts),
        queries_used=len(state.log),
        raw_queries=oracle.query_count - raw_before,
        working=state.working,
        observed=dict(state.observed),
        budget=stop.limit,
        cut_recovered=recovered,
    )
    logger.debug(
        f"Finished {algorithm.value} run: queries={result.queries_used}, raw={result.raw_queries}, "
        f"cuts={len(result.found_cuts)}, recovered={recovered}"
    )
    return result


def s2_run(g: Graph, oracle: Oracle, stop: StoppingRule, seed: int = 0, **kwargs) -> RunResult:
    return run(Algorithm.S2, g, oracle, stop, seed, **kwargs)


def random_run(g: Graph, oracle: Oracle, stop: StoppingRule, seed: int = 0, **kwargs) -> RunResult:
    return run(Algorithm.RANDOM, g, oracle, stop, seed, **kwargs)


def bisect_run(g: Graph, oracle: Oracle, stop: StoppingRule, seed: int = 0, **kwargs) -> RunResult:
    return run(Algorithm.BISECT, g, oracle, stop, seed, **kwargs)
