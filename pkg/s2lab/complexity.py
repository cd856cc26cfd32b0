"""
Complexity parameters of a (graph, labeling) pair and the closed-form query budgets built from them.

    cut set C          edges joining differently labeled vertices
    boundary           vertices touching C
    components V_i     connected components of G - C (homogeneous components)
    cut components     C grouped by the pair of homogeneous components each edge joins
    delta(e1, e2)      d(x1, x2) + d(y1, y2) + 1 in G - C, x the +1 ends, y the -1 ends
    kappa*             smallest r for which the delta <= r graph on C has exactly m components
    beta               smallest homogeneous component as a fraction of n
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
from networkx.utils import UnionFind
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .config import CEIL_TOLERANCE
from .exceptions import InfeasibleParameterError, InputError, UndefinedParameterError
from .graph_core import POSITIVE, Graph, Labeling, cut_edges, edge, remove_edges

logger = logging.getLogger(__name__)


class CutEdge(NamedTuple):
    plus: int
    minus: int

    @property
    def canonical(self) -> tuple[int, int]:
        return edge(self.plus, self.minus)


@dataclass(frozen=True, eq=False)
class CutStructure:
    graph: Graph
    labeling: Labeling
    cut_edges: tuple[CutEdge, ...]
    g_minus_c: Graph

    @cached_property
    def boundary(self) -> frozenset[int]:
        return frozenset(v for e in self.cut_edges for v in e)

    @cached_property
    def components(self) -> list[tuple[int, ...]]:
        """Homogeneous components V_i, ordered by smallest vertex id."""
        blocks: dict[int, list[int]] = {}
        for v, block in enumerate(self.g_minus_c.component_index.tolist()):
            blocks.setdefault(block, []).append(v)
        return [tuple(blocks[b]) for b in sorted(blocks)]

    @cached_property
    def cut_components(self) -> dict[tuple[int, int], tuple[CutEdge, ...]]:
        """Cut edges keyed by the (r, s), r < s, homogeneous components they join."""
        index = self.g_minus_c.component_index
        grouped: dict[tuple[int, int], list[CutEdge]] = {}
        for e in self.cut_edges:
            key = tuple(sorted((int(index[e.plus]), int(index[e.minus]))))
            grouped.setdefault(key, []).append(e)
        return {key: tuple(edges) for key, edges in sorted(grouped.items())}

    @property
    def cut_size(self) -> int:
        return len(self.cut_edges)

    @property
    def boundary_size(self) -> int:
        return len(self.boundary)

    @property
    def m(self) -> int:
        return len(self.cut_components)

    @property
    def k(self) -> int:
        return len(self.components)

    def edge_index(self, e: tuple[int, int]) -> int:
        key = edge(*e)
        for i, cut in enumerate(self.cut_edges):
            if cut.canonical == key:
                return i
        raise InputError(f"Edge {key} is not a cut edge")

    @cached_property
    def delta_matrix(self) -> np.ndarray:
        """Pairwise delta over cut edges (in `cut_edges` order), zero diagonal, inf across cut components."""
        if not self.cut_edges:
            return np.zeros((0, 0))
        plus = [e.plus for e in self.cut_edges]
        minus = [e.minus for e in self.cut_edges]
        from_plus = dijkstra(self.g_minus_c.csr, directed=False, indices=plus, unweighted=True)
        from_minus = dijkstra(self.g_minus_c.csr, directed=False, indices=minus, unweighted=True)
        matrix = from_plus[:, plus] + from_minus[:, minus] + 1
        np.fill_diagonal(matrix, 0)
        return matrix

    def delta(self, e1: tuple[int, int], e2: tuple[int, int]) -> float:
        value = self.delta_matrix[self.edge_index(e1), self.edge_index(e2)]
        return math.inf if not np.isfinite(value) else int(value)

    def h_component_count(self, r: float) -> int:
        """Components of the graph on C joining e, e' whenever delta(e, e') <= r."""
        if not self.cut_edges:
            return 0
        adjacency = np.isfinite(self.delta_matrix) & (self.delta_matrix <= r)
        count, _ = connected_components(csr_matrix(adjacency), directed=False)
        return int(count)

    def kappa_star(self) -> int:
        if not self.cut_edges:
            raise UndefinedParameterError("kappa* is undefined for an empty cut set")
        size, m = self.cut_size, self.m
        if size == m:
            return 1
        matrix = self.delta_matrix
        rows, cols = np.triu_indices(size, 1)
        values = matrix[rows, cols]
        finite = np.isfinite(values)
        rows, cols, values = rows[finite], cols[finite], values[finite]
        order = np.argsort(values, kind="stable")
        sets = UnionFind(range(size))
        count = size
        for i in order:
            a, b = int(rows[i]), int(cols[i])
            if sets[a] != sets[b]:
                sets.union(a, b)
                count -= 1
                if count == m:
                    return max(1, int(values[i]))
        raise UndefinedParameterError("Cut components never merged; delta matrix is inconsistent")

    def balancedness(self) -> Fraction:
        return Fraction(min(len(block) for block in self.components), self.graph.n)

    def is_witness(self, vertices) -> bool:
        """True iff the vertex set meets every homogeneous component."""
        index = self.g_minus_c.component_index
        hit = {int(index[v]) for v in vertices}
        return len(hit) == self.k


def cut_structure(g: Graph, f: Labeling) -> CutStructure:
    if f.n != g.n or not f.is_total:
        raise InputError(f"Labeling must be total over the graph's {g.n} vertices")
    cuts = sorted(cut_edges(g, f))
    oriented = tuple(CutEdge(u, v) if f[u] == POSITIVE else CutEdge(v, u) for u, v in cuts)
    return CutStructure(graph=g, labeling=f, cut_edges=oriented, g_minus_c=remove_edges(g, cuts))


def delta(g: Graph, f: Labeling, e1: tuple[int, int], e2: tuple[int, int]) -> float:
    return cut_structure(g, f).delta(e1, e2)


def kappa_star(g: Graph, f: Labeling) -> int:
    return cut_structure(g, f).kappa_star()


def balancedness(g: Graph, f: Labeling) -> Fraction:
    return cut_structure(g, f).balancedness()


def is_witness(g: Graph, f: Labeling, vertices) -> bool:
    return cut_structure(g, f).is_witness(vertices)


def ceil_log2(x: int) -> int:
    if x < 1:
        raise InfeasibleParameterError(f"log2 needs a positive integer, got {x}")
    return (int(x) - 1).bit_length()


def _ceil(value: float) -> int:
    return math.ceil(value - CEIL_TOLERANCE)


def witness_size(beta: float, alpha: float) -> int:
    """
    Number of uniform random vertices that hit every homogeneous component with
    probability at least 1 - alpha: ceil(log(1 / (beta alpha)) / log(1 / (1 - beta))).
    With beta = 1 there is a single component and one vertex suffices.
    """
    beta, alpha = float(beta), float(alpha)
    if not (0 < alpha < 1):
        raise InfeasibleParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if not (0 < beta <= 1):
        raise InfeasibleParameterError(f"beta must lie in (0, 1], got {beta}")
    if beta == 1:
        return 1
    return max(1, _ceil(math.log(1 / (beta * alpha)) / math.log(1 / (1 - beta))))


def budget_bound(n: int, m: int, kappa: int, boundary_size: int, beta: float, epsilon: float) -> int:
    """
    Query budget after which S2 recovers the cut set with probability at least 1 - epsilon:

        witness_size(beta, epsilon) + m (ceil(log2 n) - ceil(log2 kappa)) + |boundary| (ceil(log2 kappa) + 1)

    With m = 0 only the random-phase term remains.
    """
    if n < 1:
        raise InfeasibleParameterError(f"n must be positive, got {n}")
    if m < 0 or boundary_size < 0:
        raise InfeasibleParameterError("m and boundary size must be non-negative")
    if not (0 < float(epsilon) < 1):
        raise InfeasibleParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    random_phase = witness_size(beta, epsilon)
    if m == 0:
        return random_phase
    if kappa < 1:
        raise InfeasibleParameterError(f"kappa must be at least 1, got {kappa}")
    log_kappa = ceil_log2(kappa)
    return random_phase + m * (ceil_log2(n) - log_kappa) + boundary_size * (log_kappa + 1)


@dataclass(frozen=True)
class ComplexitySummary:
    n: int
    cut_size: int
    boundary_size: int
    m: int
    kappa_star: Optional[int]
    beta: Fraction
    k: int

    def budget(self, epsilon: float, kappa: Optional[int] = None) -> int:
        """budget_bound for this instance; kappa defaults to kappa*."""
        kappa = kappa if kappa is not None else (self.kappa_star or 1)
        return budget_bound(self.n, self.m, kappa, self.boundary_size, self.beta, epsilon)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "cut_size": self.cut_size,
            "boundary_size": self.boundary_size,
            "m": self.m,
            "kappa_star": self.kappa_star,
            "beta": {
                "numerator": self.beta.numerator,
                "denominator": self.beta.denominator,
                "value": float(self.beta),
            },
            "k": self.k,
        }


def summarize(g: Graph, f: Labeling) -> ComplexitySummary:
    structure = cut_structure(g, f)
    kappa = structure.kappa_star() if structure.cut_edges else None
    summary = ComplexitySummary(
        n=g.n,
        cut_size=structure.cut_size,
        boundary_size=structure.boundary_size,
        m=structure.m,
        kappa_star=kappa,
        beta=structure.balancedness(),
        k=structure.k,
    )
    logger.info(f"Analyzed instance: {summary.to_dict()}")
    return summary
