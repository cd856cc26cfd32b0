"""
Undirected simple graphs over dense vertex ids, labelings, and the path and
component primitives the rest of s2lab is built on.

Graphs and labelings are immutable; edge removal derives a new graph.
"""
import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .exceptions import InputError

logger = logging.getLogger(__name__)

POSITIVE = 1
NEGATIVE = -1
LABELS = (POSITIVE, NEGATIVE)

Edge = tuple[int, int]


def edge(u: int, v: int) -> Edge:
    """Canonical (low, high) form of an undirected edge."""
    return (u, v) if u < v else (v, u)


def _symmetric_matrix(n: int, edges: Iterable[Edge]) -> sparse.csr_matrix:
    pairs = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    data = np.ones(rows.size, dtype=np.int8)
    matrix = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
    matrix.sort_indices()
    return matrix


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[Edge]

    def __post_init__(self):
        if self.n < 0:
            raise InputError(f"Vertex count must be non-negative, got {self.n}")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise InputError(f"Edge ({u}, {v}) is not a canonical edge of a graph on {self.n} vertices")

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from arbitrary (u, v) pairs, rejecting self-loops and duplicates."""
        seen = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                raise InputError(f"Self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"Edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            e = edge(u, v)
            if e in seen:
                raise InputError(f"Duplicate edge {e}")
            seen.add(e)
        return cls(n, frozenset(seen))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Neighbor lists, each sorted ascending."""
        neighbors = [[] for _ in range(self.n)]
        for u, v in self.edges:
            neighbors[u].append(v)
            neighbors[v].append(u)
        return tuple(tuple(sorted(nbrs)) for nbrs in neighbors)

    @classmethod
    def _derived(cls, n: int, edges: frozenset[Edge], **cached) -> "Graph":
        """Trusted constructor for graphs derived from a validated one; `cached` seeds cached properties."""
        g = cls.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "edges", edges)
        g.__dict__.update((name, value) for name, value in cached.items() if value is not None)
        return g

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix with sorted column indices."""
        return _symmetric_matrix(self.n, self.edges)

    @cached_property
    def component_index(self) -> np.ndarray:
        """Block index of every vertex, blocks numbered by ascending minimum vertex id."""
        if self.n == 0:
            return np.zeros(0, dtype=np.int64)
        _, raw = csgraph.connected_components(self.csr, directed=False)
        # scipy numbers blocks in discovery order from vertex 0, but do not rely on it
        _, first = np.unique(raw, return_index=True)
        order = np.argsort(first, kind="stable")
        relabel = np.empty_like(order)
        relabel[order] = np.arange(order.size)
        return relabel[raw]

    def neighbors(self, v: int) -> tuple[int, ...]:
        self.check_vertex(v)
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return edge(u, v) in self.edges

    def check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise InputError(f"Vertex {v} is outside 0..{self.n - 1}")


class Labeling(Mapping):
    """Map from vertex ids to +1/-1, total (ground truth) or partial (observations)."""

    __slots__ = ("n", "_values")

    def __init__(self, n: int, values: Mapping[int, int]):
        clean = {}
        for v, label in values.items():
            v, label = int(v), int(label)
            if not (0 <= v < n):
                raise InputError(f"Labeled vertex {v} is outside 0..{n - 1}")
            if label not in LABELS:
                raise InputError(f"Label of vertex {v} must be +1 or -1, got {label}")
            clean[v] = label
        self.n = n
        self._values = MappingProxyType(clean)

    @classmethod
    def from_sequence(cls, labels: Iterable[int]) -> "Labeling":
        labels = [int(x) for x in labels]
        return cls(len(labels), dict(enumerate(labels)))

    @classmethod
    def constant(cls, n: int, label: int = POSITIVE) -> "Labeling":
        return cls(n, dict.fromkeys(range(n), label))

    def __getitem__(self, v: int) -> int:
        return self._values[v]

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._values))

    def __len__(self) -> int:
        return len(self._values)

    def __eq__(self, other) -> bool:
        if isinstance(other, Labeling):
            return self.n == other.n and dict(self._values) == dict(other._values)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self._values.items())))

    def __repr__(self) -> str:
        return f"Labeling(n={self.n}, labeled={len(self)})"

    def __reduce__(self):
        return (Labeling, (self.n, dict(self._values)))

    @property
    def is_total(self) -> bool:
        return len(self._values) == self.n

    def as_array(self) -> np.ndarray:
        """Dense int8 vector; requires a total labeling."""
        if not self.is_total:
            raise InputError("Labeling is partial; a total labeling is required")
        out = np.empty(self.n, dtype=np.int8)
        for v, label in self._values.items():
            out[v] = label
        return out


@dataclass(frozen=True)
class Path:
    vertices: tuple[int, ...] = field(default_factory=tuple)

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def source(self) -> int:
        return self.vertices[0]

    @property
    def target(self) -> int:
        return self.vertices[-1]


def shortest_path(g: Graph, u: int, v: int) -> Optional[Path]:
    """
    Minimum edge-count path from u to v, or None when v is unreachable.

    Breadth-first search scanning neighbors in ascending id order; the first
    discovery of each vertex fixes its parent, so ties resolve deterministically.
    """
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        return Path((u,))
    adjacency = g.adjacency
    parent = {u: u}
    frontier = [u]
    while frontier:
        nxt = []
        for x in frontier:
            for y in adjacency[x]:
                if y in parent:
                    continue
                parent[y] = x
                if y == v:
                    walk = [v]
                    while walk[-1] != u:
                        walk.append(parent[walk[-1]])
                    return Path(tuple(reversed(walk)))
                nxt.append(y)
        frontier = nxt
    return None


def connected_components(g: Graph) -> list[tuple[int, ...]]:
    """Vertex blocks of g, each sorted, listed by ascending minimum vertex id."""
    blocks: dict[int, list[int]] = {}
    for v, block in enumerate(g.component_index.tolist()):
        blocks.setdefault(block, []).append(v)
    return [tuple(blocks[b]) for b in sorted(blocks)]


def remove_edges(g: Graph, drop: Iterable[tuple[int, int]]) -> Graph:
    """A copy of g without the given edges; every dropped edge must exist."""
    drop = {edge(int(u), int(v)) for u, v in drop}
    missing = drop - g.edges
    if missing:
        raise InputError(f"Cannot remove edges not present in the graph: {sorted(missing)[:5]}")
    if not drop:
        return g
    csr = adjacency = None
    if "csr" in g.__dict__:
        csr = g.csr - _symmetric_matrix(g.n, drop)
        csr.eliminate_zeros()
        csr.sort_indices()
    if "adjacency" in g.__dict__:
        lost: dict[int, set[int]] = {}
        for u, v in drop:
            lost.setdefault(u, set()).add(v)
            lost.setdefault(v, set()).add(u)
        rows = list(g.adjacency)
        for u, gone in lost.items():
            rows[u] = tuple(w for w in rows[u] if w not in gone)
        adjacency = tuple(rows)
    return Graph._derived(g.n, g.edges - drop, csr=csr, adjacency=adjacency)


def cut_edges(g: Graph, f: Mapping[int, int]) -> frozenset[Edge]:
    """Edges of g whose endpoints are both labeled by f, with different labels."""
    return frozenset((u, v) for u, v in g.edges if u in f and v in f and f[u] != f[v])


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph on the given vertices re-indexed densely; returns it with the original ids."""
    keep = tuple(sorted(set(vertices)))
    for v in keep:
        g.check_vertex(v)
    index = {v: i for i, v in enumerate(keep)}
    pairs = [(index[u], index[v]) for u, v in g.edges if u in index and v in index]
    return Graph.from_edges(len(keep), pairs), keep
