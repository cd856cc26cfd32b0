"""
Instance generators and feature-file graph construction.

Grids and dithered-core grids, d-dimensional lattices with box-shaped ground
truth and a cell-sampling oracle, the chained block family G(r, k) with its
labeling enumeration, and k-NN / threshold graphs over feature vectors.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from .complexity import cut_structure
from .config import MAX_DITHER_ATTEMPTS, MAX_ENUMERATION
from .exceptions import GenerationError, InfeasibleParameterError, InputError
from .graph_core import NEGATIVE, POSITIVE, Graph, Labeling, connected_components, induced_subgraph
from .oracle import majority_label

logger = logging.getLogger(__name__)


# --- grids ---------------------------------------------------------------

def grid_graph(rows: int, cols: int) -> Graph:
    """4-neighbor grid, vertex id = row * cols + col."""
    if rows < 1 or cols < 1:
        raise InputError(f"Grid dimensions must be positive, got {rows}x{cols}")
    pairs = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                pairs.append((v, v + 1))
            if r + 1 < rows:
                pairs.append((v, v + cols))
    return Graph.from_edges(rows * cols, pairs)


def half_split_labeling(rows: int, cols: int, split_col: int) -> Labeling:
    """+1 on columns left of split_col, -1 elsewhere."""
    if not (0 <= split_col <= cols):
        raise InputError(f"split_col must lie in 0..{cols}, got {split_col}")
    return Labeling.from_sequence(
        POSITIVE if c < split_col else NEGATIVE for r in range(rows) for c in range(cols)
    )


def _core_rings(side: int, core_side: int) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks of the square core and of the two rings straddling its border."""
    start = (side - core_side) // 2
    stop = start + core_side
    core = np.zeros((side, side), dtype=bool)
    core[start:stop, start:stop] = True
    grown = np.zeros_like(core)
    grown[max(start - 1, 0):min(stop + 1, side), max(start - 1, 0):min(stop + 1, side)] = True
    shrunk = np.zeros_like(core)
    if core_side > 2:
        shrunk[start + 1:stop - 1, start + 1:stop - 1] = True
    return core, grown & ~shrunk


def dithered_core(side: int, core_side: int, dither_prob: float, seed: int = 0) -> tuple[Graph, Labeling]:
    """
    side x side grid, +1 on a centred core_side square whose border cells (inside
    and outside ring) flip membership independently with dither_prob. Samples are
    rejected until the core and its complement are both connected.
    """
    if not (1 <= core_side < side):
        raise InputError(f"core_side must lie in 1..{side - 1}, got {core_side}")
    if not (0.0 <= dither_prob <= 1.0):
        raise InputError(f"dither_prob must lie in [0, 1], got {dither_prob}")
    g = grid_graph(side, side)
    core, ring = _core_rings(side, core_side)
    rng = np.random.default_rng(seed)
    for attempt in range(1, MAX_DITHER_ATTEMPTS + 1):
        flips = ring & (rng.random(core.shape) < dither_prob)
        inside = core ^ flips
        labeling = Labeling.from_sequence(np.where(inside, POSITIVE, NEGATIVE).ravel().tolist())
        if cut_structure(g, labeling).k == 2:
            logger.info(f"Dithered core accepted after {attempt} attempt(s): side={side}, core={core_side}, seed={seed}")
            return g, labeling
    raise GenerationError(
        f"No dithered core with exactly two homogeneous components after {MAX_DITHER_ATTEMPTS} attempts"
    )


# --- lattices with geometric ground truth ---------------------------------

@dataclass(frozen=True)
class GeometricTruth:
    """Axis-aligned box [lower, upper] in the unit cube labeled +1, with label margin gamma."""

    d: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    margin: float = 0.25

    def __post_init__(self):
        if len(self.lower) != self.d or len(self.upper) != self.d:
            raise InputError(f"Box corners must have {self.d} coordinates")
        for a, b in zip(self.lower, self.upper):
            if not (0.0 <= a < b <= 1.0):
                raise InputError(f"Box side [{a}, {b}] is not inside [0, 1]")
        if not (0.0 < self.margin <= 0.5):
            raise InfeasibleParameterError(f"margin must lie in (0, 0.5], got {self.margin}")

    @classmethod
    def from_mapping(cls, data: dict) -> "GeometricTruth":
        lower = tuple(float(x) for x in data["lower"])
        return cls(
            d=int(data.get("d", len(lower))),
            lower=lower,
            upper=tuple(float(x) for x in data["upper"]),
            margin=float(data.get("margin", 0.25)),
        )

    @property
    def flip_prob(self) -> float:
        return 0.5 - self.margin

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))

    @property
    def beta(self) -> float:
        return min(self.volume, 1.0 - self.volume)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        return np.all((points >= self.lower) & (points <= self.upper), axis=1)


@dataclass(frozen=True)
class Lattice:
    """w^d lattice on the unit cube; vertex v owns the side 1/w cell around it, ids row-major."""

    w: int
    d: int

    def __post_init__(self):
        if self.w < 1 or self.d < 1:
            raise InputError(f"Lattice needs w >= 1 and d >= 1, got w={self.w}, d={self.d}")

    @property
    def n(self) -> int:
        return self.w ** self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.w,) * self.d

    @cached_property
    def graph(self) -> Graph:
        ids = np.arange(self.n).reshape(self.shape)
        head = np.arange(self.w - 1)
        tail = np.arange(1, self.w)
        blocks = [
            np.stack([ids.take(head, axis=axis).ravel(), ids.take(tail, axis=axis).ravel()], axis=1)
            for axis in range(self.d)
        ]
        pairs = np.concatenate(blocks) if blocks else np.zeros((0, 2), dtype=np.int64)
        return Graph.from_edges(self.n, pairs.tolist())

    @cached_property
    def coordinates(self) -> np.ndarray:
        """(n, d) integer cell coordinates."""
        return np.stack(np.unravel_index(np.arange(self.n), self.shape), axis=1)

    def vertex(self, coords) -> int:
        return int(np.ravel_multi_index(tuple(coords), self.shape))

    def cell_bounds(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lower = self.coordinates[v] / self.w
        return lower, lower + 1.0 / self.w

    def overlap_fraction(self, truth: GeometricTruth) -> np.ndarray:
        """Fraction of every cell's volume that lies inside the truth box."""
        lower = self.coordinates / self.w
        upper = lower + 1.0 / self.w
        sides = np.minimum(upper, truth.upper) - np.maximum(lower, truth.lower)
        return np.prod(np.clip(sides * self.w, 0.0, 1.0), axis=1)

    def truth_labeling(self, truth: GeometricTruth) -> Labeling:
        """Label of every cell centre."""
        centres = (self.coordinates + 0.5) / self.w
        return Labeling.from_sequence(np.where(truth.contains(centres), POSITIVE, NEGATIVE).tolist())

    def symmetric_difference_volume(self, predicted: Labeling, truth: GeometricTruth) -> float:
        """Volume of (predicted +1 region) xor (truth box), cells taken whole."""
        inside = self.overlap_fraction(truth)
        labels = predicted.as_array()
        wrong = np.where(labels == POSITIVE, 1.0 - inside, inside)
        return float(wrong.sum()) / self.n


def lattice_graph(w: int, d: int) -> Lattice:
    return Lattice(w, d)


class GeometricOracle:
    """
    Answers a query on vertex v by drawing a uniform point from v's cell and
    returning its box label, flipped with probability 0.5 - margin.
    """

    def __init__(self, truth: GeometricTruth, lattice: Union[Lattice, int], seed: int = 0):
        if isinstance(lattice, int):
            lattice = Lattice(lattice, truth.d)
        if lattice.d != truth.d:
            raise InputError(f"Lattice dimension {lattice.d} does not match truth dimension {truth.d}")
        self.truth = truth
        self.lattice = lattice
        self.n = lattice.n
        self.seed = int(seed)
        self.query_count = 0
        self._rng = np.random.default_rng(self.seed)

    def _draw(self, v: int, r: int) -> np.ndarray:
        if not (0 <= v < self.n):
            raise InputError(f"Queried vertex {v} is outside 0..{self.n - 1}")
        self.query_count += r
        points = (self.lattice.coordinates[v] + self._rng.random((r, self.truth.d))) / self.lattice.w
        labels = np.where(self.truth.contains(points), POSITIVE, NEGATIVE)
        flips = self._rng.random(r) < self.truth.flip_prob
        return np.where(flips, -labels, labels)

    def query(self, v: int) -> int:
        return int(self._draw(v, 1)[0])

    def majority_query(self, v: int, r: int) -> int:
        if r < 1:
            raise InputError(f"Repetition count must be at least 1, got {r}")
        return majority_label(self._draw(v, r))


def geometric_oracle(truth: GeometricTruth, w: int, seed: int = 0) -> GeometricOracle:
    return GeometricOracle(truth, w, seed)


# --- chained block family -------------------------------------------------

@dataclass(frozen=True)
class ChainFamilySpec:
    """
    p blocks in a chain, each two hubs joined by r disjoint paths of (k - 1) / 2
    internal vertices; the n - p * block_size leftover vertices form a clique.
    """

    r: int
    k: int
    p: int
    n: int

    def __post_init__(self):
        if self.r < 1 or self.p < 1:
            raise InfeasibleParameterError(f"r and p must be positive, got r={self.r}, p={self.p}")
        if self.k < 3 or self.k % 2 == 0:
            raise InfeasibleParameterError(f"k must be odd and at least 3, got {self.k}")
        if self.n < self.chain_vertices:
            raise InfeasibleParameterError(f"n={self.n} is smaller than the {self.chain_vertices} chain vertices")

    @classmethod
    def from_parameters(cls, n: int, c: int, m: int, kappa: int) -> "ChainFamilySpec":
        """Family for a parameter tuple with 1 <= m <= c, c (kappa + 2) <= n and kappa >= 3."""
        if not (1 <= m <= c):
            raise InfeasibleParameterError(f"Need 1 <= m <= c, got m={m}, c={c}")
        if c * (kappa + 2) > n:
            raise InfeasibleParameterError(f"Need c (kappa + 2) <= n, got c={c}, kappa={kappa}, n={n}")
        if kappa < 3:
            raise InfeasibleParameterError(f"kappa must be at least 3, got {kappa}")
        r = c // m
        k = 2 * ((kappa - 1) // 2) + 1
        p = (2 * n) // (r * (k - 1) + 4)
        if p < m:
            raise InfeasibleParameterError(f"Only {p} blocks fit, fewer than m={m}")
        return cls(r=r, k=k, p=p, n=n)

    @property
    def internal(self) -> int:
        return (self.k - 1) // 2

    @property
    def block_size(self) -> int:
        return self.r * self.internal + 2

    @property
    def chain_vertices(self) -> int:
        return self.p * self.block_size

    @property
    def positions(self) -> int:
        """Cut positions on one hub-to-hub path."""
        return (self.k + 1) // 2

    def left_hub(self, block: int) -> int:
        return block * self.block_size

    def right_hub(self, block: int) -> int:
        return (block + 1) * self.block_size - 1

    def path(self, block: int, j: int) -> list[int]:
        """Hub-to-hub vertex sequence of path j in the given block."""
        first = self.left_hub(block) + 1 + j * self.internal
        return [self.left_hub(block), *range(first, first + self.internal), self.right_hub(block)]


def chain_family_graph(spec: ChainFamilySpec) -> Graph:
    pairs = []
    for block in range(spec.p):
        for j in range(spec.r):
            walk = spec.path(block, j)
            pairs.extend(zip(walk, walk[1:]))
        if block + 1 < spec.p:
            pairs.append((spec.right_hub(block), spec.left_hub(block + 1)))
    clique = range(spec.chain_vertices, spec.n)
    if len(clique):
        pairs.append((spec.chain_vertices - 1, clique[0]))
        pairs.extend(itertools.combinations(clique, 2))
    return Graph.from_edges(spec.n, pairs)


def chain_family_size(spec: ChainFamilySpec, m: int) -> int:
    return math.comb(spec.p, m) * spec.positions ** (m * spec.r)


def enumerate_chain_labelings(spec: ChainFamilySpec, m: int, validate: bool = True) -> list[Labeling]:
    """
    Every labeling that cuts each path of m chosen blocks exactly once, the
    leftmost vertex labeled +1. Each one is checked to have m cut components,
    m * r cut edges and kappa* <= k unless validate is False.
    """
    if not (0 <= m <= spec.p):
        raise InputError(f"m must lie in 0..{spec.p}, got {m}")
    total = chain_family_size(spec, m)
    if total > MAX_ENUMERATION:
        raise InputError(f"{total} labelings exceed the enumeration limit of {MAX_ENUMERATION}")
    g = chain_family_graph(spec) if validate else None
    labelings = []
    for chosen in itertools.combinations(range(spec.p), m):
        for cuts in itertools.product(range(spec.positions), repeat=m * spec.r):
            labeling = chain_labeling(spec, chosen, cuts)
            if validate:
                _check_chain_labeling(g, labeling, spec, m)
            labelings.append(labeling)
    logger.info(f"Enumerated {len(labelings)} chain labelings for {spec} with m={m}")
    return labelings


def chain_labeling(spec: ChainFamilySpec, chosen, cuts) -> Labeling:
    """
    Labeling that cuts every path of the chosen blocks once, at the given positions
    (one per path, block by block, each in 0..positions-1). The leftmost vertex is +1.
    """
    chosen = sorted(set(chosen))
    if any(not (0 <= block < spec.p) for block in chosen):
        raise InputError(f"Chosen blocks must lie in 0..{spec.p - 1}, got {chosen}")
    cuts = list(cuts)
    if len(cuts) != len(chosen) * spec.r or any(not (0 <= t < spec.positions) for t in cuts):
        raise InputError(f"Need {len(chosen) * spec.r} cut positions in 0..{spec.positions - 1}")
    labels = [POSITIVE] * spec.n
    sign, used = POSITIVE, 0
    for block in range(spec.p):
        for j in range(spec.r):
            walk = spec.path(block, j)
            split = cuts[used] + 1 if block in chosen else len(walk)
            for v in walk[:split]:
                labels[v] = sign
            for v in walk[split:]:
                labels[v] = -sign
            if block in chosen:
                used += 1
        if block in chosen:
            sign = -sign
    for v in range(spec.chain_vertices, spec.n):
        labels[v] = sign
    return Labeling.from_sequence(labels)


def _check_chain_labeling(g: Graph, labeling: Labeling, spec: ChainFamilySpec, m: int) -> None:
    structure = cut_structure(g, labeling)
    if structure.m != m or structure.cut_size != m * spec.r:
        raise GenerationError(
            f"Chain labeling has {structure.m} cut components and {structure.cut_size} cuts, "
            f"expected {m} and {m * spec.r}"
        )
    if m and structure.kappa_star() > spec.k:
        raise GenerationError(f"Chain labeling is {structure.kappa_star()}-clustered, above k={spec.k}")


# --- feature graphs ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    classes: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InputError(f"Feature matrix must be two-dimensional, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InputError("Feature matrix contains non-finite entries")
        if self.classes is not None and len(self.classes) != values.shape[0]:
            raise InputError("Class column length does not match the number of rows")
        object.__setattr__(self, "values", values)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    def labeling(self, positive_class, ids: Optional[tuple[int, ...]] = None) -> Labeling:
        """+1 for rows of positive_class, -1 otherwise, optionally restricted to ids."""
        if self.classes is None:
            raise InputError("Feature file has no class column")
        classes = self.classes if ids is None else self.classes[list(ids)]
        return Labeling.from_sequence(np.where(classes == positive_class, POSITIVE, NEGATIVE).tolist())


def knn_graph(features: FeatureMatrix, k: int) -> Graph:
    """Symmetrized k-nearest-neighbor graph under Euclidean distance; ties go to the lower index."""
    if k < 1:
        raise InputError(f"k must be at least 1, got {k}")
    n = features.rows
    if n < 2:
        return Graph.from_edges(n, [])
    distances = cdist(features.values, features.values)
    np.fill_diagonal(distances, np.inf)
    nearest = np.argsort(distances, axis=1, kind="stable")[:, : min(k, n - 1)]
    pairs = {(min(i, j), max(i, j)) for i, row in enumerate(nearest.tolist()) for j in row}
    return Graph.from_edges(n, sorted(pairs))


def threshold_graph(features: FeatureMatrix, t: float) -> Graph:
    """Edge between every two rows at Euclidean distance at most t."""
    if t < 0:
        raise InputError(f"Threshold must be non-negative, got {t}")
    distances = cdist(features.values, features.values)
    rows, cols = np.nonzero(np.triu(distances <= t, k=1))
    return Graph.from_edges(features.rows, zip(rows.tolist(), cols.tolist()))


def largest_component_ids(g: Graph) -> tuple[int, ...]:
    """Vertices of the largest component; ties go to the one holding the smallest id."""
    blocks = connected_components(g)
    if not blocks:
        return ()
    return max(blocks, key=lambda block: (len(block), -block[0]))


def largest_component(g: Graph) -> Graph:
    sub, _ = induced_subgraph(g, largest_component_ids(g))
    return sub
