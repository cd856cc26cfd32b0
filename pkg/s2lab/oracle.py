"""
Label oracles.

A noisy oracle returns the true label of a vertex, flipped independently with
probability gamma on every call. `majority_query` is the noise tolerant wrapper:
ask r times, answer with the majority, and `repetitions_needed` gives the r that
keeps the chance of any wrong majority among n vertices below epsilon.
"""
import logging
import math
from typing import Protocol, runtime_checkable

import numpy as np

from .config import CEIL_TOLERANCE
from .exceptions import InfeasibleNoiseError, InfeasibleParameterError, InputError
from .graph_core import NEGATIVE, POSITIVE, Labeling

logger = logging.getLogger(__name__)


@runtime_checkable
class Oracle(Protocol):
    """What the engine needs from anything that answers label queries."""

    n: int
    query_count: int

    def query(self, v: int) -> int: ...

    def majority_query(self, v: int, r: int) -> int: ...


def majority_label(votes: np.ndarray) -> int:
    """Majority of a +1/-1 vote vector, ties going to +1."""
    return POSITIVE if int(votes.sum()) >= 0 else NEGATIVE


class NoisyOracle:
    """
    Gamma-noisy oracle over a total ground-truth labeling.

    Args:
        truth: total labeling f
        flip_prob: probability gamma in [0, 0.5) of returning -f(v)
        seed: seed of the PCG64 generator behind every flip

    `query_count` counts raw queries; a majority query of r repetitions adds r.
    """

    def __init__(self, truth: Labeling, flip_prob: float = 0.0, seed: int = 0):
        if not truth.is_total:
            raise InputError("Oracle ground truth must label every vertex")
        if not (0.0 <= flip_prob < 0.5):
            raise InfeasibleNoiseError(f"Flip probability must lie in [0, 0.5), got {flip_prob}")
        self.truth = truth
        self.n = truth.n
        self.flip_prob = float(flip_prob)
        self.seed = int(seed)
        self.query_count = 0
        self._labels = truth.as_array()
        self._rng = np.random.default_rng(self.seed)

    def __repr__(self) -> str:
        return f"NoisyOracle(n={self.n}, flip_prob={self.flip_prob}, seed={self.seed})"

    def _check(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise InputError(f"Queried vertex {v} is outside 0..{self.n - 1}")

    def query(self, v: int) -> int:
        self._check(v)
        self.query_count += 1
        # always draw, so the transcript depends only on the request sequence
        flipped = self._rng.random() < self.flip_prob
        label = int(self._labels[v])
        return -label if flipped else label

    def majority_query(self, v: int, r: int) -> int:
        """Ask r times and return the majority answer (ties to +1; prefer odd r)."""
        self._check(v)
        if r < 1:
            raise InputError(f"Repetition count must be at least 1, got {r}")
        self.query_count += r
        flips = self._rng.random(r) < self.flip_prob
        votes = np.where(flips, -self._labels[v], self._labels[v])
        return majority_label(votes)


def repetitions_needed(gamma: float, n: float, epsilon: float) -> int:
    """
    Repetitions per logical query so that all n majority votes are right with
    probability at least 1 - epsilon: ceil(ln(n / epsilon) / (2 (0.5 - gamma)^2)).
    """
    if gamma >= 0.5:
        raise InfeasibleNoiseError(f"Majority voting needs gamma < 0.5, got {gamma}")
    if gamma < 0:
        raise InfeasibleParameterError(f"gamma must be non-negative, got {gamma}")
    if n < 1:
        raise InfeasibleParameterError(f"n must be at least 1, got {n}")
    if not (0 < epsilon <= 1):
        raise InfeasibleParameterError(f"epsilon must lie in (0, 1], got {epsilon}")
    value = math.log(n / epsilon) / (2 * (0.5 - gamma) ** 2)
    return max(1, math.ceil(value - CEIL_TOLERANCE))


def chernoff_error_bound(gamma: float, r: int) -> float:
    """Upper bound exp(-2 r (0.5 - gamma)^2) on a single majority vote being wrong."""
    return math.exp(-2 * r * (0.5 - gamma) ** 2)
