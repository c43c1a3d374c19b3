"""Query workloads: uniform / Zipf rank distributions and seeded streams.

Streams use numpy's Philox generator (counter-based, identical output for
identical seeds on every platform) through explicit inverse-CDF sampling, so
the draws do not depend on numpy's internal choice() implementation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kb import Query

STREAM_TAG = 0x57  # key lane separating stream draws from KB construction


@dataclass(frozen=True)
class WorkloadSpec:
    kind: str  # "uniform" | "zipf"
    alpha: float = 1.0
    query_count: int = 1
    stream_length: int = 100_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "zipf"):
            raise ValueError("workload kind must be 'uniform' or 'zipf'")
        if self.kind == "zipf" and not (0.5 <= self.alpha <= 3.0):
            raise ValueError("zipf alpha must lie in [0.5, 3.0]")
        if self.query_count < 1:
            raise ValueError("query_count must be at least 1")


@dataclass(frozen=True)
class QueryDistribution:
    queries: tuple[Query, ...]
    probs: np.ndarray = field(repr=False)
    kind: str = "uniform"
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if len(self.queries) != len(self.probs):
            raise ValueError("queries and probabilities differ in length")
        if len(self.queries) == 0:
            raise ValueError("empty distribution")
        total = float(np.sum(self.probs))
        if abs(total - 1.0) > 1e-9:
            raise ValueError("probabilities sum to %.12f, not 1" % total)
        if np.any(self.probs <= 0):
            raise ValueError("all probabilities must be positive")
        self.probs.setflags(write=False)

    def __len__(self) -> int:
        return len(self.queries)

    def weight_of(self, q: Query) -> float:
        return float(self.probs[self._index()[q.query_id]])

    def _index(self) -> dict[int, int]:
        return {q.query_id: i for i, q in enumerate(self.queries)}


def zipf_weights(n: int, alpha: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    w = ranks ** (-alpha)
    return w / w.sum()


def build_distribution(spec: WorkloadSpec, queries: list[Query]) -> QueryDistribution:
    """Rank 1 (largest weight) goes to the lowest query_id; uniform spreads evenly."""
    if not queries:
        raise ValueError("queries must be non-empty")
    ordered = tuple(sorted(queries, key=lambda q: q.query_id))
    n = len(ordered)
    if spec.kind == "uniform":
        probs = np.full(n, 1.0 / n)
        return QueryDistribution(ordered, probs, kind="uniform")
    return QueryDistribution(ordered, zipf_weights(n, spec.alpha), kind="zipf", alpha=spec.alpha)


def stream_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([seed & (2**64 - 1), STREAM_TAG], dtype=np.uint64))
    )


def sample_index_stream(dist: QueryDistribution, length: int, seed: int) -> np.ndarray:
    """i.i.d. draws from the distribution, returned as indices into dist.queries."""
    if length < 1:
        raise ValueError("stream length must be at least 1")
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0  # guard the last bin against rounding
    u = stream_rng(seed).random(length)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def sample_stream(dist: QueryDistribution, length: int, seed: int) -> list[Query]:
    idx = sample_index_stream(dist, length, seed)
    qs = dist.queries
    return [qs[int(i)] for i in idx]
