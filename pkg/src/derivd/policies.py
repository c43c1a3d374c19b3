"""Storage decision procedures.

Online caches (capacity in entries, all misses admitted):

* lru        - evict the least recently used entry.
* lfu        - evict the smallest in-cache access count (counts start at 1 on
               admission and reset on eviction, ties broken by older
               admission), the textbook cache-simulator LFU.
* freqdepth  - evict the smallest (frequency estimate x derivation depth).
               The estimate is a global exponentially decayed counter kept
               for every query, resident or not; an oracle mode can use true
               workload weights instead.

Offline selectors:

* truemi_select     - lazy greedy maximization of served mutual information
                      under an entry budget; frequency-blind when handed a
                      uniform distribution.
* threshold_decide  - store a query when frequency x depth / content clears
                      a log-of-KB-size threshold.
* stratify_queries  - split queries into store / hybrid / compute classes
                      around the critical frequency.

Cache state is single-owner mutable; never share one cache between streams.
"""

from __future__ import annotations

import heapq
import math
from collections import OrderedDict
from dataclasses import dataclass, field

from .kb import KnowledgeBase, Query, proof_tree_atoms
from .metrics import LN2, InfoModel, nats_to_bits, semantic_content
from .plan import EMPTY_PLAN, StoragePlan, make_plan
from .thermo import critical_frequency
from .workload import QueryDistribution

DEFAULT_FREQ_DECAY = 0.9999  # per-step multiplicative decay of the counters


@dataclass(frozen=True)
class PolicyKind:
    variant: str  # lru | lfu | freqdepth | truemi | threshold
    tau_scale: float = 1.0
    freq_decay: float = DEFAULT_FREQ_DECAY
    oracle_freq: bool = False

    def __post_init__(self) -> None:
        if self.variant not in ("lru", "lfu", "freqdepth", "truemi", "threshold"):
            raise ValueError("unknown policy variant %r" % self.variant)
        if self.variant == "threshold" and self.tau_scale <= 0:
            raise ValueError("threshold policy needs tau_scale > 0")
        if not (0.0 < self.freq_decay <= 1.0):
            raise ValueError("freq_decay must be in (0, 1]")


@dataclass(frozen=True)
class StepResult:
    hit: bool
    evicted: int | None


@dataclass(frozen=True)
class RoutingDecision:
    route: str  # storage | compute | hybrid

    def __post_init__(self) -> None:
        if self.route not in ("storage", "compute", "hybrid"):
            raise ValueError("unknown route %r" % self.route)


def route_query(kb: KnowledgeBase, q: Query, plan: StoragePlan) -> RoutingDecision:
    """Serve from storage only on an exact answer hit; hybrid when stored
    facts cover part of the derivation; compute otherwise."""
    if plan.covers_query(q.query_id):
        return RoutingDecision("storage")
    trace = proof_tree_atoms(kb, q.target, kb.base_facts)
    if trace & plan.covered_atoms():
        return RoutingDecision("hybrid")
    return RoutingDecision("compute")


class _Cache:
    """Shared bookkeeping: resident set keyed by query_id."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("cache capacity must be at least 1")
        self.capacity = capacity
        self.t = 0

    def __contains__(self, query_id: int) -> bool:
        raise NotImplementedError

    def step(self, query_id: int, depth: int) -> StepResult:
        raise NotImplementedError


class LRUCache(_Cache):
    def __init__(self, capacity: int):
        super().__init__(capacity)
        self._recency: OrderedDict[int, None] = OrderedDict()

    def __contains__(self, query_id: int) -> bool:
        return query_id in self._recency

    def step(self, query_id: int, depth: int) -> StepResult:
        self.t += 1
        if query_id in self._recency:
            self._recency.move_to_end(query_id)
            return StepResult(hit=True, evicted=None)
        evicted = None
        if len(self._recency) >= self.capacity:
            evicted, _ = self._recency.popitem(last=False)
        self._recency[query_id] = None
        return StepResult(hit=False, evicted=evicted)


class LFUCache(_Cache):
    def __init__(self, capacity: int):
        super().__init__(capacity)
        self._count: dict[int, int] = {}
        self._admitted: dict[int, int] = {}

    def __contains__(self, query_id: int) -> bool:
        return query_id in self._count

    def step(self, query_id: int, depth: int) -> StepResult:
        self.t += 1
        if query_id in self._count:
            self._count[query_id] += 1
            return StepResult(hit=True, evicted=None)
        evicted = None
        if len(self._count) >= self.capacity:
            evicted = min(self._count, key=lambda k: (self._count[k], self._admitted[k]))
            del self._count[evicted]
            del self._admitted[evicted]
        self._count[query_id] = 1
        self._admitted[query_id] = self.t
        return StepResult(hit=False, evicted=evicted)


class FreqDepthCache(_Cache):
    def __init__(
        self,
        capacity: int,
        depths: dict[int, int],
        decay: float = DEFAULT_FREQ_DECAY,
        oracle_freqs: dict[int, float] | None = None,
    ):
        super().__init__(capacity)
        self._depths = depths
        self._oracle = oracle_freqs
        self._log_decay = math.log(decay) if decay < 1.0 else 0.0
        self._resident: set[int] = set()
        self._counter: dict[int, tuple[float, int]] = {}  # qid -> (value, last t)

    def __contains__(self, query_id: int) -> bool:
        return query_id in self._resident

    def _bump(self, query_id: int) -> None:
        value, last = self._counter.get(query_id, (0.0, self.t))
        self._counter[query_id] = (value * math.exp(self._log_decay * (self.t - last)) + 1.0, self.t)

    def _score(self, query_id: int) -> float:
        if self._oracle is not None:
            freq = self._oracle[query_id]
        else:
            value, last = self._counter[query_id]
            freq = value * math.exp(self._log_decay * (self.t - last))
        return freq * self._depths[query_id]

    def step(self, query_id: int, depth: int) -> StepResult:
        self.t += 1
        self._depths.setdefault(query_id, depth)
        if self._oracle is None:
            self._bump(query_id)
        if query_id in self._resident:
            return StepResult(hit=True, evicted=None)
        evicted = None
        if len(self._resident) >= self.capacity:
            evicted = min(self._resident, key=lambda k: (self._score(k), k))
            self._resident.discard(evicted)
        self._resident.add(query_id)
        return StepResult(hit=False, evicted=evicted)


def make_cache(
    policy: PolicyKind,
    capacity: int,
    depths: dict[int, int] | None = None,
    oracle_freqs: dict[int, float] | None = None,
) -> _Cache:
    if policy.variant == "lru":
        return LRUCache(capacity)
    if policy.variant == "lfu":
        return LFUCache(capacity)
    if policy.variant == "freqdepth":
        return FreqDepthCache(
            capacity,
            depths=dict(depths or {}),
            decay=policy.freq_decay,
            oracle_freqs=oracle_freqs if policy.oracle_freq else None,
        )
    raise ValueError("policy %r is offline; build a StoragePlan instead" % policy.variant)


def cache_step(state: _Cache, q: Query | int, depth: int) -> StepResult:
    """One access against a mutable cache; hit iff present before the step."""
    qid = q.query_id if isinstance(q, Query) else q
    return state.step(qid, depth)


# ---------------------------------------------------------------------------
# Plan builders and offline selectors
# ---------------------------------------------------------------------------


def plan_from_queries(
    kb: KnowledgeBase,
    queries: list[Query],
    model: InfoModel,
    capacity_entries: int | None = None,
) -> StoragePlan:
    """Answer-entry plan; each entry is priced at its query's full content."""
    bits = sum(nats_to_bits(semantic_content(kb, q, model)) for q in queries)
    return make_plan(answers=tuple(queries), capacity_entries=capacity_entries, total_bits=bits)


def plan_from_atoms(
    kb: KnowledgeBase,
    atoms: set[int] | frozenset[int],
    model: InfoModel,
    capacity_entries: int | None = None,
) -> StoragePlan:
    bits = len(atoms) * model.atom_bits(kb)
    return make_plan(atoms=frozenset(atoms), capacity_entries=capacity_entries, total_bits=bits)


def top_frequency_plan(
    kb: KnowledgeBase, dist: QueryDistribution, count: int, model: InfoModel
) -> StoragePlan:
    """Store the `count` heaviest queries (ties broken by query_id)."""
    count = max(0, min(count, len(dist)))
    if count == 0:
        return EMPTY_PLAN
    order = sorted(
        range(len(dist)), key=lambda i: (-float(dist.probs[i]), dist.queries[i].query_id)
    )
    return plan_from_queries(kb, [dist.queries[i] for i in order[:count]], model)


def truemi_select(
    kb: KnowledgeBase,
    candidates: list[Query],
    dist: QueryDistribution,
    model: InfoModel,
    budget: int,
) -> StoragePlan:
    """Greedy storage selection maximizing served mutual information.

    Lazy evaluation: stale marginal gains sit in a max-heap and are
    recomputed only when they surface; submodularity keeps that sound.
    Selection is by answer entries only and ties break on query_id.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if not candidates:
        return EMPTY_PLAN

    w = model.atom_bits(kb) * LN2
    traces = {
        q.query_id: proof_tree_atoms(kb, q.target, kb.base_facts)
        for q in set(candidates) | set(dist.queries)
    }

    weights = {q.query_id: float(f) for q, f in zip(dist.queries, dist.probs)}
    by_id = {q.query_id: q for q in candidates}
    # target atom -> dist queries whose trace contains it
    users: dict[int, list[int]] = {}
    for q in dist.queries:
        for a in traces[q.query_id]:
            users.setdefault(a, []).append(q.query_id)

    covered_atoms: set[int] = set()
    answered: set[int] = set()

    def marginal(cand: Query) -> float:
        gain = 0.0
        if cand.query_id in weights and cand.query_id not in answered:
            uncovered = len(traces[cand.query_id] - covered_atoms)
            gain += weights[cand.query_id] * uncovered * w
        if cand.target not in covered_atoms:
            for uid in users.get(cand.target, ()):
                if uid not in answered and uid != cand.query_id:
                    gain += weights[uid] * w
        return gain

    heap: list[tuple[float, int]] = []
    for q in candidates:
        heapq.heappush(heap, (-marginal(q), q.query_id))

    chosen: list[Query] = []
    while heap and len(chosen) < budget:
        neg_gain, qid = heapq.heappop(heap)
        fresh = marginal(by_id[qid])
        if heap and -heap[0][0] > fresh + 1e-15:
            heapq.heappush(heap, (-fresh, qid))
            continue
        q = by_id[qid]
        chosen.append(q)
        answered.add(qid)
        covered_atoms.add(q.target)
    return plan_from_queries(kb, chosen, model, capacity_entries=budget)


def threshold_decide(
    f_q: float, depth: int, h_q: float, atom_count: int, tau_scale: float = 1.0
) -> bool:
    """Store iff f_q * depth / h_q clears tau_scale * ln(atom_count).

    f_q is an access rate (expected accesses per amortization window, may
    exceed 1), matching the rate reading of amortized cost.
    """
    if h_q <= 0:
        raise ValueError("h_q must be positive")
    if atom_count < 2:
        raise ValueError("atom_count must be at least 2")
    return f_q * depth / h_q > tau_scale * math.log(atom_count)


def stratify_queries(
    freqs: dict[int, float],
    atom_count: int,
    c: float = 1.0,
    eps_scale: float = 1.0,
) -> dict[int, str]:
    """Partition queries around the critical frequency into 'high' (store),
    'medium' (hybrid) and 'low' (compute) classes.

    freqs are access rates per amortization window (not normalized
    probabilities; the break-even point sits above 1 access).
    """
    f_c = critical_frequency(atom_count, c)
    eps = eps_scale / (math.log(atom_count) ** 2)
    out = {}
    for qid, f in freqs.items():
        if f > f_c + eps:
            out[qid] = "high"
        elif f < f_c - eps:
            out[qid] = "low"
        else:
            out[qid] = "medium"
    return out
