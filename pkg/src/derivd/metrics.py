"""Information measures over knowledge bases, workloads and storage plans.

Semantic content of a query is a computable stand-in for descriptive
complexity: the atoms of its minimal proof tree, priced at a fixed encoding
width per atom and converted to nats. Residual content counts the trace
atoms a plan does not cover, which makes plan->content gain a weighted
coverage function: monotone, submodular, and exact under the chain rule
``residual + per-query gain = content``.

Unit discipline: entropies are returned in the unit named by the function or
argument; converters are exact inverses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .kb import KnowledgeBase, Query, proof_tree_atoms
from .plan import StoragePlan
from .workload import QueryDistribution

LN2 = math.log(2.0)


def bits_to_nats(bits: float) -> float:
    return bits * LN2

def nats_to_bits(nats: float) -> float:
    return nats / LN2


@dataclass(frozen=True)
class InfoModel:
    """Knobs for the content proxy and bound checks.

    bits_per_atom defaults to ceil(log2(atom_count)) of the KB in use; the
    slack of the two-sided derivation bound is slack_scale * c * log2(m).
    """

    c: float = 1.0
    bits_per_atom: float | None = None
    content_mode: str = "structural"  # or "synthetic"
    synthetic_mean_atoms: float = 16.0
    synthetic_spread: float = 0.25
    seed: int = 0
    slack_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.bits_per_atom is not None and self.bits_per_atom < 1:
            raise ValueError("bits_per_atom must be at least 1")
        if self.content_mode not in ("structural", "synthetic"):
            raise ValueError("content_mode must be 'structural' or 'synthetic'")

    def atom_bits(self, kb: KnowledgeBase) -> float:
        if self.bits_per_atom is not None:
            return self.bits_per_atom
        return float(max(1, math.ceil(math.log2(kb.atom_count))))


@dataclass
class ContentEstimate:
    h_q: float  # nats
    residual: dict[str, float] = field(default_factory=dict)  # plan fingerprint -> nats


def shannon_entropy(dist: QueryDistribution, unit: str = "bits") -> float:
    """-sum f log f of the query weights, in bits or nats."""
    if unit not in ("bits", "nats"):
        raise ValueError("unit must be 'bits' or 'nats'")
    p = dist.probs
    h = float(-np.sum(p * np.log(p)))
    return h if unit == "nats" else nats_to_bits(h)


def derivation_entropy(depth: int) -> float:
    """Inference work in nats: one ln(2) nat per rule application."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return depth * LN2


def _synthetic_atoms(kb: KnowledgeBase, q: Query, model: InfoModel) -> float:
    key = np.array(
        [(model.seed ^ kb.generation_seed) & (2**64 - 1), 0xC0FFEE ^ q.query_id], dtype=np.uint64
    )
    g = np.random.Generator(np.random.Philox(key=key)).standard_normal()
    return max(1.0, model.synthetic_mean_atoms * math.exp(model.synthetic_spread * float(g)))


def semantic_content(kb: KnowledgeBase, q: Query, model: InfoModel) -> float:
    """Content of the query's answer in nats; raises for unanswerable queries."""
    bits = model.atom_bits(kb)
    if model.content_mode == "synthetic":
        return _synthetic_atoms(kb, q, model) * bits * LN2
    trace = proof_tree_atoms(kb, q.target, kb.base_facts)
    return len(trace) * bits * LN2


def residual_content(
    kb: KnowledgeBase,
    q: Query,
    storage: StoragePlan,
    model: InfoModel,
    estimate: ContentEstimate | None = None,
) -> float:
    """Content still missing after consulting storage, in nats.

    Zero when the plan stores the query's own answer; otherwise the content
    of the trace atoms not readable from storage. Never exceeds the query's
    full content and is monotone non-increasing as the plan grows.
    """
    if estimate is not None and storage.fingerprint in estimate.residual:
        return estimate.residual[storage.fingerprint]
    if storage.covers_query(q.query_id):
        value = 0.0
    elif model.content_mode == "synthetic":
        # No trace structure to share: only an exact answer hit helps.
        value = semantic_content(kb, q, model)
    else:
        trace = proof_tree_atoms(kb, q.target, kb.base_facts)
        uncovered = len(trace - storage.covered_atoms())
        value = uncovered * model.atom_bits(kb) * LN2
    if estimate is not None:
        estimate.residual[storage.fingerprint] = value
    return value


def content_estimate(kb: KnowledgeBase, q: Query, model: InfoModel) -> ContentEstimate:
    return ContentEstimate(h_q=semantic_content(kb, q, model))


def mutual_info(
    kb: KnowledgeBase,
    storage: StoragePlan,
    dist: QueryDistribution,
    model: InfoModel,
) -> float:
    """Expected content served from storage, sum_q f_q (H_q - H_q|S), in nats."""
    total = 0.0
    for q, f in zip(dist.queries, dist.probs):
        total += float(f) * (
            semantic_content(kb, q, model) - residual_content(kb, q, storage, model)
        )
    return total


def storage_efficiency(
    kb: KnowledgeBase,
    storage: StoragePlan,
    dist: QueryDistribution,
    model: InfoModel,
) -> float:
    """Served bits per stored bit, in [0, 1]."""
    if storage.total_bits <= 0:
        raise ValueError("storage_efficiency needs a plan with positive stored bits")
    eta = nats_to_bits(mutual_info(kb, storage, dist, model)) / storage.total_bits
    if eta > 1.0 + 1e-9:
        raise RuntimeError(
            "efficiency %.12f exceeds 1; storage pricing and coverage disagree" % eta
        )
    return min(eta, 1.0)


@dataclass(frozen=True)
class BoundsCheck:
    lower: float  # nats
    upper: float  # nats
    h_derive: float  # nats
    satisfied: bool


def derivation_bounds_check(h_q: float, depth: int, m: int, model: InfoModel) -> BoundsCheck:
    """Two-sided check tying inference work to content through the log of the
    knowledge size; slack term is slack_scale * c * log2(m)."""
    if m < 1 or depth < 0:
        raise ValueError("need m >= 1 and depth >= 0")
    if m + depth < 2:
        raise ValueError("m + depth must be at least 2 for the log denominators")
    log_md = math.log2(m + depth)
    slack = model.slack_scale * model.c * math.log2(max(m, 2))
    lower = h_q / (model.c * log_md) - slack
    upper = h_q * model.c * log_md / LN2 + slack
    h_derive = derivation_entropy(depth)
    return BoundsCheck(
        lower=lower, upper=upper, h_derive=h_derive, satisfied=lower <= h_derive <= upper
    )
