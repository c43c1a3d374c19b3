"""Stream simulator: replays seeded query streams against a storage strategy
and accounts hits, latency, compute steps and energy.

Latency model: a stored answer costs 1 unit, a miss costs the query's
derivation depth from the knowledge base. The first warmup fraction of the
stream is excluded from hit-rate and latency statistics (online policies
need their counters primed) but still drives energy and compute accounting,
so hits + misses always equals the stream length.

Static plans are replayed with vectorized numpy masks; online policies run
the sequential cache loop to keep eviction order exact. Runs are pure
functions of their SimConfig, so sweeps can execute points in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .kb import KnowledgeBase, derivation_depths
from .metrics import LN2, InfoModel, bits_to_nats, nats_to_bits, semantic_content
from .plan import StoragePlan
from .policies import PolicyKind, make_cache, top_frequency_plan
from .thermo import ThermoParams, landauer_compute_energy, storage_maintenance_energy
from .workload import QueryDistribution, sample_index_stream


@dataclass(frozen=True)
class SimConfig:
    kb: KnowledgeBase
    dist: QueryDistribution
    stream_length: int
    seed: int
    policy: PolicyKind | None = None  # online policy ...
    static_plan: StoragePlan | None = None  # ... or a fixed storage plan
    capacity: int = 0  # entries, online policies only
    model: InfoModel = InfoModel()
    thermo: ThermoParams = ThermoParams()
    warmup_frac: float = 0.1

    def __post_init__(self) -> None:
        if (self.policy is None) == (self.static_plan is None):
            raise ValueError("configure exactly one of policy or static_plan")
        if self.policy is not None and self.capacity < 1:
            raise ValueError("online policies need capacity >= 1")
        if not (0.0 <= self.warmup_frac < 1.0):
            raise ValueError("warmup_frac must lie in [0, 1)")
        if self.stream_length < 1:
            raise ValueError("stream_length must be at least 1")


@dataclass(frozen=True)
class SimMetrics:
    hit_rate: float
    mean_latency: float
    total_compute_steps: int
    energy_j: float
    amortized_cost_nats: float
    hits: int
    misses: int
    stream_length: int
    measured_length: int
    storage_bits: float
    evictions: int = 0


@dataclass(frozen=True)
class SweepResult:
    betas: tuple[float, ...]
    points: tuple[SimMetrics, ...]
    gradient: tuple[float, ...]  # d(latency)/d(beta), one per adjacent pair


def _query_depths(cfg: SimConfig) -> np.ndarray:
    depth, _ = derivation_depths(cfg.kb, cfg.kb.base_facts)
    d = np.array([depth[q.target] for q in cfg.dist.queries], dtype=np.int64)
    if np.any(d < 0):
        raise ValueError("distribution contains underivable queries")
    return d


def _allocated_bits(cfg: SimConfig) -> float:
    if cfg.static_plan is not None:
        return cfg.static_plan.total_bits
    mean_answer_bits = float(
        np.mean([nats_to_bits(semantic_content(cfg.kb, q, cfg.model)) for q in cfg.dist.queries])
    )
    capacity = min(cfg.capacity, len(cfg.dist))
    return capacity * mean_answer_bits


def run_stream(cfg: SimConfig) -> SimMetrics:
    depths = _query_depths(cfg)
    stream = sample_index_stream(cfg.dist, cfg.stream_length, cfg.seed)
    warm = int(math.floor(cfg.warmup_frac * cfg.stream_length))
    evictions = 0

    if cfg.static_plan is not None:
        stored = np.array(
            [cfg.static_plan.covers_query(q.query_id) for q in cfg.dist.queries], dtype=bool
        )
        hit_mask = stored[stream]
    else:
        capacity = cfg.capacity
        if capacity > len(cfg.dist):
            import warnings

            warnings.warn(
                "capacity %d exceeds the query universe (%d); clamping" % (capacity, len(cfg.dist))
            )
            capacity = len(cfg.dist)
        depth_by_id = {q.query_id: int(d) for q, d in zip(cfg.dist.queries, depths)}
        oracle = {q.query_id: float(f) for q, f in zip(cfg.dist.queries, cfg.dist.probs)}
        cache = make_cache(cfg.policy, capacity, depths=depth_by_id, oracle_freqs=oracle)
        qids = np.array([q.query_id for q in cfg.dist.queries], dtype=np.int64)
        hit_mask = np.zeros(cfg.stream_length, dtype=bool)
        for i, idx in enumerate(stream):
            res = cache.step(int(qids[idx]), int(depths[idx]))
            hit_mask[i] = res.hit
            if res.evicted is not None:
                evictions += 1

    lat = np.where(hit_mask, 1.0, depths[stream].astype(np.float64))
    hits = int(hit_mask.sum())
    misses = cfg.stream_length - hits
    measured = cfg.stream_length - warm
    hits_measured = int(hit_mask[warm:].sum())
    total_compute = int(depths[stream][~hit_mask].sum())

    storage_bits = _allocated_bits(cfg)
    duration_s = cfg.stream_length * cfg.thermo.t_avg
    energy = landauer_compute_energy(total_compute, cfg.thermo) + storage_maintenance_energy(
        storage_bits, duration_s, cfg.thermo
    )
    amortized = (
        bits_to_nats(storage_bits) / cfg.stream_length
        + float(depths[stream][~hit_mask].sum()) * LN2 / cfg.stream_length
    )
    return SimMetrics(
        hit_rate=hits_measured / measured,
        mean_latency=float(lat[warm:].mean()),
        total_compute_steps=total_compute,
        energy_j=energy,
        amortized_cost_nats=amortized,
        hits=hits,
        misses=misses,
        stream_length=cfg.stream_length,
        measured_length=measured,
        storage_bits=storage_bits,
        evictions=evictions,
    )


def sweep_storage(cfg_template: SimConfig, betas: list[float]) -> SweepResult:
    """One run per storage fraction with a shared stream seed.

    Each beta stores the heaviest beta-fraction of distinct queries (oracle
    frequency order), so added capacity never loses a stored answer and the
    per-access latency is pointwise non-increasing in beta.
    """
    if any(not (0.0 <= b <= 1.0) for b in betas):
        raise ValueError("betas must lie in [0, 1]")
    if sorted(betas) != list(betas):
        raise ValueError("betas must be sorted ascending")
    points = []
    n = len(cfg_template.dist)
    for beta in betas:
        plan = top_frequency_plan(
            cfg_template.kb, cfg_template.dist, round(beta * n), cfg_template.model
        )
        cfg = replace(cfg_template, static_plan=plan, policy=None, capacity=0)
        points.append(run_stream(cfg))
    gradient = tuple(
        (points[i + 1].mean_latency - points[i].mean_latency) / (betas[i + 1] - betas[i])
        for i in range(len(betas) - 1)
        if betas[i + 1] > betas[i]
    )
    return SweepResult(betas=tuple(betas), points=tuple(points), gradient=gradient)


def detect_transition(sweep: SweepResult, noise_floor: float = 1e-6) -> float | None:
    """Knee of the latency curve: the interior beta maximizing the discrete
    second difference (steep-to-gradual change). None when the curve has no
    curvature above the noise floor (relative to the latency range)."""
    if len(sweep.betas) < 5:
        raise ValueError("need at least 5 sweep points to locate a knee")
    lat = np.array([p.mean_latency for p in sweep.points], dtype=np.float64)
    beta = np.array(sweep.betas, dtype=np.float64)
    slopes = np.diff(lat) / np.diff(beta)
    curvature = np.diff(slopes)  # positive where the descent flattens
    scale = max(float(lat.max() - lat.min()), 1e-300)
    best = int(np.argmax(curvature))
    if curvature[best] <= noise_floor * scale:
        return None
    return float(beta[best + 1])
