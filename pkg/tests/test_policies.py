import itertools
import math

import numpy as np
import pytest

from derivd.kb import Query, generate_kb, sample_queries
from derivd.metrics import InfoModel, mutual_info, semantic_content
from derivd.policies import (
    PolicyKind,
    cache_step,
    make_cache,
    plan_from_queries,
    stratify_queries,
    threshold_decide,
    top_frequency_plan,
    truemi_select,
)
from derivd.simulator import SimConfig, run_stream
from derivd.thermo import critical_frequency
from derivd.workload import WorkloadSpec, build_distribution


def drive(cache, stream, depths=None):
    out = []
    for qid in stream:
        d = depths.get(qid, 1) if depths else 1
        out.append(cache_step(cache, qid, d))
    return out


# --- cache basics -------------------------------------------------------------


def test_lru_capacity_one_thrashes():
    cache = make_cache(PolicyKind("lru"), capacity=1)
    hits = [r.hit for r in drive(cache, ["a", "b", "a"])]
    assert hits == [False, False, False]


def test_lru_capacity_two_keeps_both():
    cache = make_cache(PolicyKind("lru"), capacity=2)
    hits = [r.hit for r in drive(cache, ["a", "b", "a"])]
    assert hits == [False, False, True]


def test_lru_evicts_least_recent():
    cache = make_cache(PolicyKind("lru"), capacity=2)
    results = drive(cache, [1, 2, 1, 3])
    assert results[-1].evicted == 2  # 1 was refreshed, so 2 goes


def test_lfu_evicts_least_frequent_then_older():
    cache = make_cache(PolicyKind("lfu"), capacity=2)
    drive(cache, [1, 1, 2])
    res = drive(cache, [3])[0]
    assert res.evicted == 2  # count(1)=2 beats count(2)=1
    cache2 = make_cache(PolicyKind("lfu"), capacity=2)
    drive(cache2, [1, 2])  # equal counts, 1 admitted earlier
    assert drive(cache2, [3])[0].evicted == 1


def test_freqdepth_prefers_keeping_deep_items():
    depths = {1: 10, 2: 1, 3: 5}
    cache = make_cache(PolicyKind("freqdepth"), capacity=2, depths=depths)
    drive(cache, [1, 2], depths)  # equal frequency; 2 is shallow
    assert drive(cache, [3], depths)[0].evicted == 2


def test_freqdepth_tie_breaks_on_lower_query_id():
    # decay 1.0 keeps the counts exactly tied so only the id decides
    depths = {7: 3, 9: 3, 11: 3}
    cache = make_cache(PolicyKind("freqdepth", freq_decay=1.0), capacity=2, depths=depths)
    drive(cache, [9, 7], depths)
    assert drive(cache, [11], depths)[0].evicted == 7


def test_cache_accounting_identities():
    rng = np.random.default_rng(3)
    stream = [int(q) for q in rng.integers(0, 40, size=2000)]
    depths = {q: int(rng.integers(1, 9)) for q in range(40)}
    for variant in ("lru", "lfu", "freqdepth"):
        cache = make_cache(PolicyKind(variant), capacity=8, depths=depths)
        results = drive(cache, stream, depths)
        hits = sum(r.hit for r in results)
        misses = sum(not r.hit for r in results)
        assert hits + misses == len(stream)
        resident = sum(not r.hit for r in results) - sum(r.evicted is not None for r in results)
        assert 0 <= resident <= 8


def test_cache_replay_is_bit_for_bit_deterministic():
    rng = np.random.default_rng(5)
    stream = [int(q) for q in rng.integers(0, 30, size=1500)]
    depths = {q: int(rng.integers(1, 9)) for q in range(30)}
    for variant in ("lru", "lfu", "freqdepth"):
        runs = []
        for _ in range(2):
            cache = make_cache(PolicyKind(variant), capacity=6, depths=depths)
            runs.append([(r.hit, r.evicted) for r in drive(cache, stream, depths)])
        assert runs[0] == runs[1]


# --- greedy selection ------------------------------------------------------------


def _brute_force_best(kb, candidates, dist, model, budget):
    best = 0.0
    for subset in itertools.combinations(candidates, min(budget, len(candidates))):
        value = mutual_info(kb, plan_from_queries(kb, list(subset), model), dist, model)
        best = max(best, value)
    return best


def test_greedy_meets_submodular_guarantee_on_100_instances():
    model = InfoModel()
    ratio_floor = 1 - 1 / math.e - 1e-9
    worst = 1.0
    for seed in range(100):
        kb = generate_kb(40, 100, 2.0, 3, seed)
        n_cand = 8 + seed % 5  # 8..12 candidates
        queries = sample_queries(kb, n_cand, seed)
        dist = build_distribution(
            WorkloadSpec(kind="zipf", alpha=1.0 + (seed % 3) * 0.4, query_count=n_cand), queries
        )
        budget = 3 + seed % 2
        plan = truemi_select(kb, list(queries), dist, model, budget)
        greedy_value = mutual_info(kb, plan, dist, model)
        opt = _brute_force_best(kb, queries, dist, model, budget)
        assert greedy_value >= ratio_floor * opt
        if opt > 0:
            worst = min(worst, greedy_value / opt)
    assert worst >= ratio_floor


def test_budget_covering_all_candidates_selects_all():
    kb = generate_kb(40, 100, 2.0, 3, 1)
    queries = sample_queries(kb, 6, 1)
    dist = build_distribution(WorkloadSpec(kind="uniform", query_count=6), queries)
    plan = truemi_select(kb, list(queries), dist, InfoModel(), budget=50)
    assert plan.n_entries == 6


def test_empty_candidates_give_empty_plan():
    kb = generate_kb(40, 100, 2.0, 3, 1)
    queries = sample_queries(kb, 4, 1)
    dist = build_distribution(WorkloadSpec(kind="uniform", query_count=4), queries)
    plan = truemi_select(kb, [], dist, InfoModel(), budget=3)
    assert plan.n_entries == 0


def test_greedy_selection_is_deterministic():
    kb = generate_kb(60, 150, 3.0, 3, 9)
    queries = sample_queries(kb, 12, 9)
    dist = build_distribution(WorkloadSpec(kind="zipf", alpha=1.2, query_count=12), queries)
    p1 = truemi_select(kb, list(queries), dist, InfoModel(), budget=4)
    p2 = truemi_select(kb, list(queries), dist, InfoModel(), budget=4)
    assert p1.fingerprint == p2.fingerprint


# --- threshold policy ------------------------------------------------------------


def test_routing_decision_tracks_plan_contents():
    from derivd.policies import route_query
    from derivd.plan import EMPTY_PLAN

    kb = generate_kb(60, 150, 3.0, 3, 2)
    queries = sample_queries(kb, 6, 2)
    model = InfoModel()
    q = queries[0]
    assert route_query(kb, q, EMPTY_PLAN).route == "compute"
    assert route_query(kb, q, plan_from_queries(kb, [q], model)).route == "storage"
    from derivd.kb import proof_tree_atoms
    from derivd.policies import plan_from_atoms

    some_atom = next(iter(proof_tree_atoms(kb, q.target, kb.base_facts)))
    assert route_query(kb, q, plan_from_atoms(kb, {some_atom}, model)).route == "hybrid"


def test_zero_frequency_never_stores():
    assert not threshold_decide(0.0, 10, 5.0, 1000)


def test_deep_rare_vs_shallow_frequent_flip_with_tau():
    # rare-but-deep scores 2*40/20 = 4.0, frequent-but-shallow 30*2/20 = 3.0;
    # raising tau across [3.0, 4.0] drops the shallow one first
    h = 20.0
    atoms = 1000
    low_tau, high_tau = 2.5 / math.log(atoms), 3.5 / math.log(atoms)
    assert threshold_decide(2, 40, h, atoms, low_tau) and threshold_decide(30, 2, h, atoms, low_tau)
    assert threshold_decide(2, 40, h, atoms, high_tau) and not threshold_decide(
        30, 2, h, atoms, high_tau
    )


def test_threshold_grows_with_kb_size():
    # same query flips store -> compute as the universe grows 1e3 -> 1e6
    rate, depth, h = 12.0, 5.0, 8.0
    assert threshold_decide(rate, depth, h, 10**3)
    assert not threshold_decide(rate, depth, h, 10**6)


# --- stratification -----------------------------------------------------------------


def test_all_rates_at_critical_frequency_are_medium():
    f_c = critical_frequency(1000)
    strata = stratify_queries({i: f_c for i in range(5)}, 1000)
    assert set(strata.values()) == {"medium"}


def test_two_point_straddle():
    f_c = critical_frequency(1000)
    eps = 1.0 / math.log(1000) ** 2
    strata = stratify_queries({0: f_c + 2 * eps, 1: f_c - 2 * eps}, 1000)
    assert strata == {0: "high", 1: "low"}


def test_zipf_head_lands_in_high_class():
    # 10k accesses over 1000 queries: the head clears the break-even rate by
    # orders of magnitude while the tail falls below one access
    queries = [Query(i, i) for i in range(1000)]
    dist = build_distribution(WorkloadSpec(kind="zipf", alpha=1.5, query_count=1000), queries)
    rates = {q.query_id: float(f) * 10_000 for q, f in zip(dist.queries, dist.probs)}
    strata = stratify_queries(rates, 1000)
    assert strata[0] == "high"
    assert any(v == "low" for v in strata.values())


# --- qualitative policy ordering ------------------------------------------------------


def test_freqdepth_dominates_at_five_percent_capacity(medium_system):
    kb, queries = medium_system
    model = InfoModel()
    uniform = build_distribution(
        WorkloadSpec(kind="uniform", query_count=len(queries)), queries
    )
    for alpha in (1.2, 1.5):
        dist = build_distribution(
            WorkloadSpec(kind="zipf", alpha=alpha, query_count=len(queries)), queries
        )
        capacity = len(queries) // 20
        truemi = truemi_select(kb, list(queries), uniform, model, budget=capacity)
        rates = {}
        for seed in (0, 1, 2):
            hit = {}
            for variant in ("lru", "lfu", "freqdepth"):
                cfg = SimConfig(
                    kb=kb, dist=dist, stream_length=20_000, seed=seed,
                    policy=PolicyKind(variant), capacity=capacity, model=model,
                )
                hit[variant] = run_stream(cfg).hit_rate
            hit["truemi"] = run_stream(
                SimConfig(kb=kb, dist=dist, stream_length=20_000, seed=seed,
                          static_plan=truemi, model=model)
            ).hit_rate
            assert hit["freqdepth"] >= hit["lfu"] >= hit["lru"] > hit["truemi"], (alpha, seed, hit)
