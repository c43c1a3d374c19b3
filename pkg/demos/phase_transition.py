"""Walkthrough: the storage-utility knee.

Sweeping the stored fraction of a skewed workload from nothing to everything,
mean latency collapses steeply while the head of the distribution fills the
cache, then flattens: past the knee each extra stored answer buys almost
nothing. The detector localizes the knee from the discrete curvature.

Run:  python3 demos/phase_transition.py
"""

from derivd import EMPTY_PLAN, SimConfig, WorkloadSpec
from derivd import build_distribution, detect_transition, generate_kb, sample_queries, sweep_storage

kb = generate_kb(atom_count=2000, rule_count=5000, target_mean_depth=5.0, max_arity=3, seed=42)
queries = sample_queries(kb, 1000, seed=42)
dist = build_distribution(WorkloadSpec(kind="zipf", alpha=1.2, query_count=1000), queries)

betas = [round(0.05 * i, 2) for i in range(21)]
template = SimConfig(kb=kb, dist=dist, stream_length=100_000, seed=42,
                     static_plan=EMPTY_PLAN, warmup_frac=0.0)
sweep = sweep_storage(template, betas)
knee = detect_transition(sweep)

print("stored fraction -> mean latency (51 chars = latency 5)")
for beta, point in zip(sweep.betas, sweep.points):
    bar = "#" * round(10 * point.mean_latency)
    marker = "  <- knee" if knee is not None and beta == knee else ""
    print("  %4.2f  %6.3f  %s%s" % (beta, point.mean_latency, bar, marker))

print()
print("steepest-to-flattest curvature at beta = %s" % knee)
print("hit rate there: %.1f%%" % (100 * sweep.points[sweep.betas.index(knee)].hit_rate))
