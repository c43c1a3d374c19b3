"""Walkthrough: the energy and cost formulas at familiar scales.

Run:  python3 demos/cost_calculator.py
"""

import numpy as np

from derivd import ThermoParams, Query, QueryDistribution
from derivd.thermo import (
    amortized_access_cost,
    capacity_bounds,
    critical_frequency,
    critical_storage,
    entropy_production_min,
    landauer_compute_energy,
    multi_query_costs,
    phase_alpha_critical,
    storage_maintenance_energy,
)

room = ThermoParams()  # 300 K, 1 s refresh

print("Landauer floor per inference step at 300 K: %.4e J" % landauer_compute_energy(1, room))
print("A million-step derivation:                  %.4e J" % landauer_compute_energy(1e6, room))
print("Holding 1e6 bits for ten refresh periods:   %.4e J"
      % storage_maintenance_energy(1e6, 10 * room.t_refresh, room))

print()
print("Erasure budgets and carrier sizes (1024-state source):")
for bits in (0, 4, 10):
    b = capacity_bounds(2**10, bits * room.landauer_unit(), room)
    print("  %2d erasable bits -> carrier floor %.1f bits, shared info cap %.1f bits"
          % (bits, b.min_carrier_bits, b.max_mutual_info_bits))

print()
print("Break-even access frequency by knowledge-base size:")
for n in (1e3, 1e6, 1e9, 1e12):
    print("  %8.0e atoms -> f_c = %.4f accesses" % (n, critical_frequency(n)))

print()
print("Amortizing a shared store over a three-query workload")
print("(store 100 bits, 1000 accesses, derivation costs 10/20/30 bits):")
dist = QueryDistribution(tuple(Query(i, i) for i in range(3)), np.array([0.5, 0.3, 0.2]), kind="zipf")
mc = multi_query_costs(100.0, 1000, dist, {0: 10.0, 1: 20.0, 2: 30.0})
print("  correct accounting:  %.2f bits/access" % mc.expected_correct)
print("  naive per-query charging: %.1f bits/access (%.1fx off)" % (mc.naive_invalid, mc.ratio))

print()
print("Single-query strategies (100-bit store, f=0.5, derive=10):")
print("  hybrid %.1f | pure compute %.1f | pure storage at f=1: %.1f"
      % (amortized_access_cost(100, 0.5, 10), amortized_access_cost(0, 0.5, 10),
         amortized_access_cost(100, 1.0, 0)))

print()
print("Large-system corner values:")
print("  critical storage for H(Q)=1e12 bits, 3.6e12 J budget, H(Q|K)=1e6 bits:")
print("    M_c = %.4e bits" % critical_storage(1e12, 3.6e12, 1e6, room))
print("  phase-transition energy ratio for H(Q)=1e6 bits at mean depth 5:")
print("    alpha_c = %.4e" % phase_alpha_critical(1e6, 5.0))
print("  entropy released serving 1 nat from storage at 300 K: %.4e nats/K"
      % entropy_production_min(1.0, room))
