"""Thermodynamic and economic cost formulas for storage-vs-computation
accounting: Landauer energies, capacity bounds, amortized and multi-query
costs, critical points, the energy-time-storage product bound, and entropy
production. All order-constants are fixed at 1.0 and exposed as arguments.

Unit conventions: energies in joules, temperatures in kelvin, storage in
bits unless a name says nats, time in inference steps of the simulator's
unit clock unless seconds are stated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .workload import QueryDistribution

LN2 = math.log(2.0)
BOLTZMANN_J_PER_K = 1.38e-23


@dataclass(frozen=True)
class ThermoParams:
    k_B: float = BOLTZMANN_J_PER_K
    T: float = 300.0
    t_refresh: float = 1.0
    t_avg: float = 1.0  # mean query inter-arrival, 1/lambda_Q

    def __post_init__(self) -> None:
        if min(self.k_B, self.T, self.t_refresh, self.t_avg) <= 0:
            raise ValueError("all thermodynamic parameters must be strictly positive")

    def landauer_unit(self) -> float:
        """Joules per irreversible bit operation: k_B * T * ln 2."""
        return self.k_B * self.T * LN2


@dataclass(frozen=True)
class CostWeights:
    w_E: float = 1.0
    w_T: float = 1.0
    w_S: float = 1.0

    def __post_init__(self) -> None:
        if min(self.w_E, self.w_T, self.w_S) < 0 or max(self.w_E, self.w_T, self.w_S) <= 0:
            raise ValueError("weights must be non-negative with at least one positive")


@dataclass(frozen=True)
class CostBreakdown:
    energy_j: float
    time: float
    storage_bits: float
    storage_term: float  # nats per access
    compute_term: float  # nats per access

    @property
    def amortized(self) -> float:
        return self.storage_term + self.compute_term


def landauer_compute_energy(depth: int | float, p: ThermoParams) -> float:
    """Minimum joules to run a derivation of the given depth."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    return depth * p.landauer_unit()


def storage_maintenance_energy(bits: float, t: float, p: ThermoParams) -> float:
    """Minimum joules to hold `bits` against thermal noise for time t."""
    if bits < 0 or t < 0:
        raise ValueError("bits and t must be non-negative")
    return bits * p.landauer_unit() * (t / p.t_refresh)


@dataclass(frozen=True)
class CapacityBounds:
    min_carrier_bits: float
    max_mutual_info_bits: float


def capacity_bounds(ontology_states: float, energy: float, p: ThermoParams) -> CapacityBounds:
    """With an erasure budget of `energy`, the carrier must keep at least
    log2(states) - E/(kT ln2) bits, and can share at most E/(kT ln2) bits."""
    if ontology_states < 1:
        raise ValueError("ontology_states must be at least 1")
    if energy < 0:
        raise ValueError("energy must be non-negative")
    erasable_bits = energy / p.landauer_unit()
    return CapacityBounds(
        min_carrier_bits=max(0.0, math.log2(ontology_states) - erasable_bits),
        max_mutual_info_bits=erasable_bits,
    )


def amortized_access_cost(storage_bits: float, f_q: float, h_derive: float) -> float:
    """Per-access cost of a strategy for one query: storage amortized over its
    access share plus derivation work. f_q may be a probability or an
    absolute access count; both readings divide the same way."""
    if f_q <= 0:
        raise ValueError("f_q must be positive")
    if storage_bits < 0 or h_derive < 0:
        raise ValueError("costs must be non-negative")
    return storage_bits / f_q + h_derive


def amortized_lower_bound(
    h_q: float, f_q: float, m: int, c: float = 1.0, slack_scale: float = 1.0
) -> float:
    """Floor under any per-query amortized cost, in the same unit as h_q:
    H_q * (1 + 1/(c ln m) - 1/f_q) - slack_scale * c * log2(m)."""
    if f_q <= 0:
        raise ValueError("f_q must be positive")
    if m < 2:
        raise ValueError("m must be at least 2")
    return h_q * (1.0 + 1.0 / (c * math.log(m)) - 1.0 / f_q) - slack_scale * c * math.log2(m)


@dataclass(frozen=True)
class MultiQueryCost:
    expected_correct: float
    naive_invalid: float
    ratio: float


def multi_query_costs(
    storage_bits: float,
    n_accesses: int,
    dist: QueryDistribution,
    per_query_h_derive: dict[int, float],
) -> MultiQueryCost:
    """Per-access cost of serving a whole workload from one shared store.

    The correct accounting spreads the one-time storage cost over all N
    accesses; the invalid one charges the full store once per query *type*,
    which inflates with the size of the query set.
    """
    if n_accesses < 1:
        raise ValueError("n_accesses must be at least 1")
    expected_h = 0.0
    for q, f in zip(dist.queries, dist.probs):
        expected_h += float(f) * per_query_h_derive[q.query_id]
    correct = storage_bits / n_accesses + expected_h
    naive = storage_bits * len(dist) + expected_h
    return MultiQueryCost(
        expected_correct=correct,
        naive_invalid=naive,
        ratio=naive / correct if correct > 0 else math.inf,
    )


def critical_frequency(atom_count: float, c: float = 1.0) -> float:
    """Access frequency at which storing and deriving break even:
    1 + 1/(c ln atom_count); tends to 1 as the knowledge base grows."""
    if atom_count < 2:
        raise ValueError("atom_count must be at least 2")
    if c <= 0:
        raise ValueError("c must be positive")
    return 1.0 + 1.0 / (c * math.log(atom_count))


def critical_storage(
    h_q_total_bits: float, e_budget_j: float, h_q_given_k_bits: float, p: ThermoParams
) -> float:
    """Storage level below which capacity, not computation, limits the system:
    H(Q) / log2(E_budget / (H(Q|K) * kT ln2))."""
    if min(h_q_total_bits, e_budget_j, h_q_given_k_bits) <= 0:
        raise ValueError("all inputs must be positive")
    floor = h_q_given_k_bits * p.landauer_unit()
    if e_budget_j <= floor:
        raise ValueError("energy budget %.3g J is below the maintenance floor %.3g J" % (e_budget_j, floor))
    denom = math.log2(e_budget_j / floor)
    if denom <= 0:
        raise ValueError("energy budget must exceed the maintenance floor")
    return h_q_total_bits / denom


@dataclass(frozen=True)
class TrialityResult:
    product: float
    bound: float
    satisfied: bool


def triality_check(
    energy_j: float,
    time: float,
    storage_bits: float,
    h_q_given_k_bits: float,
    p: ThermoParams,
) -> TrialityResult:
    """Joint check E * T / M >= H(Q|K) * kT ln2 (order constant 1).

    Zero storage has no finite product; use the pure-compute accounting
    instead of this check in that regime.
    """
    if storage_bits <= 0:
        raise ValueError("triality product needs positive storage; pure compute is out of scope")
    if energy_j < 0 or time < 0 or h_q_given_k_bits < 0:
        raise ValueError("inputs must be non-negative")
    product = energy_j * time / storage_bits
    bound = h_q_given_k_bits * p.landauer_unit()
    return TrialityResult(product=product, bound=bound, satisfied=product >= bound)


def entropy_production_min(mi_nats: float, p: ThermoParams) -> float:
    """Least environmental entropy released per answered query: I(S;q)/T."""
    if mi_nats < 0:
        raise ValueError("mutual information must be non-negative")
    return mi_nats / p.T


def phase_alpha_critical(h_q_bits: float, mean_depth: float) -> float:
    """Storage/compute energy ratio at which the latency gradient switches
    from exponential decay to 1/M falloff: H(Q) / (E[depth] * ln2)."""
    if mean_depth <= 0:
        raise ValueError("mean_depth must be positive")
    return h_q_bits / (mean_depth * LN2)


def weighted_strategy_cost(energy_j: float, time: float, storage_bits: float, w: CostWeights) -> float:
    if min(energy_j, time, storage_bits) < 0:
        raise ValueError("inputs must be non-negative")
    return w.w_E * energy_j + w.w_T * time + w.w_S * storage_bits


def cost_breakdown(
    energy_j: float,
    time: float,
    storage_bits: float,
    storage_term_nats: float,
    compute_term_nats: float,
) -> CostBreakdown:
    if min(energy_j, time, storage_bits, storage_term_nats, compute_term_nats) < 0:
        raise ValueError("cost components must be non-negative")
    return CostBreakdown(
        energy_j=energy_j,
        time=time,
        storage_bits=storage_bits,
        storage_term=storage_term_nats,
        compute_term=compute_term_nats,
    )
