"""Shared builders and independent oracles for the test suite.

The depth oracle below is deliberately a different algorithm from the
library's priority-queue pass: plain Bellman value iteration over proof-tree
cost, swept until fixpoint. Minimal proof trees never repeat an atom along a
root-to-leaf path, so n sweeps suffice.  Costs agree exactly with the
library on every input or something is broken.
"""

from __future__ import annotations

import numpy as np
import pytest

from derivd.kb import HornRule, KnowledgeBase


def kb_from_rule_specs(atom_count, base, rule_specs, seed=0):
    rules = tuple(
        HornRule(frozenset(premises), conclusion, rule_id=i)
        for i, (premises, conclusion) in enumerate(rule_specs)
    )
    return KnowledgeBase(
        atom_count=atom_count, base_facts=frozenset(base), rules=rules, generation_seed=seed
    )


def chain_kb():
    # a(0) -> b(1) -> c(2)
    return kb_from_rule_specs(3, {0}, [({0}, 1), ({1}, 2)])


def diamond_kb():
    # a -> b, a -> c, {b, c} -> d
    return kb_from_rule_specs(4, {0}, [({0}, 1), ({0}, 2), ({1, 2}, 3)])


def random_messy_kb(rng: np.random.Generator, atom_count=None, rule_count=None) -> KnowledgeBase:
    """Arbitrary random KB (no layering, shortcuts and dead rules allowed)."""
    n = int(atom_count or rng.integers(6, 16))
    n_rules = int(rule_count or rng.integers(4, 3 * n))
    base = {int(a) for a in rng.choice(n, size=max(1, n // 4), replace=False)}
    specs = []
    for _ in range(n_rules):
        conclusion = int(rng.integers(n))
        arity = int(rng.integers(1, 4))
        premises = {int(a) for a in rng.choice(n, size=arity, replace=False)} - {conclusion}
        if premises:
            specs.append((premises, conclusion))
    return kb_from_rule_specs(n, base, specs)


def depth_oracle(kb: KnowledgeBase, start) -> dict[int, int | None]:
    """Value-iteration minimal proof-tree cost; None marks underivable."""
    INF = float("inf")
    cost = {a: (0 if a in start else INF) for a in range(kb.atom_count)}
    for _ in range(kb.atom_count + 1):
        changed = False
        for r in kb.rules:
            c = 1
            for p in r.premises:
                c += cost[p]
            if c < cost[r.conclusion]:
                cost[r.conclusion] = c
                changed = True
        if not changed:
            break
    return {a: (None if cost[a] == INF else int(cost[a])) for a in range(kb.atom_count)}


def closure_oracle(kb: KnowledgeBase, start) -> frozenset[int]:
    """Naive repeated-scan closure, independent of the library's counters."""
    have = set(start)
    while True:
        added = False
        for r in kb.rules:
            if r.conclusion not in have and r.premises <= have:
                have.add(r.conclusion)
                added = True
        if not added:
            return frozenset(have)


@pytest.fixture(scope="session")
def medium_system():
    """One shared 2000-atom KB with 1000 queries, the exp2/exp3 shape."""
    from derivd.kb import generate_kb, sample_queries

    kb = generate_kb(2000, 5000, 5.0, 3, 42)
    return kb, sample_queries(kb, 1000, 42)
