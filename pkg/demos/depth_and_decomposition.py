"""Walkthrough: building knowledge bases, measuring derivation depth, and
reducing fact sets to their independent core.

Run:  python3 demos/depth_and_decomposition.py
"""

import numpy as np

from derivd import (
    HornRule,
    KnowledgeBase,
    atomic_decomposition,
    forward_closure,
    generate_kb,
    kb_to_text,
    logical_depth,
    proof_tree_atoms,
    sample_queries,
)
from derivd.kb import derivation_depths

print("=" * 70)
print("1. A four-atom knowledge base, by hand")
print("=" * 70)

# a(0) -> b(1), a -> c(2), {b, c} -> d(3)
kb = KnowledgeBase(
    atom_count=4,
    base_facts=frozenset({0}),
    rules=(
        HornRule(frozenset({0}), 1, rule_id=0),
        HornRule(frozenset({0}), 2, rule_id=1),
        HornRule(frozenset({1, 2}), 3, rule_id=2),
    ),
)
print(kb_to_text(kb))

closure = forward_closure(kb, kb.base_facts)
print("closure of the base facts:", sorted(closure))

res = logical_depth(kb, 3, kb.base_facts)
print("depth of atom 3:", res.depth, "(two branch derivations plus the join)")
print("minimal trace (rule ids):", res.trace)
print("proof tree atoms:", sorted(proof_tree_atoms(kb, 3, kb.base_facts)))

print()
print("Dropping derivable atoms from {0, 1, 2}:")
print("  independent core:", sorted(atomic_decomposition(kb, {0, 1, 2})))

print()
print("=" * 70)
print("2. A generated thousand-atom system")
print("=" * 70)

big = generate_kb(atom_count=1000, rule_count=3000, target_mean_depth=5.0, max_arity=3, seed=42)
depth, _ = derivation_depths(big, big.base_facts)
pool = big.non_base_derivable_atoms()
print("atoms:", big.atom_count, " base facts:", len(big.base_facts), " rules:", len(big.rules))
print("mean derivation depth over derivable atoms: %.3f (target 5.0)" % np.mean([depth[a] for a in pool]))

queries = sample_queries(big, 5, seed=42)
for q in queries:
    r = logical_depth(big, q.target, big.base_facts)
    print("  query %d -> atom %d, depth %d, trace length %d" % (q.query_id, q.target, r.depth, len(r.trace)))
