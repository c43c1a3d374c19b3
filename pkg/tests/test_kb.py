import numpy as np
import pytest

from derivd.kb import (
    HornRule,
    KBConstructionError,
    atomic_decomposition,
    derivation_depths,
    forward_closure,
    generate_kb,
    is_derivable,
    kb_from_text,
    kb_to_text,
    logical_depth,
    proof_tree_atoms,
    replay_trace,
    sample_queries,
)

from conftest import chain_kb, closure_oracle, depth_oracle, diamond_kb, kb_from_rule_specs, random_messy_kb


# --- forward closure ---------------------------------------------------------


def test_closure_of_chain_reaches_everything():
    kb = chain_kb()
    assert forward_closure(kb, {0}) == frozenset({0, 1, 2})


def test_closure_is_superset_and_idempotent():
    rng = np.random.default_rng(3)
    for _ in range(50):
        kb = random_messy_kb(rng)
        start = frozenset(int(a) for a in rng.choice(kb.atom_count, size=2, replace=False))
        cl = forward_closure(kb, start)
        assert start <= cl
        assert forward_closure(kb, cl) == cl
        assert cl == closure_oracle(kb, start)


def test_closure_from_base_covers_generated_queries():
    kb = generate_kb(200, 500, 3.0, 2, 11)
    cl = forward_closure(kb, kb.base_facts)
    assert cl == frozenset(range(200))  # every atom is base or concluded by a rule


# --- logical depth -----------------------------------------------------------


def test_depth_zero_iff_in_start():
    kb = chain_kb()
    assert logical_depth(kb, 0, {0}).depth == 0
    assert logical_depth(kb, 1, {0}).depth == 1


def test_chain_depth_two():
    kb = chain_kb()
    res = logical_depth(kb, 2, {0})
    assert res.derivable and res.depth == 2
    assert len(res.trace) == 2


def test_diamond_counts_tree_cost():
    # b and c are separate branches of the proof tree of d, one step each,
    # plus the final join: 3 rule applications even though both reuse a.
    kb = diamond_kb()
    assert logical_depth(kb, 3, {0}).depth == 3


def test_underivable_target_reports_no_depth():
    kb = chain_kb()
    res = logical_depth(kb, 0, {1})
    assert not res.derivable and res.depth is None and res.trace == ()


def test_trace_replays_to_target_in_exactly_depth_steps():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 200:
        kb = random_messy_kb(rng)
        start = kb.base_facts
        depth, _ = derivation_depths(kb, start)
        targets = [a for a in range(kb.atom_count) if depth[a] > 0]
        if not targets:
            continue
        t = targets[int(rng.integers(len(targets)))]
        res = logical_depth(kb, t, start)
        assert len(res.trace) == res.depth
        assert t in replay_trace(kb, res.trace, start)
        checked += 1


def test_depths_match_value_iteration_oracle():
    rng = np.random.default_rng(19)
    for _ in range(120):
        kb = random_messy_kb(rng)
        start = kb.base_facts
        depth, _ = derivation_depths(kb, start)
        oracle = depth_oracle(kb, start)
        for a in range(kb.atom_count):
            expected = oracle[a]
            got = None if depth[a] < 0 else int(depth[a])
            assert got == expected, "atom %d: %r vs oracle %r" % (a, got, expected)


def test_is_derivable_agrees_with_logical_depth():
    rng = np.random.default_rng(23)
    probes = 0
    while probes < 1000:
        kb = random_messy_kb(rng)
        for _ in range(10):
            t = int(rng.integers(kb.atom_count))
            start = frozenset(
                int(a) for a in rng.choice(kb.atom_count, size=max(1, kb.atom_count // 5), replace=False)
            )
            assert is_derivable(kb, t, start) == logical_depth(kb, t, start).derivable
            probes += 1


# --- depth laws (1000 random instances) ---------------------------------------


def test_zero_depth_and_monotonicity_on_random_instances():
    rng = np.random.default_rng(40)
    zero_checked = mono_checked = 0
    instances = 0
    while instances < 1000:
        kb = random_messy_kb(rng)
        instances += 1
        n = kb.atom_count
        a1 = frozenset(int(a) for a in rng.choice(n, size=max(1, n // 4), replace=False))
        a2 = a1 | frozenset(int(a) for a in rng.choice(n, size=max(1, n // 4), replace=False))
        q = int(rng.integers(n))
        d1 = logical_depth(kb, q, a1)
        d2 = logical_depth(kb, q, a2)
        # zero depth iff member
        assert (d1.depth == 0) == (q in a1)
        zero_checked += 1
        # monotone: more starting atoms never deepen a derivation
        if d1.derivable:
            assert d2.derivable and d2.depth <= d1.depth
            mono_checked += 1
    assert zero_checked == 1000 and mono_checked > 300


def test_transitivity_on_generated_instances():
    # Chaining through an intermediate atom never beats the direct minimal
    # derivation. Tree-counted cost satisfies this whenever minimal trees use
    # an intermediate at most once, which the layered generator guarantees
    # (each rule has exactly one non-base premise, so proof trees are chains);
    # arbitrary rule graphs can re-derive a shared premise per use and break
    # the law, which is why this harness draws from the generator.
    rng = np.random.default_rng(44)
    trans_checked = 0
    instances = 0
    while instances < 1000:
        seed = int(rng.integers(1 << 30))
        kb = generate_kb(60, 180, float(rng.choice([2.0, 3.0, 5.0])), 3, seed)
        instances += 1
        n = kb.atom_count
        extra = frozenset(int(a) for a in rng.choice(n, size=n // 6, replace=False))
        a1 = kb.base_facts | extra
        q = int(rng.integers(n))
        phi = int(rng.integers(n))
        d1 = logical_depth(kb, q, a1)
        dphi = logical_depth(kb, phi, a1)
        dq_with_phi = logical_depth(kb, q, a1 | {phi})
        if dphi.derivable and dq_with_phi.derivable:
            assert d1.derivable
            assert d1.depth <= dphi.depth + dq_with_phi.depth
            trans_checked += 1
    assert trans_checked > 800


def test_horn_subadditivity_on_rule_heads():
    # For a rule {phi, psi} -> chi present in the KB, depth(chi) is at most
    # depth(phi) + depth(psi) + 1.
    rng = np.random.default_rng(41)
    checked = 0
    while checked < 1000:
        kb = random_messy_kb(rng)
        start = kb.base_facts
        depth, _ = derivation_depths(kb, start)
        for r in kb.rules:
            if all(depth[p] >= 0 for p in r.premises):
                bound = 1 + sum(int(depth[p]) for p in r.premises)
                assert 0 <= depth[r.conclusion] <= bound
                checked += 1
                if checked >= 1000:
                    break


# --- atomic decomposition -----------------------------------------------------


def test_decomposition_without_applicable_rules_keeps_everything():
    kb = kb_from_rule_specs(5, {0}, [({0, 1}, 2)])
    atoms = frozenset({3, 4})
    assert atomic_decomposition(kb, atoms) == atoms


def test_decomposition_drops_derivable_atom():
    kb = chain_kb()
    assert atomic_decomposition(kb, {0, 1}) == frozenset({0})


def test_decomposition_closure_equality_and_idempotence():
    rng = np.random.default_rng(55)
    checked = 0
    for _ in range(40):
        kb = generate_kb(120, 300, 3.0, 3, int(rng.integers(1 << 30)))
        pool = sorted(forward_closure(kb, kb.base_facts))
        for _ in range(25):
            atoms = frozenset(int(a) for a in rng.choice(pool, size=50, replace=False))
            reduced = atomic_decomposition(kb, atoms)
            assert reduced <= atoms
            assert forward_closure(kb, reduced) == forward_closure(kb, atoms)
            assert atomic_decomposition(kb, reduced) == reduced
            checked += 1
    assert checked == 1000


# --- generator ----------------------------------------------------------------


def test_generated_kb_hits_target_mean_depth():
    kb = generate_kb(1000, 3000, 5.0, 2, 42)
    assert kb.atom_count == 1000 and len(kb.rules) == 3000
    depth, _ = derivation_depths(kb, kb.base_facts)
    pool = kb.non_base_derivable_atoms()
    mean = float(np.mean([depth[a] for a in pool]))
    assert 3.5 <= mean <= 6.5


def test_generated_depths_verified_by_exhaustive_oracle():
    kb = generate_kb(100, 300, 3.0, 2, 7)
    oracle = depth_oracle(kb, kb.base_facts)
    depth, _ = derivation_depths(kb, kb.base_facts)
    for a in range(kb.atom_count):
        assert oracle[a] == (None if depth[a] < 0 else int(depth[a]))
    pool = kb.non_base_derivable_atoms()
    mean = float(np.mean([oracle[a] for a in pool]))
    assert abs(mean - 3.0) <= 0.9


def test_zero_rule_kb_is_all_base_facts():
    kb = generate_kb(10, 0, 1.0, 2, 5)
    assert kb.base_facts == frozenset(range(10))
    for a in range(10):
        assert logical_depth(kb, a, kb.base_facts).depth == 0


def test_generator_is_deterministic_per_seed():
    a = generate_kb(300, 900, 4.0, 3, 99)
    b = generate_kb(300, 900, 4.0, 3, 99)
    c = generate_kb(300, 900, 4.0, 3, 100)
    assert kb_to_text(a) == kb_to_text(b)
    assert kb_to_text(a) != kb_to_text(c)


def test_generator_rejects_infeasible_parameters():
    with pytest.raises(KBConstructionError):
        generate_kb(10, 1, 8.0, 2, 0)  # one rule cannot span 15 levels
    with pytest.raises(KBConstructionError):
        generate_kb(5, 10, 2.0, 2, 0)  # atom_count too small
    with pytest.raises(KBConstructionError):
        generate_kb(100, 300, 3.0, 7, 0)  # arity out of range


def test_rule_arity_respects_bound():
    for max_arity in (2, 3, 4):
        kb = generate_kb(200, 600, 3.0, max_arity, 1)
        assert max(len(r.premises) for r in kb.rules) <= max_arity
        assert min(len(r.premises) for r in kb.rules) >= 1


def test_sampled_queries_are_derivable_non_base():
    kb = generate_kb(500, 1500, 4.0, 3, 8)
    queries = sample_queries(kb, 100, 8)
    depth, _ = derivation_depths(kb, kb.base_facts)
    assert len({q.query_id for q in queries}) == 100
    for q in queries:
        assert q.target not in kb.base_facts
        assert depth[q.target] > 0


# --- proof tree atoms ----------------------------------------------------------


def test_proof_tree_atoms_of_chain():
    kb = chain_kb()
    assert proof_tree_atoms(kb, 2, {0}) == frozenset({0, 1, 2})
    assert proof_tree_atoms(kb, 0, {0}) == frozenset({0})


# --- serialization --------------------------------------------------------------


def test_text_round_trip_is_exact():
    kb = generate_kb(60, 150, 3.0, 3, 77)
    text = kb_to_text(kb)
    back = kb_from_text(text)
    assert back.same_content(kb)
    assert kb_to_text(back) == text


def test_text_format_shape():
    kb = chain_kb()
    lines = kb_to_text(kb).splitlines()
    assert lines[0] == "atoms 3"
    assert lines[1] == "base 0"
    assert lines[2] == "rule 0: 0 -> 1"


def test_parser_rejects_garbage():
    with pytest.raises(ValueError):
        kb_from_text("atoms 3\nnonsense here\n")
    with pytest.raises(ValueError):
        kb_from_text("base 0 1\n")  # missing header
