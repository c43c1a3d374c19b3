"""Horn-clause knowledge bases: forward chaining, minimal derivation depth,
atomic decomposition, and a layered synthetic generator.

Atoms are dense integer ids in ``range(atom_count)``. A rule fires when all
of its premises are available and adds its conclusion. The depth of an atom
relative to a start set is the minimal number of rule applications in a
proof *tree* (premises are costed per branch, so a premise used twice is
counted twice unless it sits in the start set). Depths are computed with a
Dijkstra-style shortest-hyperpath pass: the cost of firing a rule is
``1 + sum(cost(premise))``, which exceeds every premise cost, so the usual
label-setting argument applies.

All functions here are pure with respect to their inputs; a KnowledgeBase is
immutable after construction and safe to share across workers. The lazy
per-start-set depth cache is the only internal mutation and is guarded by
normal CPython dict atomicity.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

AtomId = int


class KBConstructionError(ValueError):
    """Raised when generator parameters cannot produce the requested KB."""


@dataclass(frozen=True)
class HornRule:
    premises: frozenset[AtomId]
    conclusion: AtomId
    rule_id: int

    def __post_init__(self) -> None:
        if not self.premises:
            raise ValueError("rule %d has no premises" % self.rule_id)
        if self.conclusion in self.premises:
            raise ValueError("rule %d concludes one of its premises" % self.rule_id)


@dataclass(frozen=True)
class Query:
    target: AtomId
    query_id: int


@dataclass(frozen=True)
class DerivationResult:
    derivable: bool
    depth: int | None
    trace: tuple[int, ...]


@dataclass(eq=False)
class KnowledgeBase:
    atom_count: int
    base_facts: frozenset[AtomId]
    rules: tuple[HornRule, ...]
    generation_seed: int = 0
    # start-set -> (depth array, chosen rule array); populated lazily
    _depth_cache: dict = field(default_factory=dict, repr=False, compare=False)
    # (start-set, target) -> frozenset of proof-tree atoms; populated lazily
    _proof_atoms_cache: dict = field(default_factory=dict, repr=False, compare=False)
    # premise -> rule positions, plus per-rule premise counts; built lazily
    _rule_index_cache: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.atom_count <= 0:
            raise ValueError("atom_count must be positive")
        for a in self.base_facts:
            self._check_atom(a)
        for r in self.rules:
            self._check_atom(r.conclusion)
            for p in r.premises:
                self._check_atom(p)

    def _check_atom(self, a: AtomId) -> None:
        if not (0 <= a < self.atom_count):
            raise ValueError("atom id %r outside universe of size %d" % (a, self.atom_count))

    def same_content(self, other: "KnowledgeBase") -> bool:
        """Structural equality on atoms, base facts and rules (seed excluded)."""
        return (
            self.atom_count == other.atom_count
            and self.base_facts == other.base_facts
            and self.rules == other.rules
        )

    def derivable_atoms(self) -> frozenset[AtomId]:
        return forward_closure(self, self.base_facts)

    def non_base_derivable_atoms(self) -> list[AtomId]:
        """Sorted derivable atoms outside the base facts (the query pool)."""
        return sorted(forward_closure(self, self.base_facts) - self.base_facts)


def _rule_index(kb: KnowledgeBase):
    """premise atom -> list of rule positions, plus premise counts per rule."""
    if kb._rule_index_cache:
        return kb._rule_index_cache[0]
    by_premise: list[list[int]] = [[] for _ in range(kb.atom_count)]
    n_premises = np.empty(len(kb.rules), dtype=np.int64)
    for i, r in enumerate(kb.rules):
        n_premises[i] = len(r.premises)
        for p in r.premises:
            by_premise[p].append(i)
    n_premises.setflags(write=False)
    kb._rule_index_cache.append((by_premise, n_premises))
    return kb._rule_index_cache[0]


def forward_closure(kb: KnowledgeBase, start: set[AtomId] | frozenset[AtomId]) -> frozenset[AtomId]:
    """Least fixpoint of rule application from ``start`` (Dowling-Gallier style,
    linear in total rule size)."""
    for a in start:
        kb._check_atom(a)
    by_premise, n_premises = _rule_index(kb)
    remaining = n_premises.copy()
    derived = np.zeros(kb.atom_count, dtype=bool)
    agenda = list(start)
    for a in agenda:
        derived[a] = True
    while agenda:
        a = agenda.pop()
        for ri in by_premise[a]:
            remaining[ri] -= 1
            if remaining[ri] == 0:
                c = kb.rules[ri].conclusion
                if not derived[c]:
                    derived[c] = True
                    agenda.append(c)
    return frozenset(int(a) for a in np.flatnonzero(derived))


def is_derivable(kb: KnowledgeBase, target: AtomId, start: set[AtomId] | frozenset[AtomId]) -> bool:
    kb._check_atom(target)
    return target in forward_closure(kb, start)


def derivation_depths(kb: KnowledgeBase, start: frozenset[AtomId]) -> tuple[np.ndarray, np.ndarray]:
    """Minimal proof-tree cost of every atom from ``start``.

    Returns ``(depth, choice)`` where ``depth[a]`` is the minimal number of
    rule applications (-1 if underivable) and ``choice[a]`` is the rule index
    realizing it (ties broken by lowest rule_id; -1 for start atoms and
    underivable atoms). Results are cached on the KB per start set.
    """
    key = start if isinstance(start, frozenset) else frozenset(start)
    cached = kb._depth_cache.get(key)
    if cached is not None:
        return cached
    for a in key:
        kb._check_atom(a)

    by_premise, n_premises = _rule_index(kb)
    remaining = n_premises.copy()
    INF = np.iinfo(np.int64).max
    depth = np.full(kb.atom_count, INF, dtype=np.int64)
    choice = np.full(kb.atom_count, -1, dtype=np.int64)
    done = np.zeros(kb.atom_count, dtype=bool)
    heap: list[tuple[int, int]] = []
    for a in key:
        depth[a] = 0
        heapq.heappush(heap, (0, a))

    while heap:
        d, a = heapq.heappop(heap)
        if done[a] or d != depth[a]:
            continue
        done[a] = True
        for ri in by_premise[a]:
            remaining[ri] -= 1
            if remaining[ri] != 0:
                continue
            rule = kb.rules[ri]
            cost = 1
            for p in rule.premises:
                cost += int(depth[p])
            c = rule.conclusion
            if cost < depth[c]:
                depth[c] = cost
                choice[c] = ri
                if not done[c]:
                    heapq.heappush(heap, (cost, c))
            elif cost == depth[c] and choice[c] >= 0 and rule.rule_id < kb.rules[choice[c]].rule_id:
                choice[c] = ri  # same cost, deterministic lowest-rule-id trace

    depth[depth == INF] = -1
    result = (depth, choice)
    kb._depth_cache[key] = result
    return result


def _build_trace(kb: KnowledgeBase, target: AtomId, depth: np.ndarray, choice: np.ndarray) -> tuple[int, ...]:
    """Post-order rule ids of the minimal proof tree; length equals depth."""
    trace: list[int] = []
    stack: list[tuple[int, bool]] = [(target, False)]
    while stack:
        atom, expanded = stack.pop()
        if depth[atom] == 0:
            continue
        ri = int(choice[atom])
        if expanded:
            trace.append(kb.rules[ri].rule_id)
            continue
        stack.append((atom, True))
        for p in sorted(kb.rules[ri].premises, reverse=True):
            stack.append((p, False))
    return tuple(trace)


def logical_depth(
    kb: KnowledgeBase, target: AtomId, start: set[AtomId] | frozenset[AtomId]
) -> DerivationResult:
    """Minimal-derivation cost of ``target`` from ``start`` with a replayable trace.

    ``depth == 0`` iff the target is already in the start set; underivable
    targets come back with ``derivable=False`` and no depth.
    """
    kb._check_atom(target)
    key = frozenset(start)
    depth, choice = derivation_depths(kb, key)
    if depth[target] < 0:
        return DerivationResult(derivable=False, depth=None, trace=())
    return DerivationResult(
        derivable=True,
        depth=int(depth[target]),
        trace=_build_trace(kb, target, depth, choice),
    )


def proof_tree_atoms(
    kb: KnowledgeBase, target: AtomId, start: set[AtomId] | frozenset[AtomId]
) -> frozenset[AtomId]:
    """Distinct atoms appearing in the minimal proof tree of ``target``
    (leaves from the start set included; equals {target} at depth 0)."""
    kb._check_atom(target)
    key = frozenset(start)
    cached = kb._proof_atoms_cache.get((key, target))
    if cached is not None:
        return cached
    depth, choice = derivation_depths(kb, key)
    if depth[target] < 0:
        raise ValueError("atom %d not derivable from the given start set" % target)
    seen = {target}
    agenda = [target]
    while agenda:
        atom = agenda.pop()
        if depth[atom] == 0:
            continue
        for p in kb.rules[int(choice[atom])].premises:
            if p not in seen:
                seen.add(p)
                agenda.append(p)
    result = frozenset(seen)
    kb._proof_atoms_cache[(key, target)] = result
    return result


def replay_trace(
    kb: KnowledgeBase, trace: tuple[int, ...], start: set[AtomId] | frozenset[AtomId]
) -> set[AtomId]:
    """Apply the rule ids of a trace in order, checking premises at each step."""
    have = set(start)
    rules_by_id = {r.rule_id: r for r in kb.rules}
    for rid in trace:
        rule = rules_by_id[rid]
        if not rule.premises <= have:
            raise ValueError("trace replay: rule %d fired with missing premises" % rid)
        have.add(rule.conclusion)
    return have


def atomic_decomposition(
    kb: KnowledgeBase, atoms: set[AtomId] | frozenset[AtomId]
) -> frozenset[AtomId]:
    """Reduce a set to its independent core: keep each atom that the rest of
    the set cannot derive.

    For stratified rule sets (conclusions strictly above their premises, as
    the generator guarantees) the result has the same closure as the input
    and is the unique minimal such subset; cyclic rule sets void that
    guarantee.
    """
    atom_set = frozenset(atoms)
    kept = []
    for a in sorted(atom_set):
        if not is_derivable(kb, a, atom_set - {a}):
            kept.append(a)
    return frozenset(kept)


# ---------------------------------------------------------------------------
# Synthetic generator
# ---------------------------------------------------------------------------


def _generator_rng(seed: int) -> np.random.Generator:
    # Philox is counter-based and reproducible across platforms.
    return np.random.Generator(np.random.Philox(key=np.array([seed & (2**64 - 1), 0xD0], dtype=np.uint64)))


def generate_kb(
    atom_count: int,
    rule_count: int,
    target_mean_depth: float,
    max_arity: int,
    seed: int,
) -> KnowledgeBase:
    """Layered acyclic KB whose derivable non-base atoms have mean minimal
    depth equal to the target (within the 30% contract).

    Atoms are shuffled into levels 0..L with L chosen so that a uniform
    spread over levels 1..L averages to the target; level-0 atoms are the
    base facts. Every rule concluding a level-i atom takes exactly one
    premise from level i-1 plus base-fact premises, so the minimal depth of
    a level-i atom is exactly i and extra rules never shortcut it.
    """
    if atom_count < 10:
        raise KBConstructionError("atom_count must be at least 10")
    if rule_count < 0:
        raise KBConstructionError("rule_count must be non-negative")
    if not (2 <= max_arity <= 4):
        raise KBConstructionError("max_arity must be in [2, 4]")

    rng = _generator_rng(seed)

    if rule_count == 0:
        # Degenerate: everything is a base fact, all queries have depth 0.
        return KnowledgeBase(
            atom_count=atom_count,
            base_facts=frozenset(range(atom_count)),
            rules=(),
            generation_seed=seed,
        )

    if target_mean_depth <= 0:
        raise KBConstructionError("target_mean_depth must be positive")
    levels = max(1, round(2.0 * target_mean_depth - 1.0))
    achieved_mean = (levels + 1) / 2.0
    if abs(achieved_mean - target_mean_depth) > 0.3 * target_mean_depth:
        raise KBConstructionError(
            "cannot hit mean depth %.3g with integer level structure" % target_mean_depth
        )

    n_base = max(2, atom_count // 5)
    n_derived = min(atom_count - n_base, rule_count)
    n_base = atom_count - n_derived
    if n_derived < levels:
        raise KBConstructionError(
            "need at least %d derivable atoms for %d levels; got %d "
            "(increase atom_count or rule_count, or lower target_mean_depth)"
            % (levels, levels, n_derived)
        )

    order = rng.permutation(atom_count)
    base_atoms = [int(a) for a in order[:n_base]]
    derived_atoms = [int(a) for a in order[n_base:]]

    # Spread derived atoms over levels as evenly as possible.
    per_level = np.full(levels, n_derived // levels, dtype=np.int64)
    per_level[: n_derived % levels] += 1
    level_members: list[list[int]] = []
    pos = 0
    for count in per_level:
        level_members.append(derived_atoms[pos : pos + int(count)])
        pos += int(count)

    rules: list[HornRule] = []

    def pick_premises(level_idx: int) -> frozenset[AtomId]:
        # One anchor premise from the level below keeps the minimal depth of a
        # level-(i+1) conclusion at exactly i+1; base-fact extras cost nothing.
        prev = level_members[level_idx - 1] if level_idx > 0 else base_atoms
        anchor = prev[int(rng.integers(len(prev)))]
        arity = int(rng.integers(1, max_arity + 1))
        extra = rng.integers(len(base_atoms), size=max(0, arity - 1))
        return frozenset({anchor} | {base_atoms[int(i)] for i in extra})

    for li, members in enumerate(level_members):
        for atom in members:
            rules.append(HornRule(pick_premises(li), atom, rule_id=len(rules)))

    while len(rules) < rule_count:
        li = int(rng.integers(levels))
        atom = level_members[li][int(rng.integers(len(level_members[li])))]
        rules.append(HornRule(pick_premises(li), atom, rule_id=len(rules)))

    kb = KnowledgeBase(
        atom_count=atom_count,
        base_facts=frozenset(base_atoms),
        rules=tuple(rules),
        generation_seed=seed,
    )

    # Constructed depths are exact per level, so the mean check is a cheap
    # guard on the level bookkeeping rather than a full depth sweep.
    mean_level = float(np.dot(np.arange(1, levels + 1), per_level)) / n_derived
    if abs(mean_level - target_mean_depth) > 0.3 * target_mean_depth:
        raise KBConstructionError(
            "constructed mean depth %.3f misses target %.3f" % (mean_level, target_mean_depth)
        )
    return kb


def sample_queries(kb: KnowledgeBase, count: int, seed: int) -> list[Query]:
    """Uniform sample (without replacement) of derivable non-base atoms,
    wrapped as queries with ids 0..count-1."""
    pool = kb.non_base_derivable_atoms()
    if count > len(pool):
        raise ValueError("asked for %d queries but only %d derivable non-base atoms" % (count, len(pool)))
    rng = np.random.Generator(
        np.random.Philox(key=np.array([seed & (2**64 - 1), 0xA1], dtype=np.uint64))
    )
    chosen = rng.choice(len(pool), size=count, replace=False)
    chosen.sort()
    return [Query(target=pool[int(i)], query_id=qi) for qi, i in enumerate(chosen)]


# ---------------------------------------------------------------------------
# Serialization: `atoms N`, `base i j k ...`, `rule <id>: p1 p2 -> c`
# ---------------------------------------------------------------------------


def kb_to_text(kb: KnowledgeBase) -> str:
    lines = ["atoms %d" % kb.atom_count]
    lines.append("base " + " ".join(str(a) for a in sorted(kb.base_facts)))
    for r in kb.rules:
        lines.append(
            "rule %d: %s -> %d" % (r.rule_id, " ".join(str(p) for p in sorted(r.premises)), r.conclusion)
        )
    return "\n".join(lines) + "\n"


def kb_from_text(text: str) -> KnowledgeBase:
    atom_count = None
    base: frozenset[AtomId] = frozenset()
    rules: list[HornRule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("atoms "):
            atom_count = int(line.split()[1])
        elif line.startswith("base"):
            base = frozenset(int(tok) for tok in line.split()[1:])
        elif line.startswith("rule "):
            head, _, conclusion = line[len("rule ") :].partition("->")
            rid_part, _, premise_part = head.partition(":")
            rules.append(
                HornRule(
                    premises=frozenset(int(tok) for tok in premise_part.split()),
                    conclusion=int(conclusion.strip()),
                    rule_id=int(rid_part.strip()),
                )
            )
        else:
            raise ValueError("line %d: unrecognized KB line %r" % (lineno, raw))
    if atom_count is None:
        raise ValueError("missing 'atoms N' header")
    return KnowledgeBase(atom_count=atom_count, base_facts=base, rules=tuple(rules))


def save_kb(kb: KnowledgeBase, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(kb_to_text(kb))


def load_kb(path) -> KnowledgeBase:
    with open(path, "r", encoding="ascii") as fh:
        return kb_from_text(fh.read())
