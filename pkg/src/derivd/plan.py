"""Storage plans: immutable sets of stored query answers and/or raw atoms.

An answer entry carries the full content of its query (priced at the query's
semantic content); an atom entry is one encoded atom. Plans are hashable via
a content fingerprint so per-plan results can be memoized.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .kb import Query


@dataclass(frozen=True)
class StoragePlan:
    answers: tuple[Query, ...] = ()
    atoms: frozenset[int] = frozenset()
    capacity_entries: int | None = None
    total_bits: float = 0.0
    fingerprint: str = ""
    _answer_ids: frozenset[int] = field(default=frozenset(), repr=False)
    _answer_targets: frozenset[int] = field(default=frozenset(), repr=False)

    @property
    def n_entries(self) -> int:
        return len(self.answers) + len(self.atoms)

    def covers_query(self, query_id: int) -> bool:
        return query_id in self._answer_ids

    def covered_atoms(self) -> frozenset[int]:
        """Atoms readable straight from storage: raw atoms plus answer targets."""
        return self.atoms | self._answer_targets


def make_plan(
    answers: tuple[Query, ...] = (),
    atoms: frozenset[int] = frozenset(),
    capacity_entries: int | None = None,
    total_bits: float = 0.0,
) -> StoragePlan:
    if capacity_entries is not None and len(answers) + len(atoms) > capacity_entries:
        raise ValueError("plan holds more entries than its capacity")
    key = ",".join(
        ["a%d" % q.query_id for q in sorted(answers, key=lambda q: q.query_id)]
        + ["t%d" % a for a in sorted(atoms)]
    )
    return StoragePlan(
        answers=tuple(sorted(answers, key=lambda q: q.query_id)),
        atoms=frozenset(atoms),
        capacity_entries=capacity_entries,
        total_bits=float(total_bits),
        fingerprint=hashlib.sha1(key.encode("ascii")).hexdigest()[:16],
        _answer_ids=frozenset(q.query_id for q in answers),
        _answer_targets=frozenset(q.target for q in answers),
    )


EMPTY_PLAN = make_plan()
