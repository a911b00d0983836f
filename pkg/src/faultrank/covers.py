"""Bipartite incidence between candidate combinations and failed rows, and
exhaustive enumeration of its minimal covers.

A cover is a set of candidates that jointly touch every failed row; it is
minimal when every member covers some row that no other member covers. The
enumerator is equivalent to repeatedly solving the cover feasibility program
with one blocking constraint per found cover, stopping when it is infeasible:

    sum_c z_c [m in M_c] >= 1                    for each failure m
    sum_{c != g} z_c [m in M_c] <= n (1 - l_gm)  for each g, m
    sum_m l_gm >= 1                              for each selected g
    sum_c (z_c XOR z~_c) >= 1                    for each found cover z~

Instead of a solver it runs a depth-first search that branches on the
uncovered failure with the fewest remaining candidates and prunes as soon as
a chosen member loses its last private failure (MMCS, Murakami & Uno 2014).
Each minimal cover is reached by exactly one branch, so no blocking
bookkeeping is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .classify import Partition
from .model import Combination

DEFAULT_COVER_LIMIT = 1_000_000
BRUTE_FORCE_MAX_CANDIDATES = 20


@dataclass(frozen=True)
class Incidence:
    """Candidates (canonical order), the failed rows to explain, and which
    of those rows each candidate is contained in."""

    candidates: tuple[Combination, ...]
    failures: tuple[int, ...]
    covers_failure: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.candidates) != len(self.covers_failure):
            raise ValueError("one coverage set per candidate is required")
        fails = set(self.failures)
        touched = set()
        for pos, cov in enumerate(self.covers_failure):
            if not cov:
                raise ValueError(f"candidate {pos} covers no failure")
            if not cov <= fails:
                raise ValueError(f"candidate {pos} covers rows outside the failure set")
            touched |= cov
        if touched != fails:
            missing = sorted(fails - touched)
            raise ValueError(f"failures {missing} are covered by no candidate")

    @classmethod
    def from_sets(cls, coverage, failures=None) -> "Incidence":
        """Build an anonymous incidence from a list of coverage sets.

        Candidates are stand-in single-entry combinations ``(pos, 0)``.
        """
        coverage = [frozenset(c) for c in coverage]
        if failures is None:
            failures = sorted(set().union(*coverage)) if coverage else []
        cands = tuple(Combination(((pos, 0),)) for pos in range(len(coverage)))
        return cls(cands, tuple(sorted(failures)), tuple(coverage))

    @property
    def n_candidates(self) -> int:
        return len(self.candidates)

    def masks(self) -> list[int]:
        """Coverage of each candidate as a bitmask over failure positions."""
        pos = {m: k for k, m in enumerate(self.failures)}
        return [sum(1 << pos[m] for m in cov) for cov in self.covers_failure]


@dataclass(frozen=True)
class CoverCollection:
    """Minimal covers as sets of candidate positions.

    ``complete`` is False when enumeration stopped at the limit.
    """

    covers: tuple[frozenset[int], ...]
    complete: bool = True

    def __len__(self):
        return len(self.covers)

    def __iter__(self):
        return iter(self.covers)

    def as_set(self) -> set[frozenset[int]]:
        return set(self.covers)


def build_incidence(partition: Partition, target: Combination) -> Incidence:
    """Incidence restricted to the failed rows that contain ``target``."""
    if target not in partition.tf:
        raise ValueError(f"target {target} is not a tested-and-failed combination")
    failures = partition.tf_failure_index[target]
    wanted = set(failures)
    pool = set()
    for m in failures:
        pool |= partition.per_failure_candidates[m]
    candidates = tuple(sorted(pool, key=Combination.sort_key))
    coverage = tuple(
        frozenset(partition.tf_failure_index[c]) & wanted for c in candidates
    )
    return Incidence(candidates, tuple(failures), coverage)


class _LimitReached(Exception):
    pass


def _canonical(covers) -> tuple[frozenset[int], ...]:
    return tuple(sorted(covers, key=lambda s: (len(s), sorted(s))))


def enumerate_minimal_covers(inc: Incidence, limit: Optional[int] = DEFAULT_COVER_LIMIT) -> CoverCollection:
    """All minimal covers of ``inc.failures``, in canonical order.

    Stops once more than ``limit`` covers exist and returns the first
    ``limit`` found with ``complete=False``.
    """
    if limit is not None and limit <= 0:
        raise ValueError(f"cover limit must be positive, got {limit}")
    masks = inc.masks()
    n_fail = len(inc.failures)
    by_failure = [
        [c for c, mk in enumerate(masks) if mk >> f & 1] for f in range(n_fail)
    ]
    found: list[frozenset[int]] = []
    chosen: list[int] = []
    crit: dict[int, int] = {}

    def search(cand: set[int], uncovered: int) -> None:
        if not uncovered:
            if limit is not None and len(found) >= limit:
                raise _LimitReached
            found.append(frozenset(chosen))
            return
        best = None
        for f in range(n_fail):
            if uncovered >> f & 1:
                options = [c for c in by_failure[f] if c in cand]
                if best is None or len(options) < len(best):
                    best = options
                    if not options:
                        return
        cand = cand - set(best)
        for c in best:
            saved = dict(crit)
            for g in chosen:
                crit[g] &= ~masks[c]
            if all(crit[g] for g in chosen):
                crit[c] = masks[c] & uncovered
                chosen.append(c)
                search(cand, uncovered & ~masks[c])
                chosen.pop()
            crit.clear()
            crit.update(saved)
            cand = cand | {c}

    complete = True
    try:
        search(set(range(len(masks))), (1 << n_fail) - 1)
    except _LimitReached:
        complete = False
    return CoverCollection(_canonical(found), complete)


def brute_force_minimal_covers(inc: Incidence) -> CoverCollection:
    """Reference enumeration over every candidate subset."""
    n = inc.n_candidates
    if n > BRUTE_FORCE_MAX_CANDIDATES:
        raise ValueError(
            f"brute force is capped at {BRUTE_FORCE_MAX_CANDIDATES} candidates, got {n}"
        )
    masks = inc.masks()
    full = (1 << len(inc.failures)) - 1

    def union(members):
        u = 0
        for c in members:
            u |= masks[c]
        return u

    out = []
    for subset in range(1 << n):
        members = [c for c in range(n) if subset >> c & 1]
        if union(members) != full:
            continue
        if all(union([g for g in members if g != c]) != full for c in members):
            out.append(frozenset(members))
    return CoverCollection(_canonical(out), True)


def is_minimal_cover(inc: Incidence, cover) -> bool:
    """Coverage plus a private failure for every member."""
    masks = inc.masks()
    full = (1 << len(inc.failures)) - 1
    u = 0
    for c in cover:
        u |= masks[c]
    if u != full:
        return False
    for g in cover:
        others = 0
        for c in cover:
            if c != g:
                others |= masks[c]
        if masks[g] & ~others == 0:
            return False
    return True
