"""Split the candidate space into tested-and-passed, tested-and-failed and untested."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Mapping

from .model import Combination, InconsistentData, TestSuite, row_combinations


class Category(str, enum.Enum):
    TP = "TP"
    TF = "TF"
    UT = "UT"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Partition:
    """TP and TF sets up to ``k_max``; everything else of order <= k_max is UT.

    ``tf_failure_index`` maps each TF combination to the sorted failed-row
    indices containing it. ``per_failure_candidates`` maps each failed row to
    its contained combinations that are not TP.
    """

    tp: frozenset[Combination]
    tf: frozenset[Combination]
    k_max: int
    tf_failure_index: Mapping[Combination, tuple[int, ...]]
    per_failure_candidates: Mapping[int, frozenset[Combination]]

    @property
    def failed_rows(self) -> tuple[int, ...]:
        return tuple(sorted(self.per_failure_candidates))


def _unique_rows(suite: TestSuite) -> list[int]:
    first: dict[tuple[int, ...], int] = {}
    dupes = []
    for m, row in enumerate(suite.settings):
        if row in first:
            dupes.append(m)
        else:
            first[row] = m
    if dupes:
        warnings.warn(
            f"collapsing {len(dupes)} duplicate test row(s): "
            + ", ".join(str(m + 1) for m in dupes),
            stacklevel=3,
        )
    return sorted(first.values())


def classify_combinations(suite: TestSuite, k_max: int) -> Partition:
    """Partition all combinations of order <= k_max against the test outcomes.

    Raises InconsistentData when a failed row has every contained combination
    already cleared by a passed row.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    k_max = min(k_max, suite.space.n_factors)
    rows = _unique_rows(suite)

    tp: set[Combination] = set()
    for m in rows:
        if suite.outcomes[m] == 0:
            tp.update(row_combinations(suite.settings[m], k_max))

    per_failure: dict[int, frozenset[Combination]] = {}
    failure_index: dict[Combination, list[int]] = {}
    for m in rows:
        if suite.outcomes[m] != 1:
            continue
        cands = frozenset(c for c in row_combinations(suite.settings[m], k_max) if c not in tp)
        if not cands:
            raise InconsistentData(
                f"row {m + 1}: no candidate root cause at this order; "
                "raise k_max or re-check outcomes"
            )
        per_failure[m] = cands
        for c in cands:
            failure_index.setdefault(c, []).append(m)

    return Partition(
        tp=frozenset(tp),
        tf=frozenset(failure_index),
        k_max=k_max,
        tf_failure_index={c: tuple(ms) for c, ms in failure_index.items()},
        per_failure_candidates=per_failure,
    )


def category_of(c: Combination, partition: Partition) -> Category:
    if c.order > partition.k_max:
        raise ValueError(
            f"combination of order {c.order} lies outside the considered space (k_max={partition.k_max})"
        )
    if c in partition.tp:
        return Category.TP
    if c in partition.tf:
        return Category.TF
    return Category.UT
