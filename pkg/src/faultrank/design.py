"""Covering-array strength checks and a deterministic failure simulator."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

from .model import FactorSpace, RootCauseScenario, TestSuite, contains


@dataclass(frozen=True)
class CoverageReport:
    strength_checked: int
    missing: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = field(default_factory=tuple)

    @property
    def satisfied(self) -> bool:
        return not self.missing


def _matrix(rows) -> list[tuple[int, ...]]:
    if isinstance(rows, TestSuite):
        return list(rows.settings)
    return [tuple(int(v) for v in r) for r in rows]


def verify_coverage_strength(rows, space: FactorSpace, s: int) -> CoverageReport:
    """Report every (columns, levels) s-tuple that no row realizes.

    ``rows`` is a TestSuite or a matrix of level indices.
    """
    if not 1 <= s <= space.n_factors:
        raise ValueError(f"strength must be in 1..{space.n_factors}, got {s}")
    matrix = [space.validate_settings(r) for r in _matrix(rows)]
    cards = space.cardinalities
    missing = []
    for cols in combinations(range(space.n_factors), s):
        seen = {tuple(r[c] for c in cols) for r in matrix}
        needed = 1
        for c in cols:
            needed *= cards[c]
        if len(seen) == needed:
            continue
        for levels in product(*(range(cards[c]) for c in cols)):
            if levels not in seen:
                missing.append((cols, levels))
    return CoverageReport(s, tuple(missing))


def simulate_outcomes(rows, truth: RootCauseScenario) -> list[int]:
    """Fail a row exactly when it contains some true root cause."""
    return [int(any(contains(r, c) for c in truth.active)) for r in _matrix(rows)]


def simulate_suite(space: FactorSpace, rows: Sequence[Sequence[int]], truth: RootCauseScenario) -> TestSuite:
    matrix = _matrix(rows)
    return TestSuite(space, tuple(matrix), tuple(simulate_outcomes(matrix, truth)))
