"""Factor spaces, factor-level combinations, test suites and priors.

Levels are opaque labels at the I/O boundary and dense 0-based indices
everywhere else. A :class:`Combination` is a sorted tuple of
``(factor, level)`` index pairs; its prior is the product of the
single-factor probabilities of its entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, Sequence


class InconsistentData(ValueError):
    """Test data that no root-cause scenario can explain."""


@dataclass(frozen=True)
class FactorSpace:
    """Ordered factors, each with an ordered tuple of distinct level labels.

    A factor with a single level is accepted (levels inferred from a small
    suite may not show the rest); it simply never separates rows.
    """

    names: tuple[str, ...]
    levels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        levels = tuple(tuple(str(l) for l in lv) for lv in self.levels)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "levels", levels)
        if not names:
            raise ValueError("a factor space needs at least one factor")
        if len(names) != len(levels):
            raise ValueError("one level list per factor is required")
        if len(set(names)) != len(names):
            raise ValueError("factor names must be distinct")
        for name, lv in zip(names, levels):
            if not lv:
                raise ValueError(f"factor {name!r} has no levels")
            if len(set(lv)) != len(lv):
                raise ValueError(f"factor {name!r} has repeated level labels")
        object.__setattr__(
            self, "_level_index", tuple({l: j for j, l in enumerate(lv)} for lv in levels)
        )
        object.__setattr__(self, "_factor_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def uniform(cls, n_factors: int, n_levels: int) -> "FactorSpace":
        """Factors ``A, B, ...`` (or ``F1, F2, ...``) with levels ``1..n_levels``."""
        if n_factors <= 26:
            names = [chr(ord("A") + i) for i in range(n_factors)]
        else:
            names = [f"F{i + 1}" for i in range(n_factors)]
        return cls(tuple(names), tuple(tuple(str(j + 1) for j in range(n_levels)) for _ in names))

    @property
    def n_factors(self) -> int:
        return len(self.names)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(len(lv) for lv in self.levels)

    def factor_index(self, name: str) -> int:
        try:
            return self._factor_index[name]
        except KeyError:
            raise KeyError(f"unknown factor {name!r}") from None

    def level_index(self, factor: int, label: str) -> int:
        try:
            return self._level_index[factor][label]
        except KeyError:
            raise KeyError(f"unknown level {label!r} for factor {self.names[factor]!r}") from None

    def level_label(self, factor: int, level: int) -> str:
        return self.levels[factor][level]

    def validate_settings(self, settings: Sequence[int]) -> tuple[int, ...]:
        settings = tuple(int(s) for s in settings)
        if len(settings) != self.n_factors:
            raise ValueError(f"expected {self.n_factors} settings, got {len(settings)}")
        for i, s in enumerate(settings):
            if not 0 <= s < len(self.levels[i]):
                raise ValueError(f"level index {s} out of range for factor {self.names[i]!r}")
        return settings


@dataclass(frozen=True, order=False)
class Combination:
    """A K-input combination: factor indices strictly increasing, one level each.

    Construction from unsorted entries sorts them; a repeated factor is an error.
    """

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        entries = tuple(sorted((int(i), int(j)) for i, j in self.entries))
        if not entries:
            raise ValueError("a combination needs at least one entry")
        factors = [i for i, _ in entries]
        if len(set(factors)) != len(factors):
            raise ValueError(f"repeated factor in combination {entries}")
        if factors[0] < 0 or any(j < 0 for _, j in entries):
            raise ValueError("factor and level indices must be non-negative")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, *pairs: tuple[int, int]) -> "Combination":
        return cls(tuple(pairs))

    @classmethod
    def from_labels(cls, space: FactorSpace, mapping: Mapping[str, str]) -> "Combination":
        entries = []
        for name, label in mapping.items():
            i = space.factor_index(name)
            entries.append((i, space.level_index(i, str(label))))
        return cls(tuple(entries))

    @property
    def order(self) -> int:
        return len(self.entries)

    @property
    def factors(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(j for _, j in self.entries)

    def sort_key(self) -> tuple:
        """Canonical order: ascending K, then factor indices, then level indices."""
        return (len(self.entries), self.factors, self.levels)

    def issubset(self, other: "Combination") -> bool:
        return set(self.entries) <= set(other.entries)

    def validate(self, space: FactorSpace) -> "Combination":
        for i, j in self.entries:
            if i >= space.n_factors or j >= len(space.levels[i]):
                raise ValueError(f"combination {self.entries} is not valid for this factor space")
        return self

    def labels(self, space: FactorSpace) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (
            tuple(space.names[i] for i in self.factors),
            tuple(space.level_label(i, j) for i, j in self.entries),
        )

    def __str__(self):
        return "(" + ", ".join(f"{i}:{j}" for i, j in self.entries) + ")"


@dataclass(frozen=True)
class TestSuite:
    """Executed test rows: one level index per factor and a 0/1 outcome (1 = fail)."""

    __test__ = False  # not a pytest class

    space: FactorSpace
    settings: tuple[tuple[int, ...], ...]
    outcomes: tuple[int, ...]

    def __post_init__(self):
        settings = tuple(self.space.validate_settings(s) for s in self.settings)
        outcomes = tuple(int(y) for y in self.outcomes)
        if len(settings) != len(outcomes):
            raise ValueError("settings and outcomes differ in length")
        seen: dict[tuple[int, ...], tuple[int, int]] = {}
        for m, (row, y) in enumerate(zip(settings, outcomes)):
            if y not in (0, 1):
                raise ValueError(f"row {m + 1}: outcome must be 0 or 1, got {y}")
            if row in seen and seen[row][1] != y:
                raise InconsistentData(
                    f"row {m + 1} repeats the settings of row {seen[row][0] + 1} "
                    "with a different outcome"
                )
            seen.setdefault(row, (m, y))
        object.__setattr__(self, "settings", settings)
        object.__setattr__(self, "outcomes", outcomes)

    @property
    def n_rows(self) -> int:
        return len(self.settings)

    @property
    def failed_rows(self) -> tuple[int, ...]:
        return tuple(m for m, y in enumerate(self.outcomes) if y == 1)

    @property
    def passed_rows(self) -> tuple[int, ...]:
        return tuple(m for m, y in enumerate(self.outcomes) if y == 0)


@dataclass(frozen=True)
class PriorSpec:
    """Single-factor root-cause probabilities with a default for unmapped pairs."""

    entries: Mapping[tuple[int, int], float] = field(default_factory=dict)
    default_p: float = 1 / 30

    def __post_init__(self):
        _check_probability(self.default_p, "default prior")
        clean = {}
        for (i, j), p in dict(self.entries).items():
            _check_probability(p, f"prior for ({i}, {j})")
            clean[(int(i), int(j))] = float(p)
        object.__setattr__(self, "entries", clean)
        object.__setattr__(self, "default_p", float(self.default_p))

    @classmethod
    def by_factor(cls, space: FactorSpace, per_factor: Mapping[int, float], default_p: float):
        """Same probability for every level of the given factors."""
        entries = {
            (i, j): p for i, p in per_factor.items() for j in range(len(space.levels[i]))
        }
        return cls(entries, default_p)

    def single(self, factor: int, level: int) -> float:
        return self.entries.get((factor, level), self.default_p)


def _check_probability(p: float, what: str) -> None:
    if not (isinstance(p, (int, float)) and 0.0 < p < 1.0 and math.isfinite(p)):
        raise ValueError(f"{what} must lie strictly between 0 and 1, got {p!r}")


@dataclass(frozen=True)
class RootCauseScenario:
    """The set of combinations that are truly root causes."""

    active: frozenset[Combination] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "active", frozenset(self.active))


def contains(settings: Sequence[int], c: Combination) -> bool:
    """True iff the test row sets every factor of ``c`` to the level in ``c``."""
    return all(settings[i] == j for i, j in c.entries)


def _check_k_max(space: FactorSpace, k_max: int) -> int:
    if not 1 <= k_max <= space.n_factors:
        raise ValueError(f"k_max must be in 1..{space.n_factors}, got {k_max}")
    return int(k_max)


def enumerate_combinations(space: FactorSpace, k_max: int) -> Iterator[Combination]:
    """Lazily yield every combination of order 1..k_max in canonical order."""
    k_max = _check_k_max(space, k_max)
    cards = space.cardinalities
    for k in range(1, k_max + 1):
        for factors in combinations(range(space.n_factors), k):
            for levels in product(*(range(cards[i]) for i in factors)):
                yield Combination(tuple(zip(factors, levels)))


def row_combinations(settings: Sequence[int], k_max: int) -> Iterator[Combination]:
    """All combinations of order <= k_max contained in one test row."""
    n = len(settings)
    for k in range(1, min(k_max, n) + 1):
        for factors in combinations(range(n), k):
            yield Combination(tuple((i, settings[i]) for i in factors))


def combination_space_size(space: FactorSpace, k_max: int) -> int:
    """Number of combinations of order 1..k_max, for arbitrary level counts.

    Uses the elementary symmetric polynomials of the level counts:
    the coefficient of x^K in prod(1 + J_i x) counts order-K combinations.
    """
    k_max = _check_k_max(space, k_max)
    coeffs = [1]
    for card in space.cardinalities:
        nxt = coeffs + [0]
        for k in range(len(coeffs)):
            nxt[k + 1] += coeffs[k] * card
        coeffs = nxt
    return sum(coeffs[1 : k_max + 1])


def prior_probability(c: Combination, prior: PriorSpec) -> float:
    """Product of the single-factor probabilities of the entries of ``c``."""
    p = 1.0
    for i, j in c.entries:
        p *= prior.single(i, j)
    return p


def suite_from_rows(
    space: FactorSpace, rows: Iterable[Sequence[int]], outcomes: Iterable[int]
) -> TestSuite:
    return TestSuite(space, tuple(tuple(r) for r in rows), tuple(outcomes))
