"""Posterior root-cause probabilities.

TP combinations score 0 and UT combinations keep their prior. A TF
combination ``t`` scores ``prior(t) / P(E_t)``, where ``E_t`` is the event
that every failed row containing ``t`` is explained by some active candidate.
``P(E_t)`` is the probability that all members of at least one minimal cover
are active, evaluated by inclusion-exclusion over the covers (or its first two
term groups, which underestimate it). Above a dozen covers the exact value
comes from conditioning on candidates one at a time, which gives the same sum
without the 2^n subset terms.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .classify import Category, Partition, category_of, classify_combinations
from .covers import (
    DEFAULT_COVER_LIMIT,
    CoverCollection,
    build_incidence,
    enumerate_minimal_covers,
)
from .model import (
    Combination,
    FactorSpace,
    InconsistentData,
    PriorSpec,
    TestSuite,
    contains,
    prior_probability,
    row_combinations,
)

log = logging.getLogger(__name__)

EXACT = "exact"
SECOND_ORDER = "second_order"
AUTO = "auto"
MODES = (EXACT, SECOND_ORDER, AUTO)

AUTO_EXACT_MAX_COVERS = 20
EXACT_MAX_COVERS = 25
BRUTE_FORCE_MAX_VARIABLES = 30
DEFAULT_UT_FLOOR = 1e-3

# below this many covers the pair sum is accumulated term by term with fsum
_SMALL_PAIR_SUM = 64
_PAIR_CHUNK = 512
_SMALL_EXACT = 12
_ORACLE_LOW_BITS = 20


@dataclass(frozen=True)
class PosteriorEntry:
    combination: Combination
    category: Category
    prior: float
    posterior: float
    explained_prob: Optional[float] = None
    clamped: bool = False
    cover_count: Optional[int] = None
    approximation: str = EXACT
    complete: bool = True
    pruned_covers: int = 0

    def sort_key(self):
        return (-self.posterior,) + self.combination.sort_key()


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def _bitmasks(covers: Sequence[frozenset[int]]) -> list[int]:
    return [sum(1 << c for c in cov) for cov in covers]


def _masked_product(mask: int, priors: Sequence[float]) -> float:
    p = 1.0
    while mask:
        low = mask & -mask
        p *= priors[low.bit_length() - 1]
        mask ^= low
    return p


def _first_order_terms(masks, priors) -> list[float]:
    return [_masked_product(m, priors) for m in masks]


def _pair_terms(masks, priors) -> Iterator[float]:
    for a, b in combinations(masks, 2):
        yield -_masked_product(a | b, priors)


def _higher_order_terms(masks, priors) -> Iterator[float]:
    """Signed inclusion-exclusion terms for every subset of three or more covers."""
    n = len(masks)
    # stack frames: (next cover index, union mask, product of union, subset size)
    stack = [(0, 0, 1.0, 0)]
    while stack:
        start, union, prod, size = stack.pop()
        for k in range(n - 1, start - 1, -1):
            new = masks[k] & ~union
            p = prod * _masked_product(new, priors) if new else prod
            s = size + 1
            if s >= 3:
                yield p if s % 2 else -p
            if k + 1 < n:
                stack.append((k + 1, union | masks[k], p, s))


def _absorb(masks) -> frozenset[int]:
    """Drop every cover that contains another cover."""
    ordered = sorted(set(masks), key=int.bit_count)
    kept: list[int] = []
    for m in ordered:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return frozenset(kept)


def _components(masks: frozenset[int]) -> list[frozenset[int]]:
    groups: list[tuple[int, set[int]]] = []
    for m in masks:
        joined, support = {m}, m
        rest = []
        for sup, members in groups:
            if sup & support:
                joined |= members
                support |= sup
            else:
                rest.append((sup, members))
        groups = rest + [(support, joined)]
    return [frozenset(members) for _, members in groups]


def _union_by_expansion(masks, priors) -> float:
    """Exact union probability by conditioning on one candidate at a time.

    Covers that share no candidate are independent, so each connected group
    is solved on its own; residual cover sets are memoized.
    """
    memo: dict[frozenset[int], float] = {}

    def solve(covers: frozenset[int]) -> float:
        if not covers:
            return 0.0
        if 0 in covers:
            return 1.0
        if covers in memo:
            return memo[covers]
        parts = _components(covers)
        if len(parts) > 1:
            u = 0.0
            for part in parts:
                q = solve(part)
                u = u + q - u * q
        else:
            counts: dict[int, int] = {}
            for m in covers:
                while m:
                    low = m & -m
                    counts[low] = counts.get(low, 0) + 1
                    m ^= low
            bit = max(counts, key=lambda b: (counts[b], -b))
            p = priors[bit.bit_length() - 1]
            on = _absorb(m & ~bit for m in covers)
            off = frozenset(m for m in covers if not m & bit)
            u = p * solve(on) + (1.0 - p) * solve(off)
        memo[covers] = u
        return u

    return solve(_absorb(masks))


def _pair_sum_dense(covers: Sequence[frozenset[int]], priors: Sequence[float]) -> float:
    """Sum over cover pairs of the prior product of their union, in log space."""
    members = sorted(set().union(*covers))
    col = {c: k for k, c in enumerate(members)}
    x = np.zeros((len(covers), len(members)))
    for r, cov in enumerate(covers):
        x[r, [col[c] for c in cov]] = 1.0
    logp = np.log(np.array([priors[c] for c in members]))
    weighted = x * logp
    logs = weighted.sum(axis=1)
    n = len(covers)
    parts = []
    for i0 in range(0, n, _PAIR_CHUNK):
        i1 = min(n, i0 + _PAIR_CHUNK)
        shared = weighted[i0:i1] @ x.T
        union = logs[i0:i1, None] + logs[None, :] - shared
        upper = np.arange(n)[None, :] > np.arange(i0, i1)[:, None]
        parts.append(float(np.exp(union[upper]).sum()))
    return math.fsum(parts)


def prob_explained(
    covers: CoverCollection | Iterable[frozenset[int]],
    priors: Sequence[float],
    mode: str = AUTO,
) -> tuple[float, str]:
    """Probability that every member of at least one cover is active.

    ``priors[c]`` is the prior of candidate position ``c``. Returns the value
    and the approximation actually used (``exact`` or ``second_order``).
    """
    _check_mode(mode)
    covers = tuple(covers)
    n = len(covers)
    if n == 0:
        raise ValueError("empty cover collection: the failure set cannot be explained")
    if mode == AUTO:
        mode = EXACT if n <= AUTO_EXACT_MAX_COVERS else SECOND_ORDER
    if mode == EXACT and n > EXACT_MAX_COVERS:
        raise ValueError(
            f"exact inclusion-exclusion over {n} covers needs 2^{n} terms; "
            f"use mode='second_order' (exact is capped at {EXACT_MAX_COVERS} covers)"
        )

    if mode == SECOND_ORDER and n > _SMALL_PAIR_SUM:
        first = math.fsum(_first_order_terms(_bitmasks(covers), priors))
        return first - _pair_sum_dense(covers, priors), SECOND_ORDER

    masks = _bitmasks(covers)
    if mode == EXACT and n > _SMALL_EXACT:
        return _union_by_expansion(masks, priors), EXACT
    terms = _first_order_terms(masks, priors)
    terms.extend(_pair_terms(masks, priors))
    if mode == SECOND_ORDER:
        return math.fsum(terms), SECOND_ORDER
    return math.fsum(_chain(terms, _higher_order_terms(masks, priors))), EXACT


def _chain(first, rest):
    yield from first
    yield from rest


@dataclass(frozen=True)
class _Explained:
    value: float
    approximation: str
    cover_count: int
    complete: bool
    pruned: int


def _explain(
    partition: Partition,
    target: Combination,
    priors: PriorSpec,
    mode: str,
    cover_limit: Optional[int],
    prune_epsilon: float,
) -> _Explained:
    inc = build_incidence(partition, target)
    found = enumerate_minimal_covers(inc, limit=cover_limit)
    cand_priors = [prior_probability(c, priors) for c in inc.candidates]
    covers = found.covers
    pruned = 0
    if prune_epsilon > 0:
        kept = tuple(
            cov for cov in covers if math.prod(cand_priors[c] for c in sorted(cov)) >= prune_epsilon
        )
        pruned = len(covers) - len(kept)
        covers = kept
    if not found.complete:
        log.warning(
            "cover enumeration for failures %s stopped at %d covers; using second-order bound",
            [m + 1 for m in inc.failures],
            len(found),
        )
    use = mode if found.complete and not pruned else SECOND_ORDER
    if not covers:
        return _Explained(0.0, SECOND_ORDER, len(found), found.complete, pruned)
    value, approx = prob_explained(covers, cand_priors, use)
    return _Explained(value, approx, len(found), found.complete, pruned)


def _tf_entry(target: Combination, prior: float, ex: _Explained) -> PosteriorEntry:
    if ex.value > 0:
        raw = prior / ex.value
    else:
        raw = math.inf
    clamped = raw > 1.0 and ex.approximation == SECOND_ORDER
    return PosteriorEntry(
        combination=target,
        category=Category.TF,
        prior=prior,
        posterior=min(1.0, raw),
        explained_prob=ex.value,
        clamped=clamped,
        cover_count=ex.cover_count,
        approximation=ex.approximation,
        complete=ex.complete,
        pruned_covers=ex.pruned,
    )


def posterior_probability(
    target: Combination,
    partition: Partition,
    priors: PriorSpec,
    mode: str = AUTO,
    *,
    cover_limit: Optional[int] = DEFAULT_COVER_LIMIT,
    prune_epsilon: float = 0.0,
    cache: Optional[dict] = None,
) -> PosteriorEntry:
    """Posterior root-cause probability of one combination of order <= k_max.

    ``cache`` memoizes P(E) by failure-index set; the candidate pool is a
    function of that set, so equal keys mean equal cover problems.
    """
    _check_mode(mode)
    category = category_of(target, partition)
    prior = prior_probability(target, priors)
    if category is Category.TP:
        return PosteriorEntry(target, category, prior, 0.0)
    if category is Category.UT:
        return PosteriorEntry(target, category, prior, prior)
    key = partition.tf_failure_index[target]
    ex = cache.get(key) if cache is not None else None
    if ex is None:
        ex = _explain(partition, target, priors, mode, cover_limit, prune_epsilon)
        if cache is not None:
            cache[key] = ex
    return _tf_entry(target, prior, ex)


def _combinations_above(
    space: FactorSpace, priors: PriorSpec, k_max: int, floor: float
) -> Iterator[Combination]:
    """Combinations of order <= k_max whose prior exceeds ``floor``.

    Depth-first over increasing factor indices; a branch stops as soon as its
    prior drops to the floor, since extending it can only shrink the product.
    """
    stack = [((), 1.0, 0)]
    while stack:
        entries, p, start = stack.pop()
        for i in range(space.n_factors - 1, start - 1, -1):
            for j in range(len(space.levels[i]) - 1, -1, -1):
                q = p * priors.single(i, j)
                if q <= floor:
                    continue
                nxt = entries + ((i, j),)
                yield Combination(nxt)
                if len(nxt) < k_max:
                    stack.append((nxt, q, i + 1))


def rank_root_causes(
    suite: TestSuite,
    priors: PriorSpec,
    k_max: int = 3,
    mode: str = AUTO,
    top_n: Optional[int] = 20,
    *,
    include_ut: bool = False,
    ut_floor: float = DEFAULT_UT_FLOOR,
    workers: int = 1,
    cover_limit: Optional[int] = DEFAULT_COVER_LIMIT,
    prune_epsilon: float = 0.0,
    partition: Optional[Partition] = None,
) -> list[PosteriorEntry]:
    """Score every TF combination (and optionally likely UT ones) and rank them.

    Ties on posterior go to lower order, then lexicographic factors and levels.
    The result does not depend on ``workers``.
    """
    _check_mode(mode)
    if top_n is not None and top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if partition is None:
        partition = classify_combinations(suite, k_max)

    targets = sorted(partition.tf, key=Combination.sort_key)
    representative: dict[tuple[int, ...], Combination] = {}
    for t in targets:
        representative.setdefault(partition.tf_failure_index[t], t)
    keys = list(representative)

    def work(key):
        return _explain(partition, representative[key], priors, mode, cover_limit, prune_epsilon)

    if workers == 1 or len(keys) <= 1:
        results = [work(k) for k in keys]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, keys))
    explained = dict(zip(keys, results))

    entries = [
        _tf_entry(t, prior_probability(t, priors), explained[partition.tf_failure_index[t]])
        for t in targets
    ]
    if include_ut:
        for c in _combinations_above(suite.space, priors, partition.k_max, ut_floor):
            if c not in partition.tp and c not in partition.tf:
                p = prior_probability(c, priors)
                entries.append(PosteriorEntry(c, Category.UT, p, p))

    entries.sort(key=PosteriorEntry.sort_key)
    return entries if top_n is None else entries[:top_n]


def brute_force_posterior(
    suite: TestSuite, priors: PriorSpec, k_max: int, target: Combination
) -> float:
    """Posterior by summing over root-cause scenarios with a 0/1 likelihood.

    A scenario is consistent when no active combination appears in a passed
    row and every failed row contains an active combination. Combinations
    that appear in no row never affect the likelihood, and those appearing in
    a passed row must be inactive; both factor out of the ratio exactly, so
    only the remaining free indicators are enumerated.
    """
    k_max = min(k_max, suite.space.n_factors)
    if target.order > k_max:
        raise ValueError("target order exceeds k_max")
    target.validate(suite.space)
    passed = [suite.settings[m] for m in suite.passed_rows]
    failed = [suite.settings[m] for m in suite.failed_rows]
    prior_t = prior_probability(target, priors)
    if any(contains(row, target) for row in passed):
        return 0.0
    if not any(contains(row, target) for row in failed):
        return prior_t

    cleared = set()
    for row in passed:
        cleared.update(row_combinations(row, k_max))
    free: list[Combination] = []
    seen = set()
    for row in failed:
        for c in row_combinations(row, k_max):
            if c not in cleared and c not in seen:
                seen.add(c)
                free.append(c)
    n = len(free)
    if n > BRUTE_FORCE_MAX_VARIABLES:
        raise ValueError(
            f"{n} free indicators exceed the brute-force cap of {BRUTE_FORCE_MAX_VARIABLES}"
        )

    # target on bit 0; the low bits are enumerated once as arrays, the high
    # bits as a loop that only changes which failed rows still need a hit
    free.remove(target)
    free.insert(0, target)
    probs = [prior_probability(c, priors) for c in free]
    row_masks = [sum(1 << k for k, c in enumerate(free) if contains(row, c)) for row in failed]
    low = min(n, _ORACLE_LOW_BITS)
    weight = np.ones(1)
    for p in probs[:low]:
        weight = np.concatenate([weight * (1.0 - p), weight * p])
    z = np.arange(1 << low, dtype=np.int64)
    low_hit = [(z & (mask & ((1 << low) - 1))) != 0 for mask in row_masks]
    target_on = (z & 1) == 1

    sums: dict[tuple[int, ...], tuple[float, float]] = {}
    totals, hits = [], []
    for h in range(1 << (n - low)):
        scale = 1.0
        for k in range(n - low):
            p = probs[low + k]
            scale *= p if h >> k & 1 else 1.0 - p
        high = h << low
        open_rows = tuple(r for r, mask in enumerate(row_masks) if not high & mask)
        if open_rows not in sums:
            ok = np.ones(z.shape, dtype=bool)
            for r in open_rows:
                ok &= low_hit[r]
            sums[open_rows] = (float(weight[ok].sum()), float(weight[ok & target_on].sum()))
        tot, hit = sums[open_rows]
        totals.append(scale * tot)
        hits.append(scale * hit)
    total = math.fsum(totals)
    if total == 0.0:
        raise InconsistentData("no root-cause scenario explains the failed rows")
    return math.fsum(hits) / total
