"""Minimal covers and the probability that some cover is fully active.

A small hand-made incidence first, then the exact and truncated sums side by side.
"""

import itertools
import math

from faultrank import Incidence, brute_force_minimal_covers, enumerate_minimal_covers, prob_explained

# candidate 0 sits in both failed runs; 1 and 2 each in one
inc = Incidence.from_sets([{1, 2}, {1}, {2}])
covers = enumerate_minimal_covers(inc)
print("minimal covers:", [sorted(c) for c in covers])
print("same as brute force:", covers.covers == brute_force_minimal_covers(inc).covers)

priors = [0.05, 0.2, 0.3]
exact, _ = prob_explained(covers, priors, "exact")
trunc, _ = prob_explained(covers, priors, "second_order")
print(f"P(explained) exact {exact:.6f}   second order {trunc:.6f}")
print(f"posterior of candidate 0: exact {priors[0] / exact:.4f}   second order {priors[0] / trunc:.4f}")

# check against enumerating all 2^3 activation patterns
total = 0.0
for z in itertools.product((0, 1), repeat=3):
    if any(all(z[c] for c in cov) for cov in covers):
        total += math.prod(p if b else 1 - p for p, b in zip(priors, z))
print(f"by enumeration: {total:.6f}")

# truncation gets worse as covers pile up; it never overshoots the exact value
for n in (2, 4, 8, 16):
    singles = [frozenset({i}) for i in range(n)]
    e, _ = prob_explained(singles, [0.15] * n, "exact")
    s, _ = prob_explained(singles, [0.15] * n, "second_order")
    print(f"{n:2d} disjoint covers  exact {e:.4f}  second order {s:+.4f}")
