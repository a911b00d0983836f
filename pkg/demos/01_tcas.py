"""TCAS case study: 12 inputs, a 17-run strength-2 covering array, two failures.

The failure-count view ties ten combinations; the posterior separates them.
Run from the repository root:  python demos/01_tcas.py
"""

from faultrank import classify_combinations, rank_root_causes, verify_coverage_strength
from faultrank.datasets import load_case, load_case_prior
from faultrank.io import render_table

suite = load_case("tcas")
space = suite.space
print(f"{suite.n_rows} runs, failed runs: {[m + 1 for m in suite.failed_rows]}")
print("strength 2 covered:", verify_coverage_strength(suite, space, 2).satisfied)

# every factor level gets the same prior, 1/30
priors = load_case_prior("tcas", "uniform", suite)

part = classify_combinations(suite, k_max=3)
print(f"cleared by a passing run: {len(part.tp)}   still suspicious: {len(part.tf)}")

# how many failed runs each suspect appears in
counts = {}
for c, rows in part.tf_failure_index.items():
    counts[len(rows)] = counts.get(len(rows), 0) + 1
print("suspects by failure count:", dict(sorted(counts.items())))

ranked = rank_root_causes(suite, priors, k_max=3, top_n=12)
print()
print(render_table(ranked, space))

# the three-way combination sits in both failed runs, so it alone explains
# everything; the pairs each explain one run and need a partner for the other
top = ranked[0]
print("top suspect:", dict(zip(*top.combination.labels(space))))
print(f"prior {top.prior:.3e} -> posterior {top.posterior:.3f}  ({top.cover_count} minimal covers)")
