"""Easy DOE case study: one failure in 36 runs, and what domain knowledge buys.

Prior 1 marks N_Extra_Runs as highly suspicious; Prior 2 drops that hint.
"""

from faultrank import rank_root_causes
from faultrank.datasets import load_case, load_case_prior

suite = load_case("easy_doe")
space = suite.space
failed = suite.settings[suite.failed_rows[0]]
print("failed run:")
for name, j in zip(space.names, failed):
    print(f"  {name:28s} {space.levels[space.factor_index(name)][j]}")

for which in ("prior1", "prior2"):
    priors = load_case_prior("easy_doe", which, suite)
    print(f"\n{which}:")
    for rank, e in enumerate(rank_root_causes(suite, priors, k_max=3, top_n=8), start=1):
        names, labels = e.combination.labels(space)
        pairs = ", ".join(f"{n}={l}" for n, l in zip(names, labels))
        print(f"  {rank}. {e.posterior:.3f}  {pairs}")

# with a single failure every candidate is its own minimal cover, so the
# posterior is just the prior rescaled: the ranking follows the prior
