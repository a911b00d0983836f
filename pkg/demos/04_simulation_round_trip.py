"""Plant a root cause, simulate outcomes on the TCAS design, and look for it again."""

from faultrank import Combination, PriorSpec, RootCauseScenario, rank_root_causes, simulate_suite
from faultrank.datasets import load_case

design = load_case("tcas")
space = design.space

truth = Combination.from_labels(space, {"Own_Tracked_Alt": "1", "Other_Capability": "1"})
suite = simulate_suite(space, design.settings, RootCauseScenario((truth,)))
print("planted:", dict(zip(*truth.labels(space))))
print("failed runs:", [m + 1 for m in suite.failed_rows])

priors = PriorSpec({}, 1 / 30)
ranked = rank_root_causes(suite, priors, k_max=2, top_n=None)
where = next(r for r, e in enumerate(ranked, start=1) if e.combination == truth)
print(f"{len(ranked)} suspects; planted cause ranks {where} "
      f"with posterior {ranked[where - 1].posterior:.3f}")
for e in ranked[:5]:
    print(f"  {e.posterior:.3f}  {dict(zip(*e.combination.labels(space)))}")
