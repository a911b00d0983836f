"""Command-line front end.

    faultrank rank SUITE [--priors FILE] [--k-max 3] [--format table|json|csv] ...
    faultrank verify-ca SUITE --strength 2
    faultrank simulate MATRIX --truth FILE [-o OUT]
    faultrank oracle SUITE --target "Factor=level, Factor=level" [--k-max 2]

Exit codes: 0 ok, 1 usage or parse error, 2 inconsistent data,
3 covering-array check not satisfied.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .classify import classify_combinations
from .covers import DEFAULT_COVER_LIMIT
from .design import simulate_suite, verify_coverage_strength
from .io import (
    LoadError,
    load_matrix,
    load_priors,
    load_suite,
    load_truth,
    parse_combination,
    parse_probability,
    render_csv,
    render_json,
    render_table,
    write_suite,
)
from .model import InconsistentData, PriorSpec
from .posterior import (
    AUTO,
    DEFAULT_UT_FLOOR,
    EXACT,
    MODES,
    brute_force_posterior,
    posterior_probability,
    rank_root_causes,
)

EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT, EXIT_NOT_COVERED = 0, 1, 2, 3
NO_FAILURES = "no failures observed"


@dataclass(frozen=True)
class RunConfig:
    data_path: Path
    prior_path: Optional[Path] = None
    default_prior: Optional[float] = None  # None: one over the total number of levels
    k_max: int = 3
    mode: str = AUTO
    top_n: int = 20
    include_ut: bool = False
    ut_floor: float = DEFAULT_UT_FLOOR
    output_format: str = "table"
    workers: int = 1
    cover_limit: int = DEFAULT_COVER_LIMIT
    prune_epsilon: float = 0.0
    timing: bool = False

    def __post_init__(self):
        if self.default_prior is not None and not 0.0 < self.default_prior < 1.0:
            raise ValueError(f"default prior must lie in (0, 1), got {self.default_prior}")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.output_format not in ("table", "json", "csv"):
            raise ValueError("format must be table, json or csv")
        if self.workers < 1 or self.cover_limit < 1:
            raise ValueError("workers and cover limit must be positive")
        if not 0.0 <= self.prune_epsilon < 1.0:
            raise ValueError("prune epsilon must lie in [0, 1)")


def _prior_summary(priors: PriorSpec) -> dict:
    values = list(priors.entries.values()) + [priors.default_p]
    return {
        "default": priors.default_p,
        "overrides": len(priors.entries),
        "min": min(values),
        "max": max(values),
    }


def _load_inputs(data_path, prior_path, default_prior):
    space, suite = load_suite(data_path)
    if default_prior is None:
        default_prior = 1.0 / sum(space.cardinalities)
    priors = load_priors(prior_path, space, default_prior)
    return space, suite, priors


def run_analysis(config: RunConfig) -> tuple[int, str]:
    """Rank root causes for one suite; returns the exit code and report text."""
    started = time.perf_counter()
    space, suite, priors = _load_inputs(config.data_path, config.prior_path, config.default_prior)
    k_max = min(config.k_max, space.n_factors)
    partition = classify_combinations(suite, k_max)
    entries = rank_root_causes(
        suite,
        priors,
        k_max,
        config.mode,
        config.top_n,
        include_ut=config.include_ut,
        ut_floor=config.ut_floor,
        workers=config.workers,
        cover_limit=config.cover_limit,
        prune_epsilon=config.prune_epsilon,
        partition=partition,
    )
    meta = {
        "data": Path(config.data_path).name,
        "factors": list(space.names),
        "rows": suite.n_rows,
        "failed_rows": [m + 1 for m in suite.failed_rows],
        "k_max": k_max,
        "mode": config.mode,
        "top_n": config.top_n,
        "include_ut": config.include_ut,
        "ut_floor": config.ut_floor if config.include_ut else None,
        "cover_limit": config.cover_limit,
        "prune_epsilon": config.prune_epsilon,
        "prior": _prior_summary(priors),
        "counts": {"tp": len(partition.tp), "tf": len(partition.tf), "reported": len(entries)},
    }
    if not suite.failed_rows:
        meta["message"] = NO_FAILURES
        print(f"faultrank: {NO_FAILURES}", file=sys.stderr)
    if config.timing:
        meta["runtime_seconds"] = round(time.perf_counter() - started, 3)

    if config.output_format == "json":
        return EXIT_OK, render_json(meta, entries, space)
    if config.output_format == "csv":
        return EXIT_OK, render_csv(entries, space)
    head = (
        f"{meta['data']}: {suite.n_rows} rows, {len(suite.failed_rows)} failed; "
        f"k_max={k_max}, mode={config.mode}; TP={len(partition.tp)}, TF={len(partition.tf)}\n"
    )
    if not suite.failed_rows:
        return EXIT_OK, head + NO_FAILURES + "\n"
    return EXIT_OK, head + "\n" + render_table(entries, space)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    try:
        return parse_probability(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="faultrank", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def prior_args(p):
        p.add_argument("--priors", type=Path, help="prior file with 'factor.level = p' lines")
        p.add_argument(
            "--default-prior",
            type=_probability,
            help="probability for unmapped factor levels (default: 1 / total number of levels)",
        )

    rank = sub.add_parser("rank", help="rank candidate root causes")
    rank.add_argument("data", type=Path)
    prior_args(rank)
    rank.add_argument("--k-max", type=int, default=3)
    rank.add_argument("--mode", choices=MODES, default=AUTO)
    rank.add_argument("--top-n", type=int, default=20)
    rank.add_argument("--include-ut", action="store_true", help="also report likely untested combinations")
    rank.add_argument("--ut-floor", type=_probability, default=DEFAULT_UT_FLOOR)
    rank.add_argument("--format", dest="output_format", choices=("table", "json", "csv"), default="table")
    rank.add_argument("--workers", type=int, default=1)
    rank.add_argument("--cover-limit", type=int, default=DEFAULT_COVER_LIMIT)
    rank.add_argument("--prune-epsilon", type=float, default=0.0)
    rank.add_argument("--timing", action="store_true", help="add runtime to the report metadata")
    rank.add_argument("-o", "--output", type=Path)

    ca = sub.add_parser("verify-ca", help="check covering-array strength")
    ca.add_argument("data", type=Path)
    ca.add_argument("--strength", type=int, default=2)

    sim = sub.add_parser("simulate", help="fill in outcomes from known root causes")
    sim.add_argument("matrix", type=Path)
    sim.add_argument("--truth", type=Path, required=True, help="one 'Factor=level, ...' per line")
    sim.add_argument("-o", "--output", type=Path)

    orc = sub.add_parser("oracle", help="brute-force posterior for one combination")
    orc.add_argument("data", type=Path)
    orc.add_argument("--target", required=True, help="'Factor=level, Factor=level'")
    prior_args(orc)
    orc.add_argument("--k-max", type=int, default=2)
    return parser


def _emit(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def _cmd_rank(args) -> int:
    config = RunConfig(
        data_path=args.data,
        prior_path=args.priors,
        default_prior=args.default_prior,
        k_max=args.k_max,
        mode=args.mode,
        top_n=args.top_n,
        include_ut=args.include_ut,
        ut_floor=args.ut_floor,
        output_format=args.output_format,
        workers=args.workers,
        cover_limit=args.cover_limit,
        prune_epsilon=args.prune_epsilon,
        timing=args.timing,
    )
    code, text = run_analysis(config)
    _emit(text, args.output)
    return code


def _cmd_verify(args) -> int:
    space, rows = load_matrix(args.data)
    report = verify_coverage_strength(rows, space, args.strength)
    status = "satisfied" if report.satisfied else f"NOT satisfied ({len(report.missing)} missing)"
    print(f"strength {report.strength_checked}: {status}")
    for cols, levels in report.missing:
        print("  " + ", ".join(f"{space.names[c]}={space.level_label(c, l)}" for c, l in zip(cols, levels)))
    return EXIT_OK if report.satisfied else EXIT_NOT_COVERED


def _cmd_simulate(args) -> int:
    space, rows = load_matrix(args.matrix)
    truth = load_truth(args.truth, space)
    suite = simulate_suite(space, rows, truth)
    _emit(write_suite(space, suite), args.output)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    space, suite, priors = _load_inputs(args.data, args.priors, args.default_prior)
    target = parse_combination(args.target, space)
    k_max = min(args.k_max, space.n_factors)
    brute = brute_force_posterior(suite, priors, k_max, target)
    partition = classify_combinations(suite, k_max)
    engine = posterior_probability(target, partition, priors, EXACT)
    print(f"category:    {engine.category}")
    print(f"brute force: {brute!r}")
    print(f"engine:      {engine.posterior!r}")
    print(f"difference:  {engine.posterior - brute:.3e}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "rank": _cmd_rank,
        "verify-ca": _cmd_verify,
        "simulate": _cmd_simulate,
        "oracle": _cmd_oracle,
    }[args.command]
    try:
        code = handler(args)
    except InconsistentData as exc:
        print(f"faultrank: inconsistent data: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (LoadError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"faultrank: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
