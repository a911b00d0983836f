"""Suite and prior files, and report rendering.

Suite files are comma-delimited with a header row; the last column must be
named ``outcome`` and hold 0 (pass) or 1 (fail). Level labels are opaque
strings indexed in order of first appearance.

Prior files hold one ``key = value`` per line::

    # comment
    *.*               = 1/30     # overrides the default
    N_Extra_Runs.*    = 0.16     # every level of a factor
    Mode.Guided       = 0.05     # one level

A specific ``factor.level`` beats ``factor.*``, which beats ``*.*``.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .model import Combination, FactorSpace, PriorSpec, RootCauseScenario, TestSuite

OUTCOME_COLUMN = "outcome"


class LoadError(ValueError):
    """Malformed or contradictory input file."""


def _read_text(source) -> str:
    """Contents of a path or an open text stream."""
    if hasattr(source, "read"):
        return source.read()
    try:
        return Path(source).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise LoadError(f"cannot read {source}: {exc.strerror}") from None


def _read_table(text: str, require_outcome: bool):
    reader = csv.reader(io.StringIO(text))
    header = None
    body = []
    for lineno, rec in enumerate(reader, start=1):
        rec = [f.strip() for f in rec]
        if not any(rec):
            continue
        if header is None:
            header = (lineno, rec)
        else:
            body.append((lineno, rec))
    if header is None:
        raise LoadError("suite file is empty")
    names = header[1]
    has_outcome = bool(names) and names[-1].lower() == OUTCOME_COLUMN
    if require_outcome and not has_outcome:
        raise LoadError(f"line {header[0]}: last header column must be {OUTCOME_COLUMN!r}")
    for lineno, rec in body:
        if len(rec) != len(names):
            raise LoadError(f"line {lineno}: expected {len(names)} fields, found {len(rec)}")
    return names, has_outcome, body


def _space_from(names: Sequence[str], body) -> FactorSpace:
    levels: list[dict[str, None]] = [dict() for _ in names]
    for _, rec in body:
        for i, label in enumerate(rec[: len(names)]):
            levels[i].setdefault(label, None)
    try:
        return FactorSpace(tuple(names), tuple(tuple(lv) for lv in levels))
    except ValueError as exc:
        raise LoadError(str(exc)) from None


def load_suite(source, space: Optional[FactorSpace] = None) -> tuple[FactorSpace, TestSuite]:
    """Read a suite file from a path or text stream.

    Without ``space`` the factor space is inferred from the header and the
    labels seen in each column.
    """
    names, _, body = _read_table(_read_text(source), require_outcome=True)
    factor_names = names[:-1]
    if not factor_names:
        raise LoadError("suite file has no factor columns")
    if space is None:
        space = _space_from(factor_names, body)
    elif tuple(factor_names) != space.names:
        raise LoadError("header does not match the factor space")

    settings, outcomes = [], []
    first: dict[tuple[int, ...], tuple[int, int]] = {}
    for row_no, (lineno, rec) in enumerate(body, start=1):
        y = rec[-1]
        if y not in ("0", "1"):
            raise LoadError(f"line {lineno} (row {row_no}): outcome must be 0 or 1, got {y!r}")
        try:
            row = tuple(space.level_index(i, label) for i, label in enumerate(rec[:-1]))
        except KeyError as exc:
            raise LoadError(f"line {lineno} (row {row_no}): {exc.args[0]}") from None
        if row in first and first[row][1] != int(y):
            raise LoadError(
                f"line {lineno} (row {row_no}): same settings as row {first[row][0]} "
                "with a different outcome"
            )
        first.setdefault(row, (row_no, int(y)))
        settings.append(row)
        outcomes.append(int(y))
    return space, TestSuite(space, tuple(settings), tuple(outcomes))


def load_matrix(source, space: Optional[FactorSpace] = None) -> tuple[FactorSpace, list[tuple[int, ...]]]:
    """Read a settings matrix; a trailing ``outcome`` column is ignored."""
    names, has_outcome, body = _read_table(_read_text(source), require_outcome=False)
    factor_names = names[:-1] if has_outcome else names
    if space is None:
        space = _space_from(factor_names, body)
    rows = []
    for lineno, rec in body:
        try:
            rows.append(tuple(space.level_index(i, l) for i, l in enumerate(rec[: len(factor_names)])))
        except KeyError as exc:
            raise LoadError(f"line {lineno}: {exc.args[0]}") from None
    return space, rows


def parse_probability(text: str) -> float:
    """A decimal or a fraction such as ``1/30``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a probability: {text!r}") from None


def _split_key(key: str, space: FactorSpace) -> tuple[Optional[int], Optional[str]]:
    if key == "*.*":
        return None, None
    best = None
    for i, name in enumerate(space.names):
        if key.startswith(name + ".") and (best is None or len(name) > len(space.names[best])):
            best = i
    if best is None:
        raise KeyError(f"unknown factor in key {key!r}")
    level = key[len(space.names[best]) + 1 :]
    return best, (None if level == "*" else level)


def load_priors(source, space: FactorSpace, default_p: float) -> PriorSpec:
    """Parse a prior file against ``space``; unmapped pairs get ``default_p``."""
    text = "" if source is None else _read_text(source)
    wildcard = None
    per_factor: dict[int, float] = {}
    per_level: dict[tuple[int, int], float] = {}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LoadError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.rsplit("=", 1))
        if key in seen:
            raise LoadError(f"line {lineno}: duplicate key {key!r}")
        seen.add(key)
        try:
            p = parse_probability(value)
        except ValueError as exc:
            raise LoadError(f"line {lineno}: {exc}") from None
        if not 0.0 < p < 1.0:
            raise LoadError(f"line {lineno}: probability for {key!r} must lie in (0, 1), got {value}")
        try:
            factor, level = _split_key(key, space)
            if factor is None:
                wildcard = p
            elif level is None:
                per_factor[factor] = p
            else:
                per_level[(factor, space.level_index(factor, level))] = p
        except KeyError as exc:
            raise LoadError(f"line {lineno}: {exc.args[0]}") from None

    entries = {}
    for i, p in per_factor.items():
        for j in range(len(space.levels[i])):
            entries[(i, j)] = p
    entries.update(per_level)
    base = default_p if wildcard is None else wildcard
    try:
        return PriorSpec(entries, base)
    except ValueError as exc:
        raise LoadError(str(exc)) from None


def parse_combination(text: str, space: FactorSpace) -> Combination:
    """``Factor=level, Factor=level`` into a Combination."""
    mapping = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise LoadError(f"expected 'factor=level' in {part.strip()!r}")
        name, label = (s.strip() for s in part.split("=", 1))
        if name in mapping:
            raise LoadError(f"factor {name!r} given twice")
        mapping[name] = label
    if not mapping:
        raise LoadError("empty combination")
    try:
        return Combination.from_labels(space, mapping)
    except KeyError as exc:
        raise LoadError(exc.args[0]) from None


def load_truth(source, space: FactorSpace) -> RootCauseScenario:
    """One combination per line; blank lines and ``#`` comments are skipped."""
    active = set()
    for lineno, raw in enumerate(_read_text(source).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            try:
                active.add(parse_combination(line, space))
            except LoadError as exc:
                raise LoadError(f"line {lineno}: {exc}") from None
    return RootCauseScenario(frozenset(active))


def write_suite(space: FactorSpace, suite: TestSuite) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(space.names) + [OUTCOME_COLUMN])
    for row, y in zip(suite.settings, suite.outcomes):
        w.writerow([space.level_label(i, j) for i, j in enumerate(row)] + [y])
    return buf.getvalue()


# --- reports -----------------------------------------------------------------

REPORT_COLUMNS = (
    "rank", "factors", "levels", "category", "prior", "posterior", "approximation", "clamped",
)


def entry_record(rank: int, entry, space: FactorSpace) -> dict:
    names, labels = entry.combination.labels(space)
    rec = {
        "rank": rank,
        "factors": list(names),
        "factor_indices": [i + 1 for i in entry.combination.factors],
        "levels": list(labels),
        "category": str(entry.category),
        "prior": entry.prior,
        "posterior": entry.posterior,
        "approximation": entry.approximation,
        "clamped": entry.clamped,
    }
    if entry.explained_prob is not None:
        rec["explained_prob"] = entry.explained_prob
        rec["cover_count"] = entry.cover_count
        rec["complete"] = entry.complete
        rec["pruned_covers"] = entry.pruned_covers
    return rec


def render_json(meta: dict, entries: Iterable, space: FactorSpace) -> str:
    records = [entry_record(r, e, space) for r, e in enumerate(entries, start=1)]
    return json.dumps({"meta": meta, "entries": records}, indent=2, sort_keys=False) + "\n"


def render_csv(entries: Iterable, space: FactorSpace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r, e in enumerate(entries, start=1):
        rec = entry_record(r, e, space)
        w.writerow(
            [
                r,
                "; ".join(rec["factors"]),
                "; ".join(rec["levels"]),
                rec["category"],
                repr(e.prior),
                repr(e.posterior),
                e.approximation,
                int(e.clamped),
            ]
        )
    return buf.getvalue()


def render_table(entries: Sequence, space: FactorSpace) -> str:
    rows = [("rank", "factors", "levels", "cat", "prior", "posterior", "approx", "clamped")]
    for r, e in enumerate(entries, start=1):
        names, labels = e.combination.labels(space)
        rows.append(
            (
                str(r),
                ", ".join(names),
                ", ".join(labels),
                str(e.category),
                f"{e.prior:.4e}",
                f"{e.posterior:.4f}",
                e.approximation,
                "yes" if e.clamped else "no",
            )
        )
    widths = [max(len(row[k]) for row in rows) for k in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
