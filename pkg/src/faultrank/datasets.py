"""Bundled case-study data: the TCAS and Easy DOE covering-array suites and their priors."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .io import load_priors, load_suite
from .model import PriorSpec, TestSuite

_FILES = {
    "tcas": "tcas.csv",
    "easy_doe": "easy_doe.csv",
}
_PRIORS = {
    ("tcas", "uniform"): "tcas_uniform.txt",
    ("easy_doe", "prior1"): "easy_doe_prior1.txt",
    ("easy_doe", "prior2"): "easy_doe_prior2.txt",
}


def data_path(name: str) -> Path:
    return Path(str(resources.files("faultrank") / "data" / name))


def load_case(name: str) -> TestSuite:
    """``"tcas"`` (12 factors, 17 runs) or ``"easy_doe"`` (12 factors, 36 runs)."""
    _, suite = load_suite(data_path(_FILES[name]))
    return suite


def load_case_prior(name: str, which: str, suite: TestSuite | None = None) -> PriorSpec:
    suite = suite or load_case(name)
    return load_priors(data_path(_PRIORS[(name, which)]), suite.space, default_p=1 / 30)
