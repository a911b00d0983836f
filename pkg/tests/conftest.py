import re
import sys

import pytest

from faultrank import Combination, FactorSpace, PriorSpec, TestSuite
from faultrank.datasets import load_case, load_case_prior


def ab(text: str) -> Combination:
    """Letter-and-digit notation with 1-based levels: ``"A1B2"`` -> factors 0,1 at levels 0,1."""
    pairs = re.findall(r"([A-Z])(\d+)", text)
    return Combination(tuple((ord(f) - ord("A"), int(l) - 1) for f, l in pairs))


def by_label(space: FactorSpace, spec: dict) -> Combination:
    """1-based factor numbers mapped to level labels, as the case-study tables print them."""
    return Combination(
        tuple((i - 1, space.level_index(i - 1, str(label))) for i, label in spec.items())
    )


def small_suite(rows, outcomes, n_factors=3, n_levels=2) -> TestSuite:
    """Rows in 1-based level notation."""
    space = FactorSpace.uniform(n_factors, n_levels)
    return TestSuite(space, tuple(tuple(v - 1 for v in r) for r in rows), tuple(outcomes))


@pytest.fixture(scope="session")
def tcas():
    return load_case("tcas")


@pytest.fixture(scope="session")
def easy_doe():
    return load_case("easy_doe")


@pytest.fixture(scope="session")
def tcas_prior(tcas):
    return load_case_prior("tcas", "uniform", tcas)


@pytest.fixture(scope="session")
def doe_prior1(easy_doe):
    return load_case_prior("easy_doe", "prior1", easy_doe)


@pytest.fixture(scope="session")
def doe_prior2(easy_doe):
    return load_case_prior("easy_doe", "prior2", easy_doe)


@pytest.fixture
def single_failure_example():
    """Three binary factors; (2,2,2) passes and (1,2,1) fails."""
    return small_suite([(2, 2, 2), (1, 2, 1)], [0, 1])


@pytest.fixture
def uniform_01():
    return PriorSpec({}, 0.1)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
