"""Shared fixtures. The seed-7 suite run is expensive, so it is session-scoped
and reused by the acceptance tests; everything else builds its own small data."""

import numpy as np
import pytest

from lcslab.checks import run_suite


@pytest.fixture(scope="session")
def suite_reports():
    """One full registry run at seed 7: (ordered report list, name -> report)."""
    reports = run_suite(seed=7)
    return reports, {rep.scenario: rep for rep in reports}


@pytest.fixture
def rng():
    return np.random.default_rng(20260818)
