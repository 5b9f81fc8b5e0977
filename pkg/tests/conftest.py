import time

import pytest

from hcvrd import builtin_scenario, run_scenario


@pytest.fixture(scope="session")
def set1_params():
    return builtin_scenario("paper-set-1").params


@pytest.fixture(scope="session")
def set2_params():
    return builtin_scenario("paper-set-2").params


@pytest.fixture(scope="session")
def crowley_params():
    return builtin_scenario("crowley-martin").params


@pytest.fixture(scope="session")
def golden_run_set1(tmp_path_factory):
    """Full paper-set-1 run; (report, elapsed seconds)."""
    out = tmp_path_factory.mktemp("golden_set1")
    t0 = time.perf_counter()
    report = run_scenario(builtin_scenario("paper-set-1"), out_dir=out, figures=False)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def golden_run_set2(tmp_path_factory):
    """Full paper-set-2 run; (report, elapsed seconds)."""
    out = tmp_path_factory.mktemp("golden_set2")
    t0 = time.perf_counter()
    report = run_scenario(builtin_scenario("paper-set-2"), out_dir=out, figures=False)
    return report, time.perf_counter() - t0
