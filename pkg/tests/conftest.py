import pytest

from promptgauge.advisor import AdvisorRuntime
from promptgauge.assets import AssetBundle


def pytest_runtest_logreport(report):
    # one visible line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if report.passed:
            status = "PASS"
        elif report.skipped:
            status = "SKIP"
        else:
            status = "FAIL"
        print(f"\nACCEPTANCE {status}: {name}")


@pytest.fixture(scope="session")
def bundle() -> AssetBundle:
    return AssetBundle.load()


@pytest.fixture(scope="session")
def lex(bundle):
    return bundle.lexicons


@pytest.fixture(scope="session")
def runtime(bundle) -> AdvisorRuntime:
    return AdvisorRuntime.from_assets(bundle)
