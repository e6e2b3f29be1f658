import pytest

from wignerneg import DensityMatrix


@pytest.fixture
def fock1():
    return DensityMatrix.fock(1)


@pytest.fixture(params=range(4))
def fock_n(request):
    return request.param, DensityMatrix.fock(request.param)


_criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    number = int(report.nodeid.split("test_criterion_")[1].split("_")[0])
    detail = dict(report.user_properties).get("detail", "")
    _criteria.append((number, "PASS" if report.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, detail in sorted(_criteria):
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
