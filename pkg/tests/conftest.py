import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        ok = call.excinfo is None
        prev = _ACCEPTANCE.get(number, (title, True))
        _ACCEPTANCE[number] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture(params=["python", "cython"])
def kernels(request):
    from egsums import _kernels

    impl = _kernels.backends().get(request.param)
    if impl is None:
        pytest.skip(f"{request.param} backend not built")
    return impl
