import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sentnet import _backend  # noqa: E402
from sentnet.textprep import PreprocessConfig  # noqa: E402


@pytest.fixture(scope="session")
def prep():
    return PreprocessConfig.default()


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
