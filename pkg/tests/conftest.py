import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reslab.contour_engine import ResolventEngine  # noqa: E402
from reslab.spectral_symbols import make_gaussian_symbol  # noqa: E402
from reslab.surface import build_atlas  # noqa: E402


@pytest.fixture(scope="session")
def gauss():
    """Family A reference symbol: (1 + e2/2) exp(-(3/2) z^2)."""
    return make_gaussian_symbol(1.0, ((1.0, 0, 0), (0.5, 1, 0)))


@pytest.fixture(scope="session")
def atlas2():
    return build_atlas(2)


@pytest.fixture(scope="session")
def engine(gauss):
    return ResolventEngine(gauss)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        for line in results[k]:
            terminalreporter.write_line(line)
