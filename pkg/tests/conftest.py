import numpy as np
import pytest

from vqekit.fcidump import MolecularIntegrals, load_fcidump
from vqekit.scan import data_dir

H2_EQ_FCI = -1.1372701746609024  # pinned from the bundled 0.7414 A fixture


def fixture_path(name: str) -> str:
    return str(data_dir() / name)


@pytest.fixture(scope="session")
def h2():
    return load_fcidump(fixture_path("h2_sto3g_0.7414.fcidump"))


@pytest.fixture(scope="session")
def lih():
    return load_fcidump(fixture_path("lih_sto3g_1.5949.fcidump"))


@pytest.fixture(scope="session")
def ch3f():
    return load_fcidump(fixture_path("ch3f_sto3g_eq.fcidump"))


def random_integrals(n: int, n_electrons: int, seed: int = 0, scale: float = 0.3) -> MolecularIntegrals:
    """Random real integrals with the full 8-fold symmetry."""
    rng = np.random.default_rng(seed)
    h = rng.normal(size=(n, n))
    h = 0.5 * (h + h.T) - np.diag(np.arange(n, 0, -1.0))
    g = rng.normal(size=(n, n, n, n)) * scale
    g = (g + g.transpose(1, 0, 2, 3) + g.transpose(0, 1, 3, 2) + g.transpose(1, 0, 3, 2)) / 4
    g = 0.5 * (g + g.transpose(2, 3, 0, 1))
    return MolecularIntegrals(n, n_electrons, 0, float(rng.normal()), h, g)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """``acceptance(n, ok, detail)`` records one PASS/FAIL line for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
