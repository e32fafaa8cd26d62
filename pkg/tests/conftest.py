import math

import numpy as np
import pytest

from crestfactor.spectral import PeriodicGrid, to_spectral

TWO_PI = 2 * math.pi


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("CRESTFACTOR_CACHE", str(tmp_path / "cache"))
    monkeypatch.setenv("CRESTFACTOR_OUTPUT", str(tmp_path / "runs"))


def field_from(grid, *components):
    """Spectral field from callables of the mesh coordinates."""
    X = grid.mesh()
    return to_spectral(grid, np.stack([np.asarray(c(*X), dtype=float) for c in components]))


def taylor_green(N=32):
    g = PeriodicGrid(2, TWO_PI, N)
    return field_from(g, lambda x, y: np.sin(x) * np.cos(y), lambda x, y: -np.cos(x) * np.sin(y))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
