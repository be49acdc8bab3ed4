from pathlib import Path

import pytest

from bipartite_access.graph import load_graph
from bipartite_access.params import load_params

DATA = Path(__file__).resolve().parents[1] / "src" / "bipartite_access" / "data"


@pytest.fixture
def fig4():
    return load_graph(DATA / "fig4.txt")


@pytest.fixture
def fig8():
    return load_graph(DATA / "fig8.txt")


@pytest.fixture
def k31():
    return load_graph(DATA / "k31.txt")


@pytest.fixture
def params():
    return lambda name: load_params(DATA / name)
