import numpy as np
import pytest
from hypothesis import strategies as st

from glocal.graph_core import from_undirected_pairs, graph_from_edges

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def k(n):
    return graph_from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def cycle(n):
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves):
    return graph_from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty(n):
    return graph_from_edges(n, [])


@pytest.fixture
def k3():
    return k(3)


@pytest.fixture
def k4():
    return k(4)


@pytest.fixture
def c4():
    return cycle(4)


@pytest.fixture
def p3():
    return path(3)


def random_graph(rng, n, p):
    iu, ju = np.triu_indices(n, 1)
    mask = rng.random(len(iu)) < p
    return from_undirected_pairs(n, iu[mask], ju[mask])


@st.composite
def graphs(draw, min_n=1, max_n=30):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    return graph_from_edges(n, chosen)


@st.composite
def graphs_with_permutation(draw, min_n=1, max_n=30):
    g = draw(graphs(min_n, max_n))
    pi = draw(st.permutations(list(range(g.n))))
    return g, np.asarray(pi, dtype=np.int64)
