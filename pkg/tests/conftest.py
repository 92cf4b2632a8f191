import itertools
import os
from fractions import Fraction

import networkx as nx
from hypothesis import HealthCheck, settings, strategies as st

from geodecomp.graph import Graph

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def graphs(draw, min_n=0, max_n=10, weighted=False):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, chosen) if keep]
    weights = None
    if weighted:
        weights = draw(
            st.lists(st.fractions(min_value=0, max_value=20, max_denominator=7), min_size=n, max_size=n)
        )
    return Graph.from_edges(n, edges, weights)


def to_nx(G: Graph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(range(G.n))
    H.add_edges_from(G.edges())
    return H


def brute_alpha(G: Graph) -> int:
    """Largest independent set by scanning subsets from the top size down."""
    for k in range(G.n, 0, -1):
        for S in itertools.combinations(range(G.n), k):
            if G.is_independent(S):
                return k
    return 0


def brute_mwis(G: Graph) -> Fraction:
    best = Fraction(0)
    for mask in range(1 << G.n):
        S = [v for v in range(G.n) if mask >> v & 1]
        if G.is_independent(S):
            best = max(best, G.total_weight(S))
    return best


def brute_theta(G: Graph) -> int:
    """Clique cover number as the chromatic number of the complement, by trying k colours."""
    if G.n == 0:
        return 0
    H = G.complement()
    for k in range(1, G.n + 1):
        for colouring in itertools.product(range(k), repeat=G.n):
            if all(colouring[u] != colouring[v] for u, v in H.edges()):
                return k
    return G.n


# --- acceptance summary -------------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
