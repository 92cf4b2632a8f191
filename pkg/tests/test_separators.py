import math

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs, to_nx
from geodecomp.decomposers import decompose_eudg, decompose_hudg, decompose_sudg
from geodecomp.errors import PreconditionError
from geodecomp.geometry import DiskInstance, intersection_graph, normalize_pole
from geodecomp.graph import BoundKind, Graph, LayeredDecomposition, Layering, TreeDecomposition, validate_tree_decomposition
from geodecomp.instances import gen_layered_pathwidth, gen_named, gen_random_disks
from geodecomp.oracles import degeneracy_profile, exact_alpha, induced_alpha
from geodecomp.separators import (
    CliqueSeparator,
    Separation,
    bag_separator_oracle,
    balanced_bag_separator,
    clique_based_separator,
    clique_cover_separator,
    clique_weight,
    global_bound,
    independence_degeneracy_check,
    layered_to_global,
    period_for,
    ramsey_tw_bound,
    separator_tree_decomposition,
)


def trivial(G, bound=1, kind=BoundKind.INDEPENDENCE):
    return LayeredDecomposition(TreeDecomposition.single_bag(range(G.n)), Layering((0,) * G.n), bound, kind)


def max_bag_alpha(G, T, cap=1000):
    return max((induced_alpha(G, T.bags[t], cap) for t in T.nodes), default=0)


# --- layered to global ------------------------------------------------------------------


def test_period_and_guarantee():
    assert period_for(100, 1) == 10
    assert 10 * 1 + math.ceil(100 / 10) == 20
    assert global_bound(100, 1) == 21
    assert period_for(5, 9) == 1


def test_degenerate_period_still_validates():
    G = gen_named("path", n=5)
    D = LayeredDecomposition(TreeDecomposition.from_bags([{0, 1}, {1, 2}, {2, 3}, {3, 4}]), Layering(tuple(range(5))), 9, "treewidth")
    T = layered_to_global(G, D)
    assert validate_tree_decomposition(G, T).ok
    assert max_bag_alpha(G, T) <= G.n


@settings(max_examples=40)
@given(st.integers(1, 80), st.integers(1, 12), st.integers(1, 3), st.integers(0, 10**6))
def test_global_bag_alpha_bound(n, layers, k, seed):
    G, D = gen_layered_pathwidth(n, layers, k, 0.5, seed)
    T = layered_to_global(G, D)
    assert validate_tree_decomposition(G, T).ok
    p = period_for(n, k)
    assert max_bag_alpha(G, T) <= p * k + math.ceil(n / p)
    assert max_bag_alpha(G, T) <= global_bound(n, k)


def test_global_on_random_udg():
    inst = gen_random_disks("euclidean", 200, math.sqrt(200), 0.5, seed=1)
    G = intersection_graph(inst)
    T = layered_to_global(G, decompose_eudg(inst))
    assert validate_tree_decomposition(G, T).ok
    assert max_bag_alpha(G, T) <= math.ceil(2 * math.sqrt(4 * 200)) + 4


# --- balanced bag separators ---------------------------------------------------------------


def check_separation(G, sep, verts=None):
    verts = frozenset(range(G.n)) if verts is None else frozenset(verts)
    A, B = sep.side_A, sep.side_B
    assert A | B == verts
    for u in A - B:
        assert not (G.adj[u] & (B - A))
    assert sep.balance(len(verts)) <= 2 / 3 + 1e-12


def test_path_bag_separator():
    P5 = gen_named("path", n=5)
    T = TreeDecomposition.from_bags([{0, 1}, {1, 2}, {2, 3}, {3, 4}])
    sep = balanced_bag_separator(P5, T)
    assert sep.separator in ({1, 2}, {2, 3})
    assert len(sep.side_A - sep.side_B) <= 2 and len(sep.side_B - sep.side_A) <= 2
    check_separation(P5, sep)


def test_star_bag_separator():
    star = gen_named("star", n=9)
    bags = {0: frozenset({0})} | {i: frozenset({0, i}) for i in range(1, 10)}
    T = TreeDecomposition(tuple(range(10)), tuple((0, i) for i in range(1, 10)), bags)
    sep = balanced_bag_separator(star, T)
    assert sep.separator == {0}
    assert sep.balance(10) <= 1 / 2
    check_separation(star, sep)


def test_grid_udg_separator_components():
    inst = DiskInstance("euclidean", 0.5, tuple((float(i), float(j)) for i in range(10) for j in range(10)))
    G = intersection_graph(inst)
    assert G.m == 180
    sep = balanced_bag_separator(G, layered_to_global(G, decompose_eudg(inst)))
    rest = to_nx(G)
    rest.remove_nodes_from(sep.separator)
    assert max(len(c) for c in nx.connected_components(rest)) <= 50
    check_separation(G, sep)


@given(graphs(min_n=1, max_n=14), st.data())
def test_bag_separator_properties(G, data):
    _, tree = nx.algorithms.approximation.treewidth_min_fill_in(to_nx(G))
    nodes = list(tree.nodes)
    ids = {b: i for i, b in enumerate(nodes)}
    T = TreeDecomposition(tuple(range(len(nodes))), tuple((ids[a], ids[b]) for a, b in tree.edges), {i: frozenset(b) for i, b in enumerate(nodes)})
    verts = frozenset(data.draw(st.sets(st.integers(0, G.n - 1), min_size=1)))
    sep = balanced_bag_separator(G, T, verts)
    check_separation(G, sep, verts)
    assert any(sep.separator == T.bags[t] & verts for t in T.nodes)
    rest = to_nx(G).subgraph(verts - sep.separator)
    assert all(len(c) <= math.ceil(len(verts) / 2) for c in nx.connected_components(rest))


# --- clique covers -------------------------------------------------------------------------


def check_cover(G, S, cliques):
    assert all(G.is_clique(c) for c in cliques)
    assert sum(len(c) for c in cliques) == len(S)
    assert frozenset().union(*cliques) == frozenset(S)


def test_generic_cover_examples():
    C5 = gen_named("cycle", n=5)
    assert len(clique_cover_separator(C5, range(5))) == 3
    K6 = gen_named("complete", n=6)
    assert clique_cover_separator(K6, range(6)) == [frozenset(range(6))]


@given(graphs(max_n=14), st.data())
def test_generic_cover_size_bound(G, data):
    S = data.draw(st.sets(st.integers(0, max(G.n - 1, 0)), max_size=G.n))
    cliques = clique_cover_separator(G, S)
    check_cover(G, S, cliques)
    H, _ = G.induced(S)
    k = max(1, degeneracy_profile(H, "clique_cover").value)
    assert len(cliques) <= k * exact_alpha(H)[0]


@pytest.mark.parametrize("space", ["euclidean", "hyperbolic", "spherical"])
@pytest.mark.parametrize("seed", range(4))
def test_geometric_cover_verifies(space, seed):
    r = 0.5 if space != "spherical" else [0.2, 0.5, 1.0, 2.0][seed]
    extent = {"euclidean": 8.0, "hyperbolic": 4.0, "spherical": math.pi}[space]
    inst = gen_random_disks(space, 150, extent, r, seed)
    G = intersection_graph(inst)
    S = frozenset(range(0, inst.n, 2))
    cliques = clique_cover_separator(G, S, representation=inst)
    check_cover(G, S, cliques)
    H, _ = G.induced(S)
    assert len(cliques) <= 6 * exact_alpha(H, cap=1000)[0]


def test_udg_separator_cover_bound():
    inst = gen_random_disks("euclidean", 300, math.sqrt(300), 0.5, seed=3)
    G = intersection_graph(inst)
    sep = balanced_bag_separator(G, layered_to_global(G, decompose_eudg(inst)))
    cliques = clique_cover_separator(G, sep.separator, representation=inst)
    check_cover(G, sep.separator, cliques)
    assert len(cliques) <= 6 * induced_alpha(G, sep.separator, 1000)


# --- clique-based separators ------------------------------------------------------------------


def test_complete_graph_separator():
    K = gen_named("complete", n=7)
    cs = clique_based_separator(K, trivial(K))
    assert cs.size == 1 and cs.cliques == (frozenset(range(7)),)
    assert cs.weight == pytest.approx(math.log2(8))
    assert cs.balance == 0


def test_edgeless_separator():
    G = Graph.empty(9)
    D = LayeredDecomposition(TreeDecomposition.from_bags([{v} for v in range(9)]), Layering((0,) * 9), 1, "independence")
    cs = clique_based_separator(G, D)
    assert all(len(c) == 1 for c in cs.cliques)
    assert cs.balance <= 2 / 3


@pytest.mark.parametrize("n", [100, 300])
def test_udg_separator_size(n):
    inst = gen_random_disks("euclidean", n, math.sqrt(n), 0.5, seed=n)
    G = intersection_graph(inst)
    cs = clique_based_separator(G, decompose_eudg(inst), representation=inst)
    check_cover(G, cs.side_A & cs.side_B, cs.cliques)
    assert cs.size <= 6 * (math.ceil(2 * math.sqrt(4 * n)) + 4)
    assert cs.balance <= 2 / 3


def test_hudg_and_sudg_separators():
    inst = normalize_pole(gen_random_disks("hyperbolic", 200, 6.0, 1.0, seed=2))
    G = intersection_graph(inst)
    cs = clique_based_separator(G, decompose_hudg(inst), representation=inst)
    check_cover(G, cs.side_A & cs.side_B, cs.cliques)
    inst = gen_random_disks("spherical", 200, math.pi, 0.3, seed=2)
    G = intersection_graph(inst)
    cs = clique_based_separator(G, decompose_sudg(inst), representation=inst)
    check_cover(G, cs.side_A & cs.side_B, cs.cliques)
    assert cs.balance <= 2 / 3


@given(st.lists(st.sets(st.integers(0, 30), min_size=1), max_size=6), st.sets(st.integers(31, 60), min_size=1))
def test_weight_strictly_grows_by_added_clique(cliques, extra):
    before = clique_weight(cliques)
    after = clique_weight(cliques + [extra])
    assert after - before == pytest.approx(math.log2(len(extra) + 1))
    assert after > before


def test_build_sorts_cliques():
    sep = Separation(frozenset({0, 1, 2, 3}), frozenset({2, 3, 4}))
    cs = CliqueSeparator.build(sep, [frozenset({3}), frozenset({2})], 5)
    assert cs.cliques == (frozenset({2}), frozenset({3}))
    assert cs.balance == pytest.approx(2 / 5)


# --- recursive decompositions ---------------------------------------------------------------


def path_td(n):
    return TreeDecomposition.from_bags([{i, i + 1} for i in range(n - 1)])


def test_small_input_is_one_bag():
    T = separator_tree_decomposition(gen_named("path", n=8), bag_separator_oracle(path_td(8)))
    assert len(T.nodes) == 1 and T.bags[T.nodes[0]] == set(range(8))


def test_long_path_recursion():
    n = 100
    G = gen_named("path", n=n)
    T = separator_tree_decomposition(G, bag_separator_oracle(path_td(n)))
    assert validate_tree_decomposition(G, T).ok
    # each level adds one separator of independence number 1
    levels = math.ceil(math.log(n / 8, 3 / 2)) + 1
    assert max_bag_alpha(G, T) <= 8 + 2 * levels


def test_complete_graph_single_level():
    K = gen_named("complete", n=20)
    T = separator_tree_decomposition(K, bag_separator_oracle(TreeDecomposition.single_bag(range(20))))
    assert len(T.nodes) == 1 and validate_tree_decomposition(K, T).ok


@given(graphs(min_n=1, max_n=16), st.integers(1, 6))
def test_recursive_decomposition_validates(G, base):
    _, tree = nx.algorithms.approximation.treewidth_min_degree(to_nx(G))
    nodes = list(tree.nodes)
    ids = {b: i for i, b in enumerate(nodes)}
    T = TreeDecomposition(tuple(range(len(nodes))), tuple((ids[a], ids[b]) for a, b in tree.edges), {i: frozenset(b) for i, b in enumerate(nodes)})
    out = separator_tree_decomposition(G, bag_separator_oracle(T), base_size=base)
    assert validate_tree_decomposition(G, out).ok


def test_unbalanced_oracle_aborts():
    G = gen_named("path", n=12)

    def lopsided(G, vertices):
        v = min(vertices)
        return Separation(frozenset({v}), frozenset(vertices))

    with pytest.raises(PreconditionError, match="unbalanced"):
        separator_tree_decomposition(G, lopsided)


# --- small utilities --------------------------------------------------------------------------


def test_ramsey_bound():
    assert ramsey_tw_bound(1, 1) == 0
    assert ramsey_tw_bound(2, 1) == 1
    assert ramsey_tw_bound(3, 2) == 8
    assert ramsey_tw_bound(40, 40) == math.comb(80, 40) - 2


def test_independence_degeneracy_examples():
    assert independence_degeneracy_check(gen_named("star", n=4), 1)[::2] == (True, 1)
    assert independence_degeneracy_check(gen_named("cycle", n=4), 1)[::2] == (True, 2)
    inst = gen_random_disks("euclidean", 150, 10.0, 0.5, seed=8)
    D = decompose_eudg(inst)
    ok, order, value = independence_degeneracy_check(intersection_graph(inst), D.certified_bound)
    assert ok and value <= 3 * D.certified_bound
    assert sorted(order) == list(range(inst.n))
