"""From layered witnesses to global decompositions and clique-based separators."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import PreconditionError
from .geometry import DiskInstance, PlanarDisk, Space, TWO_PI, distance, stereographic_project
from .graph import Graph, LayeredDecomposition, TreeDecomposition
from .oracles import _bits, _mask_of, _theta_mask, degeneracy_profile, oracle_cap


# --- global decomposition from a layered one ----------------------------------


def period_for(n: int, k: int) -> int:
    return max(1, round(math.sqrt(n / k)))


def global_bound(n: int, k: int) -> int:
    """Guaranteed independence number of :func:`layered_to_global` bags."""
    return math.ceil(2 * math.sqrt(k * n)) + k


def layered_to_global(G: Graph, D: LayeredDecomposition) -> TreeDecomposition:
    """Tree decomposition with bag independence number at most ``p*k + n/p``.

    Every ``p``-th layer (the residue class ``c`` with fewest vertices) is put
    into all bags; the layers between consecutive removed ones form bands, each
    covered by a copy of the input tree restricted to the band.
    """
    n = G.n
    k = D.certified_bound
    if n == 0:
        return TreeDecomposition.from_bags([])
    p = period_for(n, k)
    layer_of = D.layering.layer_of
    counts = [0] * p
    for i in layer_of:
        counts[i % p] += 1
    c = min(range(p), key=lambda j: (counts[j], j))
    S = frozenset(v for v in range(n) if layer_of[v] % p == c)
    bands: dict[int, set[int]] = {}
    for v in range(n):
        if v not in S:
            # band b spans the layers strictly between c + (b-1)p and c + bp
            bands.setdefault((layer_of[v] - c) // p, set()).add(v)
    T = D.decomposition
    if not bands:
        return TreeDecomposition.single_bag(S)
    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []
    index = {t: i for i, t in enumerate(T.nodes)}
    for b in sorted(bands):
        band = bands[b]
        base = len(bags)
        bags.extend((T.bags[t] & band) | S for t in T.nodes)
        edges.extend((base + index[a], base + index[z]) for a, z in T.tree_edges)
        if base:
            edges.append((base - len(T.nodes), base))
    return TreeDecomposition.from_bags(bags, edges)


# --- balanced separations -------------------------------------------------------


@dataclass(frozen=True)
class Separation:
    side_A: frozenset[int]
    side_B: frozenset[int]

    @property
    def separator(self) -> frozenset[int]:
        return self.side_A & self.side_B

    def balance(self, n: int) -> float:
        if n == 0:
            return 0.0
        return max(len(self.side_A - self.side_B), len(self.side_B - self.side_A)) / n


def _centroid_node(T: TreeDecomposition, vertices: frozenset[int]) -> int:
    """Node whose removal leaves tree sides each holding at most half of the
    vertices, counting a vertex at the node of its bag closest to the root."""
    root = T.nodes[0]
    nbrs = T.neighbors()
    order, parent = [root], {root: None}
    for t in order:
        for s in nbrs[t]:
            if s not in parent:
                parent[s] = t
                order.append(s)
    weight = {t: 0 for t in T.nodes}
    placed: set[int] = set()
    for t in order:
        fresh = (T.bags[t] & vertices) - placed
        weight[t] += len(fresh)
        placed |= fresh
    sub = dict(weight)
    for t in reversed(order):
        if parent[t] is not None:
            sub[parent[t]] += sub[t]
    half = len(vertices) / 2
    t = root
    while True:
        heavy = [s for s in nbrs[t] if parent.get(s) == t and sub[s] > half]
        if not heavy:
            return t
        t = heavy[0]


def _pack(parts: list[list[int]], sep: frozenset[int]) -> Separation:
    """Greedy largest-first packing of components into the lighter side."""
    a: set[int] = set()
    b: set[int] = set()
    for comp in sorted(parts, key=lambda c: (-len(c), c[0])):
        (a if len(a) <= len(b) else b).update(comp)
    return Separation(frozenset(a) | sep, frozenset(b) | sep)


def balanced_bag_separator(G: Graph, T: TreeDecomposition, vertices: Iterable[int] | None = None) -> Separation:
    """Separation ``(A, B)`` of ``G[vertices]`` with ``A & B`` a bag of ``T``.

    Components of the graph minus the chosen bag have at most half of the
    vertices each, so the packed sides hold at most two thirds.
    """
    verts = frozenset(range(G.n)) if vertices is None else frozenset(vertices)
    if not verts or not T.nodes:
        return Separation(verts, verts)
    t = _centroid_node(T, verts)
    sep = T.bags[t] & verts
    return _pack(G.components(verts - sep), sep)


# --- clique covers of separators --------------------------------------------


def _generic_cover(G: Graph, S: frozenset[int], cap: int | None) -> list[frozenset[int]]:
    masks = G.adjacency_masks()
    cap = oracle_cap("theta", cap)
    alive = _mask_of(S)
    value: dict[int, int] = {}

    def measure(v: int) -> int:
        return len(_theta_mask(masks, masks[v] & alive, cap))

    for v in S:
        value[v] = measure(v)
    cliques: list[frozenset[int]] = []
    while alive:
        v = min(_bits(alive), key=lambda u: (value[u], u))
        parts = _theta_mask(masks, masks[v] & alive, cap)
        if parts:
            parts = sorted(parts, key=lambda m: (m & -m))
            parts[0] |= 1 << v
        else:
            parts = [1 << v]
        cliques.extend(frozenset(_bits(m)) for m in parts)
        removed = (masks[v] & alive) | (1 << v)
        alive &= ~removed
        touched = 0
        for u in _bits(removed):
            touched |= masks[u]
        for u in _bits(touched & alive):
            value[u] = measure(u)
    return cliques


def _split_into_cliques(G: Graph, group: list[int]) -> list[frozenset[int]]:
    if G.is_clique(group):
        return [frozenset(group)]
    mid = len(group) // 2
    return _split_into_cliques(G, group[:mid]) + _split_into_cliques(G, group[mid:])


def _planar_objects(rep: DiskInstance) -> list[PlanarDisk]:
    """Shapes whose center directions are used for sectors: euclidean disks
    as-is, hyperbolic centers in the Poincare disk, spherical caps projected
    from the point furthest from all centers among a fixed sample."""
    r = rep.radius
    if rep.space is Space.EUCLIDEAN:
        return [PlanarDisk(c, r) for c in rep.centers]
    if rep.space is Space.HYPERBOLIC:
        return [PlanarDisk((math.tanh(b / 2) * math.cos(t), math.tanh(b / 2) * math.sin(t)), r) for b, t in rep.centers]
    samples = [(math.acos(1 - 2 * (i + 0.5) / 64), (i * 2.399963229728653) % TWO_PI) for i in range(64)]
    best = max(samples, key=lambda q: min((distance(Space.SPHERICAL, q, c) for c in rep.centers), default=math.pi))
    return stereographic_project(rep, best)[0]


def _sector_angle(rep: DiskInstance, objs: list[PlanarDisk], v: int, u: int) -> float:
    if rep.space is Space.HYPERBOLIC:
        zv = complex(*objs[v].center)
        zu = complex(*objs[u].center)
        # Mobius map sending zv to the origin preserves angles at zv
        w = (zu - zv) / (1 - zv.conjugate() * zu)
        return cmath.phase(w) % TWO_PI
    (x0, y0), (x1, y1) = objs[v].center, objs[u].center
    return math.atan2(y1 - y0, x1 - x0) % TWO_PI


def _geometric_cover(G: Graph, S: frozenset[int], rep: DiskInstance) -> list[frozenset[int]]:
    objs = _planar_objects(rep)
    alive = set(S)
    cliques: list[frozenset[int]] = []
    while alive:
        v = min(alive, key=lambda u: (objs[u].complement, objs[u].radius, u))
        around = sorted(u for u in G.adj[v] if u in alive)
        groups: dict[int, list[int]] = {0: [v]} if not objs[v].complement else {-1: [v]}
        for u in around:
            if objs[u].complement:
                key = -1  # every cap containing the projection point shares it
            else:
                key = int(_sector_angle(rep, objs, v, u) // (math.pi / 3)) % 6
            groups.setdefault(key, []).append(u)
        local: list[frozenset[int]] = []
        for key in sorted(groups):
            local.extend(_split_into_cliques(G, sorted(groups[key])))
        cliques.extend(_merge_cliques(G, local))
        alive -= {v, *around}
    return cliques


def _merge_cliques(G: Graph, parts: list[frozenset[int]]) -> list[frozenset[int]]:
    """Greedily join pieces whose union is still a clique (sectors can cut a
    clique apart when projected shapes are badly distorted)."""
    merged: list[frozenset[int]] = []
    for part in sorted(parts, key=lambda c: (-len(c), min(c))):
        for i, m in enumerate(merged):
            if G.is_clique(m | part):
                merged[i] = m | part
                break
        else:
            merged.append(part)
    return merged


def clique_cover_separator(
    G: Graph, S: Iterable[int], representation: DiskInstance | None = None, cap: int | None = None
) -> list[frozenset[int]]:
    """Partition ``S`` into cliques of ``G``.

    Without a representation: repeatedly take the vertex whose remaining
    neighbourhood has the smallest exact clique cover number and cover its
    closed neighbourhood optimally. With one: take the smallest (lowest id)
    disk and split its closed neighbourhood into six 60-degree sectors, each
    checked to be a clique and halved until it is.
    """
    S = frozenset(S)
    if representation is None:
        return _generic_cover(G, S, cap)
    if representation.n != G.n:
        raise PreconditionError("representation and graph sizes differ")
    return _geometric_cover(G, S, representation)


# --- clique-based separators ------------------------------------------------------


def clique_weight(cliques: Iterable[Iterable[int]]) -> float:
    return sum(math.log2(len(frozenset(c)) + 1) for c in cliques)


@dataclass(frozen=True)
class CliqueSeparator:
    side_A: frozenset[int]
    side_B: frozenset[int]
    cliques: tuple[frozenset[int], ...]
    size: int
    weight: float
    balance: float

    @classmethod
    def build(cls, sep: Separation, cliques: Sequence[frozenset[int]], n: int) -> CliqueSeparator:
        cl = tuple(sorted((frozenset(c) for c in cliques), key=lambda c: min(c)))
        return cls(sep.side_A, sep.side_B, cl, len(cl), clique_weight(cl), sep.balance(n))


def clique_based_separator(
    G: Graph, D: LayeredDecomposition, representation: DiskInstance | None = None, cap: int | None = None
) -> CliqueSeparator:
    T = layered_to_global(G, D)
    sep = balanced_bag_separator(G, T)
    cliques = clique_cover_separator(G, sep.separator, representation, cap)
    return CliqueSeparator.build(sep, cliques, G.n)


# --- recursive decompositions from separators --------------------------------------

SeparatorOracle = Callable[[Graph, frozenset], Separation]


def bag_separator_oracle(T: TreeDecomposition) -> SeparatorOracle:
    """Oracle splitting any induced subgraph by a bag of ``T`` restricted to it."""

    def oracle(G: Graph, vertices: frozenset) -> Separation:
        return balanced_bag_separator(G, T, vertices)

    return oracle


def separator_tree_decomposition(G: Graph, separator_oracle: SeparatorOracle, base_size: int = 8) -> TreeDecomposition:
    """Recursively separate; the separator joins every bag on both sides.

    The oracle receives the graph and a vertex subset and returns a separation
    of the induced subgraph. A side of more than two thirds aborts.
    """
    bags: list[set[int]] = []
    edges: list[tuple[int, int]] = []

    def build(vertices: frozenset[int]) -> list[int]:
        """Create nodes for ``G[vertices]``; returns the node ids made."""
        if len(vertices) <= base_size:
            bags.append(set(vertices))
            return [len(bags) - 1]
        sep = separator_oracle(G, vertices)
        if sep.side_A | sep.side_B != vertices:
            raise PreconditionError("oracle separation does not cover the vertex set")
        a_only, b_only = sep.side_A - sep.side_B, sep.side_B - sep.side_A
        if max(len(a_only), len(b_only)) > 2 * len(vertices) / 3:
            raise PreconditionError(
                f"unbalanced separation on {len(vertices)} vertices: sides {len(a_only)} and {len(b_only)}"
            )
        S = sep.separator
        made: list[int] = []
        for part in (a_only, b_only):
            if part:
                sub = build(part)
                if made:
                    edges.append((made[0], sub[0]))
                made.extend(sub)
        if not made:
            bags.append(set())
            made = [len(bags) - 1]
        for t in made:
            bags[t] |= S
        return made

    if G.n:
        build(frozenset(range(G.n)))
    return TreeDecomposition.from_bags(bags, edges)


# --- small utilities -----------------------------------------------------------------


def ramsey_tw_bound(omega: int, k: int) -> int:
    """Treewidth bound ``C(omega + k, omega) - 2`` for graphs with clique number
    ``omega`` and tree-independence number ``k``."""
    if omega < 1 or k < 1:
        raise PreconditionError("omega and k must be positive")
    return math.comb(omega + k, omega) - 2


def independence_degeneracy_check(G: Graph, k: int, cap: int | None = None) -> tuple[bool, tuple[int, ...], int]:
    """Whether the greedy elimination certifies independence degeneracy ``<= 3k``.

    Returns the verdict, the elimination order and the degeneracy value.
    """
    prof = degeneracy_profile(G, "independence", cap=cap)
    return prof.value <= 3 * k, prof.elimination_order, prof.value
