"""Core combinatorial objects: graphs, layerings, (layered) tree decompositions.

Everything here is immutable after construction. Vertices are the integers
``0..n-1``; tree-decomposition nodes are arbitrary integers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InputError, StructuralError


def _as_fraction(w) -> Fraction:
    if isinstance(w, float):
        # floats are accepted at the boundary only; the exact binary value is kept
        return Fraction(w)
    return Fraction(w)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with optional non-negative rational vertex weights."""

    n: int
    adj: tuple[frozenset[int], ...]
    weights: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise InputError(f"adjacency has {len(self.adj)} rows for n={self.n}")
        for v, nbrs in enumerate(self.adj):
            if v in nbrs:
                raise InputError(f"self-loop at vertex {v}")
            for u in nbrs:
                if not 0 <= u < self.n:
                    raise InputError(f"vertex {v} has out-of-range neighbor {u}")
                if v not in self.adj[u]:
                    raise InputError(f"asymmetric adjacency between {v} and {u}")
        if self.weights is not None:
            if len(self.weights) != self.n:
                raise InputError(f"{len(self.weights)} weights given for n={self.n}")
            ws = tuple(_as_fraction(w) for w in self.weights)
            if any(w < 0 for w in ws):
                raise InputError("vertex weights must be non-negative")
            object.__setattr__(self, "weights", ws)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], weights=None) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge {u}-{v} out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(frozenset(s) for s in nbrs), None if weights is None else tuple(weights))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, tuple(frozenset() for _ in range(n)))

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def vertices(self) -> range:
        return range(self.n)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def weight(self, v: int) -> Fraction:
        return Fraction(1) if self.weights is None else self.weights[v]

    def total_weight(self, vertices: Iterable[int]) -> Fraction:
        return sum((self.weight(v) for v in vertices), Fraction(0))

    def with_weights(self, weights) -> Graph:
        return Graph(self.n, self.adj, None if weights is None else tuple(weights))

    def is_independent(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        s = set(vs)
        return len(s) == len(vs) and all(not (self.adj[v] & s) for v in s)

    def is_clique(self, vertices: Iterable[int]) -> bool:
        s = set(vertices)
        return all(s - {v} <= self.adj[v] for v in s)

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; returns it with the old ids in order."""
        old = sorted(set(vertices))
        index = {v: i for i, v in enumerate(old)}
        adj = tuple(frozenset(index[u] for u in self.adj[v] if u in index) for v in old)
        ws = None if self.weights is None else tuple(self.weights[v] for v in old)
        return Graph(len(old), adj, ws), old

    def complement(self) -> Graph:
        every = frozenset(range(self.n))
        return Graph(self.n, tuple(every - self.adj[v] - {v} for v in range(self.n)), self.weights)

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise InputError("relabelling must be a permutation of the vertex set")
        adj: list[frozenset[int]] = [frozenset()] * self.n
        for v in range(self.n):
            adj[perm[v]] = frozenset(perm[u] for u in self.adj[v])
        ws = None
        if self.weights is not None:
            w = [Fraction(0)] * self.n
            for v in range(self.n):
                w[perm[v]] = self.weights[v]
            ws = tuple(w)
        return Graph(self.n, tuple(adj), ws)

    def components(self, vertices: Iterable[int] | None = None) -> list[list[int]]:
        """Connected components of ``G[vertices]``, each sorted, ordered by least vertex."""
        allowed = set(range(self.n)) if vertices is None else set(vertices)
        seen: set[int] = set()
        comps = []
        for s in sorted(allowed):
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for u in self.adj[v]:
                    if u in allowed and u not in seen:
                        seen.add(u)
                        comp.append(u)
                        queue.append(u)
            comps.append(sorted(comp))
        return comps

    def bfs_distances(self, sources: Iterable[int], limit: int | None = None) -> dict[int, int]:
        """Multi-source BFS distances, truncated at ``limit`` if given."""
        dist = {s: 0 for s in sources}
        queue = deque(dist)
        while queue:
            v = queue.popleft()
            d = dist[v]
            if limit is not None and d >= limit:
                continue
            for u in self.adj[v]:
                if u not in dist:
                    dist[u] = d + 1
                    queue.append(u)
        return dist

    def ball(self, sources: Iterable[int], radius: int) -> frozenset[int]:
        return frozenset(self.bfs_distances(sources, radius))

    def adjacency_masks(self) -> list[int]:
        masks = []
        for v in range(self.n):
            m = 0
            for u in self.adj[v]:
                m |= 1 << u
            masks.append(m)
        return masks


class BoundKind(str, Enum):
    INDEPENDENCE = "independence"
    TREEWIDTH = "treewidth"
    CLIQUE_COVER = "clique_cover"


@dataclass(frozen=True)
class Layering:
    """Vertex -> layer index. Valid for ``G`` iff every edge spans at most one layer."""

    layer_of: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "layer_of", tuple(int(x) for x in self.layer_of))
        if any(x < 0 for x in self.layer_of):
            raise StructuralError("layer indices must be non-negative")

    def __len__(self) -> int:
        return len(self.layer_of)

    def __getitem__(self, v: int) -> int:
        return self.layer_of[v]

    def layers(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, i in enumerate(self.layer_of):
            out.setdefault(i, []).append(v)
        return dict(sorted(out.items()))


@dataclass(frozen=True)
class TreeDecomposition:
    nodes: tuple[int, ...]
    tree_edges: tuple[tuple[int, int], ...]
    bags: Mapping[int, frozenset[int]]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "tree_edges", tuple((int(a), int(b)) for a, b in self.tree_edges))
        object.__setattr__(self, "bags", {int(t): frozenset(b) for t, b in self.bags.items()})

    @classmethod
    def from_bags(cls, bags: Sequence[Iterable[int]], tree_edges=None) -> TreeDecomposition:
        """Bags indexed ``0..k-1``; default tree is the path ``0-1-...-(k-1)``."""
        k = len(bags)
        if tree_edges is None:
            tree_edges = [(i, i + 1) for i in range(k - 1)]
        return cls(tuple(range(k)), tuple(tree_edges), {i: frozenset(b) for i, b in enumerate(bags)})

    @classmethod
    def single_bag(cls, vertices: Iterable[int]) -> TreeDecomposition:
        return cls.from_bags([vertices])

    def __len__(self) -> int:
        return len(self.nodes)

    def neighbors(self) -> dict[int, list[int]]:
        nbrs: dict[int, list[int]] = {t: [] for t in self.nodes}
        for a, b in self.tree_edges:
            nbrs[a].append(b)
            nbrs[b].append(a)
        return nbrs

    def nodes_containing(self) -> dict[int, list[int]]:
        where: dict[int, list[int]] = {}
        for t in self.nodes:
            for v in self.bags[t]:
                where.setdefault(v, []).append(t)
        return where

    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def restrict(self, vertices: Iterable[int]) -> TreeDecomposition:
        """Same tree with every bag intersected with ``vertices`` (a decomposition of the induced subgraph)."""
        keep = frozenset(vertices)
        return TreeDecomposition(self.nodes, self.tree_edges, {t: b & keep for t, b in self.bags.items()})


@dataclass(frozen=True)
class LayeredDecomposition:
    """A tree decomposition plus a layering, certifying that every bag/layer
    intersection has the ``bound_kind`` quantity at most ``certified_bound``."""

    decomposition: TreeDecomposition
    layering: Layering
    certified_bound: int
    bound_kind: BoundKind
    construction: str = ""
    also_certifies: tuple[BoundKind, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "bound_kind", BoundKind(self.bound_kind))
        object.__setattr__(self, "also_certifies", tuple(BoundKind(k) for k in self.also_certifies))
        if self.certified_bound < 1:
            raise InputError("certified bound must be a positive integer")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    condition: str | None = None
    witness: object = None
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_layering(G: Graph, L: Layering) -> ValidationReport:
    if len(L) != G.n:
        raise StructuralError(f"layering covers {len(L)} vertices, graph has {G.n}")
    bad = tuple((u, v) for u, v in G.edges() if abs(L[u] - L[v]) > 1)
    if bad:
        return ValidationReport(False, "layering", bad[0], bad)
    return ValidationReport(True)


def _tree_shape(T: TreeDecomposition) -> ValidationReport:
    nodes = set(T.nodes)
    if len(nodes) != len(T.nodes):
        return ValidationReport(False, "tree_shape", "duplicate node ids")
    if set(T.bags) != nodes:
        return ValidationReport(False, "tree_shape", "bags keyed by unknown or missing nodes")
    for a, b in T.tree_edges:
        if a not in nodes or b not in nodes or a == b:
            return ValidationReport(False, "tree_shape", (a, b))
    if not nodes:
        return ValidationReport(True)
    if len(T.tree_edges) != len(nodes) - 1:
        return ValidationReport(False, "tree_shape", f"{len(T.tree_edges)} edges on {len(nodes)} nodes")
    nbrs = T.neighbors()
    start = T.nodes[0]
    seen = {start}
    stack = [start]
    while stack:
        t = stack.pop()
        for s in nbrs[t]:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    if len(seen) != len(nodes):
        return ValidationReport(False, "tree_shape", "tree edges are disconnected")
    return ValidationReport(True)


def validate_tree_decomposition(G: Graph, T: TreeDecomposition) -> ValidationReport:
    for t, bag in T.bags.items():
        for v in bag:
            if not 0 <= v < G.n:
                raise StructuralError(f"bag {t} holds out-of-range vertex {v}")
    if G.n > 0 and not T.nodes:
        return ValidationReport(False, "tree_shape", "no nodes")
    shape = _tree_shape(T)
    if not shape.ok:
        return shape
    where = T.nodes_containing()
    for v in range(G.n):
        if v not in where:
            return ValidationReport(False, "T1", v)
    for u, v in G.edges():
        if not set(where[u]).intersection(where[v]):
            return ValidationReport(False, "T2", (u, v))
    edge_count: dict[int, int] = {}
    for a, b in T.tree_edges:
        for v in T.bags[a] & T.bags[b]:
            edge_count[v] = edge_count.get(v, 0) + 1
    for v in range(G.n):
        # a sub-forest of a tree is connected iff it has (#nodes - 1) edges
        if edge_count.get(v, 0) != len(where[v]) - 1:
            return ValidationReport(False, "T3", v)
    return ValidationReport(True)


def validate_layered(G: Graph, D: LayeredDecomposition) -> ValidationReport:
    rep = validate_tree_decomposition(G, D.decomposition)
    if not rep.ok:
        return rep
    return validate_layering(G, D.layering)


# --- graph transformations -------------------------------------------------


def graph_power(G: Graph, d: int) -> Graph:
    """``G^d``: ``u ~ v`` iff ``0 < dist_G(u, v) <= d``."""
    if d < 1:
        raise InputError("power must be a positive integer")
    if d == 1:
        return G
    adj = tuple(frozenset(G.bfs_distances([v], d)) - {v} for v in range(G.n))
    return Graph(G.n, adj, G.weights)


def neighborhood_cliquify(G: Graph, P: Iterable[int], r: int) -> Graph:
    """Add every edge inside ``N^r[p]`` for each ``p`` in ``P``."""
    if r < 1:
        raise InputError("radius must be a positive integer")
    nbrs = [set(a) for a in G.adj]
    for p in sorted(set(P)):
        if not 0 <= p < G.n:
            raise InputError(f"vertex {p} not in graph")
        ball = G.ball([p], r)
        for u in ball:
            nbrs[u] |= ball
    return Graph(G.n, tuple(frozenset(s - {v}) for v, s in enumerate(nbrs)), G.weights)


def half_square(H: Graph, X: Iterable[int]) -> Graph:
    """Half-square ``H^2[X]``; vertex ``i`` of the result is ``sorted(X)[i]``."""
    xs = sorted(set(X))
    xset = set(xs)
    for u, v in H.edges():
        if (u in xset) == (v in xset):
            raise InputError(f"edge {u}-{v} lies inside one side of the bipartition")
    index = {x: i for i, x in enumerate(xs)}
    nbrs: list[set[int]] = [set() for _ in xs]
    for y in range(H.n):
        if y in xset:
            continue
        around = [index[x] for x in H.adj[y]]
        for a in around:
            nbrs[a].update(around)
    ws = None if H.weights is None else tuple(H.weights[x] for x in xs)
    return Graph(len(xs), tuple(frozenset(s - {i}) for i, s in enumerate(nbrs)), ws)
