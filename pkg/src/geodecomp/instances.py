"""Instance generators: random disk families, the spherical non-UDG family,
named graphs, planar map witnesses and random graphs with a witnessed
layered path decomposition."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import EmbeddingError, InputError
from .geometry import TWO_PI, DiskInstance, Space
from .graph import BoundKind, Graph, LayeredDecomposition, Layering, TreeDecomposition


def gen_random_disks(space: Space | str, n: int, extent: float, r: float, seed: int) -> DiskInstance:
    """Area-uniform centers: a square of side ``extent`` (euclidean), a disk of
    radius ``extent`` around the pole (hyperbolic), or the whole sphere."""
    space = Space(space)
    if n < 0 or r <= 0 or (space is not Space.SPHERICAL and extent <= 0):
        raise InputError("need n >= 0, r > 0 and extent > 0")
    rng = np.random.default_rng(seed)
    if space is Space.EUCLIDEAN:
        pts = rng.uniform(0.0, extent, size=(n, 2))
    elif space is Space.HYPERBOLIC:
        u = rng.uniform(0.0, 1.0, size=n)
        # density proportional to sinh b on [0, R]: cosh b uniform on [1, cosh R]
        b = np.arccosh(1.0 + u * (math.cosh(extent) - 1.0))
        theta = rng.uniform(0.0, TWO_PI, size=n)
        pts = np.column_stack([b, theta])
    else:
        z = rng.uniform(-1.0, 1.0, size=n)
        theta = rng.uniform(0.0, TWO_PI, size=n)
        pts = np.column_stack([np.arccos(z), theta])
    return DiskInstance(space, float(r), tuple(map(tuple, pts.tolist())))


def superclass_radius(k: int) -> float:
    lo = max(math.pi / 4, math.pi * (k - 1) / (2 * k + 1))
    hi = math.pi * k / (2 * k + 1)
    return (lo + hi) / 2


def gen_spherical_superclass(k: int) -> tuple[DiskInstance, Graph]:
    """Caps realising the complement of ``K_2 + C_{2k+1}``.

    Vertices ``0..2k`` sit evenly on the equator, ``2k+1`` and ``2k+2`` at
    the two poles. Returns the instance and the expected graph under this
    labelling.
    """
    if k < 1:
        raise InputError("k must be positive")
    m = 2 * k + 1
    centers = [(math.pi / 2, TWO_PI * j / m) for j in range(m)]
    centers += [(0.0, 0.0), (math.pi, 0.0)]
    # non-edges: each equator cap misses the two furthest ones, and the poles miss each other
    missing = {frozenset((j, (j + k) % m)) for j in range(m)} | {frozenset((m, m + 1))}
    n = m + 2
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if frozenset((u, v)) not in missing]
    return DiskInstance(Space.SPHERICAL, superclass_radius(k), tuple(centers)), Graph.from_edges(n, edges)


def _disjoint_union(a: Graph, b: Graph) -> Graph:
    edges = a.edges() + [(u + a.n, v + a.n) for u, v in b.edges()]
    return Graph.from_edges(a.n + b.n, edges)


def gen_named(name: str, **params) -> Graph:
    """Standard graphs: ``path``/``cycle``/``complete``/``star`` (``n``),
    ``grid`` (``rows``, ``cols``), ``complete_bipartite`` (``a``, ``b``),
    ``petersen``, ``octahedron`` and ``complement_disjoint`` (``parts``: a
    list of ``[name, params]`` pairs whose disjoint union is complemented)."""
    if name == "path":
        n = params["n"]
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if name == "cycle":
        n = params["n"]
        if n < 3:
            raise InputError("a cycle needs at least 3 vertices")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if name == "complete":
        n = params["n"]
        return Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n)])
    if name == "star":
        m = params["n"]
        return Graph.from_edges(m + 1, [(0, i) for i in range(1, m + 1)])
    if name == "grid":
        rows, cols = params["rows"], params["cols"]
        edges = []
        for i in range(rows):
            for j in range(cols):
                v = i * cols + j
                if j + 1 < cols:
                    edges.append((v, v + 1))
                if i + 1 < rows:
                    edges.append((v, v + cols))
        return Graph.from_edges(rows * cols, edges)
    if name == "complete_bipartite":
        a, b = params["a"], params["b"]
        return Graph.from_edges(a + b, [(u, a + v) for u in range(a) for v in range(b)])
    if name == "petersen":
        outer = [(i, (i + 1) % 5) for i in range(5)]
        inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
        spokes = [(i, i + 5) for i in range(5)]
        return Graph.from_edges(10, outer + inner + spokes)
    if name == "octahedron":
        return Graph.from_edges(6, [(u, v) for u in range(6) for v in range(u + 1, 6) if v != u + 3 or u >= 3])
    if name == "complement_disjoint":
        parts = [gen_named(p_name, **p_params) for p_name, p_params in params["parts"]]
        g = Graph.empty(0)
        for part in parts:
            g = _disjoint_union(g, part)
        return g.complement()
    raise InputError(f"unknown graph name {name!r}")


# --- planar witnesses -----------------------------------------------------------


@dataclass(frozen=True)
class PlanarWitness:
    """Bipartite plane graph ``H`` with nations ``side_X``; ``rotation[v]`` is
    the counter-clockwise cyclic order of the neighbours of ``v``."""

    graph: Graph
    side_X: frozenset[int]
    rotation: Mapping[int, tuple[int, ...]]

    def __post_init__(self):
        object.__setattr__(self, "side_X", frozenset(self.side_X))
        object.__setattr__(self, "rotation", {int(v): tuple(o) for v, o in self.rotation.items()})


def check_rotation(G: Graph, rotation: Mapping[int, Sequence[int]]) -> None:
    for v in range(G.n):
        order = tuple(rotation.get(v, ()))
        if len(order) != len(set(order)) or set(order) != G.adj[v]:
            raise EmbeddingError(f"rotation at vertex {v} does not list its neighbours exactly once")


def trace_faces(G: Graph, rotation: Mapping[int, Sequence[int]]) -> list[list[tuple[int, int]]]:
    """Faces of the embedding as cycles of darts ``(u, v)``.

    After traversing ``u -> v`` the walk continues along the edge that
    follows ``u`` in the rotation at ``v``.
    """
    check_rotation(G, rotation)
    pos = {v: {u: i for i, u in enumerate(rotation[v])} for v in range(G.n) if G.adj[v]}
    seen: set[tuple[int, int]] = set()
    faces = []
    for u, v in sorted((u, v) for u in range(G.n) for v in G.adj[u]):
        if (u, v) in seen:
            continue
        face = []
        dart = (u, v)
        while dart not in seen:
            seen.add(dart)
            face.append(dart)
            a, b = dart
            order = rotation[b]
            nxt = order[(pos[b][a] + 1) % len(order)]
            dart = (b, nxt)
        faces.append(face)
    return faces


def euler_characteristics(G: Graph, rotation: Mapping[int, Sequence[int]]) -> list[tuple[int, int, int]]:
    """``(V, E, F)`` per connected component; planar iff each has ``V - E + F = 2``."""
    faces = trace_faces(G, rotation)
    comp_of = {}
    comps = G.components()
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    face_count = [0] * len(comps)
    for f in faces:
        face_count[comp_of[f[0][0]]] += 1
    out = []
    for ci, comp in enumerate(comps):
        e = sum(G.degree(v) for v in comp) // 2
        f = face_count[ci] if e else 1
        out.append((len(comp), e, f))
    return out


def is_planar_rotation(G: Graph, rotation: Mapping[int, Sequence[int]]) -> bool:
    return all(v - e + f == 2 for v, e, f in euler_characteristics(G, rotation))


def _rotation_from_coords(G: Graph, coords: Sequence[tuple[float, float]]) -> dict[int, tuple[int, ...]]:
    rot = {}
    for v in range(G.n):
        x0, y0 = coords[v]
        rot[v] = tuple(sorted(G.adj[v], key=lambda u: math.atan2(coords[u][1] - y0, coords[u][0] - x0)))
    return rot


def gen_map_witness(rows: int, cols: int) -> PlanarWitness:
    """Grid map: nations are the ``rows x cols`` cells (ids in row-major order),
    the remaining vertices are the grid points, each cell joined to its four
    corners. Its half-square is the king graph on the cells."""
    if rows < 1 or cols < 1:
        raise InputError("rows and cols must be positive")
    nations = rows * cols

    def point(a: int, b: int) -> int:
        return nations + a * (cols + 1) + b

    n = nations + (rows + 1) * (cols + 1)
    edges = []
    coords: list[tuple[float, float]] = [(0.0, 0.0)] * n
    for i in range(rows):
        for j in range(cols):
            c = i * cols + j
            coords[c] = (j + 0.5, i + 0.5)
            for a, b in ((i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1)):
                edges.append((c, point(a, b)))
    for a in range(rows + 1):
        for b in range(cols + 1):
            coords[point(a, b)] = (float(b), float(a))
    H = Graph.from_edges(n, edges)
    return PlanarWitness(H, frozenset(range(nations)), _rotation_from_coords(H, coords))


def gen_random_map_witness(rows: int, cols: int, seed: int, drop: float = 0.3) -> PlanarWitness:
    """Grid witness with each nation-corner incidence removed with probability
    ``drop`` (every nation keeps at least one corner); grid points left without
    nations are deleted."""
    base = gen_map_witness(rows, cols)
    rng = np.random.default_rng(seed)
    H = base.graph
    nations = sorted(base.side_X)
    keep_edges = []
    for c in nations:
        corners = sorted(H.adj[c])
        kept = [p for p in corners if rng.uniform() >= drop]
        if not kept:
            kept = [corners[int(rng.integers(len(corners)))]]
        keep_edges.extend((c, p) for p in kept)
    used = sorted(set(nations) | {p for _, p in keep_edges})
    index = {v: i for i, v in enumerate(used)}
    G = Graph.from_edges(len(used), [(index[a], index[b]) for a, b in keep_edges])
    rotation = {index[v]: tuple(index[u] for u in base.rotation[v] if u in used and index[u] in G.adj[index[v]]) for v in used}
    return PlanarWitness(G, frozenset(index[c] for c in nations), rotation)


# --- graphs with a witnessed layered path decomposition -----------------------


def gen_layered_pathwidth(n: int, num_layers: int, k: int, p: float, seed: int) -> tuple[Graph, LayeredDecomposition]:
    """Random graph with a path decomposition and layering of layered width ``k``.

    Each layer keeps a window of at most ``k`` active vertices; new vertices
    enter a random layer (evicting the oldest active one when the window is
    full) and connect with probability ``p`` to active vertices in the same or
    an adjacent layer. The bags are the active sets after each insertion.
    """
    if n < 1 or num_layers < 1 or k < 1:
        raise InputError("need n, num_layers, k >= 1")
    rng = np.random.default_rng(seed)
    active: list[list[int]] = [[] for _ in range(num_layers)]
    layer_of = []
    edges = []
    bags = []
    for v in range(n):
        i = int(rng.integers(num_layers))
        if len(active[i]) == k:
            active[i].pop(0)
        layer_of.append(i)
        for j in (i - 1, i, i + 1):
            if 0 <= j < num_layers:
                for u in active[j]:
                    if rng.uniform() < p:
                        edges.append((u, v))
        active[i].append(v)
        bags.append(frozenset(x for layer in active for x in layer))
    G = Graph.from_edges(n, edges)
    D = LayeredDecomposition(
        TreeDecomposition.from_bags(bags), Layering(tuple(layer_of)), k, BoundKind.TREEWIDTH, "random layered path"
    )
    return G, D


def path_decomposition(G: Graph) -> LayeredDecomposition:
    """Layered width 1 witness for a disjoint union of paths numbered along each path."""
    bags = [frozenset((u, v)) for u, v in G.edges()] + [frozenset((v,)) for v in range(G.n) if not G.adj[v]]
    for u, v in G.edges():
        if v != u + 1:
            raise InputError("expects consecutive numbering along paths")
    bags.sort(key=min)
    return LayeredDecomposition(
        TreeDecomposition.from_bags(bags), Layering(tuple(range(G.n))), 1, BoundKind.TREEWIDTH, "path"
    )
