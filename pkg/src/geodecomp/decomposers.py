"""Constructive layered decompositions.

Every function returns a :class:`LayeredDecomposition` whose
``certified_bound`` is the bound the construction guarantees; callers can
check it exactly with :func:`geodecomp.oracles.layered_independence`.
"""

from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Mapping, Sequence

from .errors import EmbeddingError, PreconditionError
from .geometry import DiskInstance, Space, angular_extent, intersection_graph
from .graph import BoundKind, Graph, LayeredDecomposition, Layering, TreeDecomposition
from .instances import PlanarWitness, check_rotation, euler_characteristics, trace_faces

SWEEP_TOL = 1e-9


def hudg_bound(r: float) -> int:
    return 6 * math.ceil(r / math.tanh(r))


def power_bound(d: int, k: int) -> int:
    return 2 * d * k if d % 2 == 0 else (2 * d - 1) * k


# --- sweeps -------------------------------------------------------------------


def _dedup_index(values: Sequence[float], tol: float = SWEEP_TOL) -> dict[float, int]:
    """Map each value to the index of its tolerance class in ascending order."""
    index: dict[float, int] = {}
    anchor = None
    k = -1
    for x in sorted(set(values)):
        if anchor is None or x - anchor > tol:
            anchor = x
            k += 1
        index[x] = k
    return index


def _sweep_path(
    n: int,
    intervals: Mapping[int, tuple[float, float]],
    G: Graph,
    always: Iterable[int] = (),
    lead: bool = False,
) -> TreeDecomposition:
    """Path decomposition from sweep intervals.

    Node ``j`` holds every vertex whose interval contains the ``j``-th distinct
    endpoint, plus ``always``. With ``lead`` an extra first node holds only
    ``always``. Adjacent vertices whose intervals miss each other by rounding
    (tangencies within the tolerance) get their intervals stretched.
    """
    always = frozenset(always)
    ends = [x for lo, hi in intervals.values() for x in (lo, hi)]
    index = _dedup_index(ends)
    span = {v: [index[lo], index[hi]] for v, (lo, hi) in intervals.items()}
    for u, v in G.edges():
        if u in span and v in span:
            a, b = span[u], span[v]
            if a[1] < b[0]:
                a[1] = b[0]
            elif b[1] < a[0]:
                b[1] = a[0]
    if n == 0:
        return TreeDecomposition.from_bags([])
    m = len(set(index.values()))
    offset = 1 if lead else 0
    bags: list[set[int]] = [set(always) for _ in range(m + offset)]
    for v, (lo, hi) in span.items():
        for j in range(lo, hi + 1):
            bags[j + offset].add(v)
    return TreeDecomposition.from_bags(bags)


def _annulus_layers(instance: DiskInstance) -> Layering:
    two_r = 2 * instance.radius
    # layer i holds centers with 2ir < b <= 2(i+1)r; the pole itself joins layer 0
    return Layering(tuple(max(0, math.ceil(b / two_r) - 1) for b, _ in instance.centers))


def decompose_hudg(instance: DiskInstance) -> LayeredDecomposition:
    """Annulus layering plus an angular sweep of rays from the pole.

    The instance must already be pole-normalised (no disk meets the polar axis).
    """
    if instance.space is not Space.HYPERBOLIC:
        raise PreconditionError("decompose_hudg needs a hyperbolic instance")
    intervals = {}
    for v in range(instance.n):
        ext = angular_extent(instance, v)
        if ext.hits_axis:
            raise PreconditionError(f"disk {v} meets the polar axis; apply normalize_pole first")
        intervals[v] = (ext.theta_min, ext.theta_max)
    G = intersection_graph(instance)
    T = _sweep_path(instance.n, intervals, G)
    return LayeredDecomposition(T, _annulus_layers(instance), hudg_bound(instance.radius), BoundKind.INDEPENDENCE, "hyperbolic angular sweep")


def decompose_sudg(instance: DiskInstance) -> LayeredDecomposition:
    """Annulus layering; disks meeting the polar axis go into every bag and the
    rest are swept by meridians."""
    if instance.space is not Space.SPHERICAL:
        raise PreconditionError("decompose_sudg needs a spherical instance")
    axis, intervals = [], {}
    for v in range(instance.n):
        ext = angular_extent(instance, v)
        if ext.hits_axis:
            axis.append(v)
        else:
            intervals[v] = (ext.theta_min, ext.theta_max)
    G = intersection_graph(instance)
    T = _sweep_path(instance.n, intervals, G, always=axis, lead=True)
    return LayeredDecomposition(T, _annulus_layers(instance), 30, BoundKind.INDEPENDENCE, "spherical meridian sweep")


def decompose_eudg(instance: DiskInstance) -> LayeredDecomposition:
    """Vertical strips of width ``2r`` and a horizontal-line sweep.

    A bag/strip intersection has all centers in a ``2r x 2r`` box whose four
    quadrants each hold at most one center of an independent set.
    """
    if instance.space is not Space.EUCLIDEAN:
        raise PreconditionError("decompose_eudg needs a euclidean instance")
    r = instance.radius
    x0 = min((x for x, _ in instance.centers), default=0.0)
    layering = Layering(tuple(int((x - x0) // (2 * r)) for x, _ in instance.centers))
    intervals = {v: (y - r, y + r) for v, (_, y) in enumerate(instance.centers)}
    T = _sweep_path(instance.n, intervals, intersection_graph(instance))
    return LayeredDecomposition(T, layering, 4, BoundKind.INDEPENDENCE, "euclidean strip sweep")


# --- planar graphs ------------------------------------------------------------


def _bfs_forest(G: Graph, roots: Sequence[int] | None = None) -> tuple[list[int], list[int], list[list[int]]]:
    """BFS layers and parents, one tree per component. ``roots`` are tried first,
    then the lowest-id unvisited vertex. Returns (depth, parent, components)."""
    depth = [-1] * G.n
    parent = [-1] * G.n
    comps = []
    order = list(roots or []) + list(range(G.n))
    for s in order:
        if depth[s] >= 0:
            continue
        depth[s] = 0
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in G.neighbors(u):
                if depth[w] < 0:
                    depth[w] = depth[u] + 1
                    parent[w] = u
                    comp.append(w)
                    queue.append(w)
        comps.append(comp)
    return depth, parent, comps


def _planar_component(G: Graph, rotation, comp: list[int], parent: list[int], faces) -> list[tuple[frozenset[int], list[int]]]:
    """Bags and dual-tree adjacency for one connected component.

    Each face walk is fan-triangulated as a polygon of corners; the triangles'
    dual edges across non-tree edges form a tree, and a triangle's bag is the
    union of the BFS-tree root paths of its corners.
    """
    if len(comp) <= 2:
        return [(frozenset(comp), [])]
    root_path: dict[int, frozenset[int]] = {}
    for v in comp:  # BFS order, parents first
        p = parent[v]
        root_path[v] = frozenset((v,)) | (root_path[p] if p >= 0 else frozenset())
    tree_edge = {frozenset((v, parent[v])) for v in comp if parent[v] >= 0}

    triangles: list[tuple[int, int, int]] = []
    sides: dict[tuple[int, int], int] = {}  # dart -> triangle on its side
    chords: list[tuple[int, int]] = []  # pairs of triangles separated by a chord
    for face in faces:
        corners = [a for a, _ in face]
        L = len(corners)
        base = len(triangles)
        for i in range(1, L - 1):
            triangles.append((corners[0], corners[i], corners[i + 1]))
        for j, dart in enumerate(face):
            sides[dart] = base + min(max(j, 1), L - 2) - 1
        for i in range(2, L - 1):
            chords.append((base + i - 2, base + i - 1))

    adj: list[list[int]] = [[] for _ in triangles]
    for a, b in chords:
        adj[a].append(b)
        adj[b].append(a)
    for u in comp:
        for v in G.adj[u]:
            if u < v and frozenset((u, v)) not in tree_edge:
                a, b = sides[(u, v)], sides[(v, u)]
                adj[a].append(b)
                adj[b].append(a)
    n_dual_edges = sum(len(x) for x in adj) // 2
    if n_dual_edges != len(triangles) - 1:
        raise EmbeddingError("dual of the co-tree is not a tree; rotation is not a plane embedding")
    return [(root_path[a] | root_path[b] | root_path[c], adj[t]) for t, (a, b, c) in enumerate(triangles)]


def decompose_planar_ltw(
    G: Graph, rotation: Mapping[int, Sequence[int]], roots: Sequence[int] | None = None
) -> LayeredDecomposition:
    """BFS layering and root-path bags over a triangulation; layered treewidth 3.

    ``rotation[v]`` lists the neighbours of ``v`` in cyclic order. Components
    are handled separately and their trees chained together.
    """
    check_rotation(G, rotation)
    if any(v - e + f != 2 for v, e, f in euler_characteristics(G, rotation)):
        raise EmbeddingError("rotation system does not describe a planar embedding")
    depth, parent, comps = _bfs_forest(G, roots)
    faces_of: dict[int, list] = {}
    comp_id = {v: i for i, comp in enumerate(comps) for v in comp}
    for face in trace_faces(G, rotation):
        faces_of.setdefault(comp_id[face[0][0]], []).append(face)

    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []
    for ci, comp in enumerate(comps):
        base = len(bags)
        part = _planar_component(G, rotation, comp, parent, faces_of.get(ci, []))
        for t, (bag, nbrs) in enumerate(part):
            bags.append(bag)
            edges.extend((base + t, base + s) for s in nbrs if s > t)
        if base:
            edges.append((base - 1, base))
    T = TreeDecomposition.from_bags(bags, edges)
    return LayeredDecomposition(T, Layering(tuple(depth)), 3, BoundKind.TREEWIDTH, "planar root-path triangulation")


# --- half-squares and map graphs ------------------------------------------------


def decompose_bipartite_cliquified(H: Graph, side_X: Iterable[int], D: LayeredDecomposition) -> LayeredDecomposition:
    """Decomposition of ``half_square(H, side_X)`` from a bipartite layering of ``H``.

    The nations must all sit in layers of one parity and every non-isolated
    vertex of the other side in layers of the other parity; the nation layers
    become the new layers. Output vertex ``i`` is ``sorted(side_X)[i]``.
    """
    if D.bound_kind is not BoundKind.TREEWIDTH:
        raise PreconditionError("needs a layered treewidth witness")
    xs = sorted(set(side_X))
    xset = set(xs)
    L = D.layering
    parities = {L[x] % 2 for x in xs}
    if len(parities) > 1:
        raise PreconditionError("nations occupy layers of both parities; layering is not bipartite")
    q = parities.pop() if parities else 0
    for y in range(H.n):
        if y not in xset and H.adj[y] and L[y] % 2 == q:
            raise PreconditionError(f"vertex {y} shares a layer parity with the nations")
    index = {x: i for i, x in enumerate(xs)}
    T = D.decomposition
    bags = {}
    for t in T.nodes:
        bag = T.bags[t]
        out = {index[v] for v in bag if v in xset}
        for p in bag:
            if p not in xset:
                out.update(index[u] for u in H.adj[p])
        bags[t] = frozenset(out)
    layering = Layering(tuple((L[x] - q) // 2 for x in xs))
    return LayeredDecomposition(
        TreeDecomposition(T.nodes, T.tree_edges, bags), layering, 3 * D.certified_bound, BoundKind.INDEPENDENCE, "bipartite half-square"
    )


def decompose_map(witness: PlanarWitness) -> LayeredDecomposition:
    """Planar root-path decomposition of the witness, BFS rooted at nations,
    followed by the half-square step; bound 9 for planar witnesses."""
    H = witness.graph
    roots = sorted(witness.side_X)
    planar = decompose_planar_ltw(H, witness.rotation, roots=roots)
    out = decompose_bipartite_cliquified(H, witness.side_X, planar)
    return LayeredDecomposition(out.decomposition, out.layering, out.certified_bound, out.bound_kind, "planar map pipeline")


# --- powers and cliquifications -------------------------------------------------


def decompose_power(G: Graph, d: int, D: LayeredDecomposition) -> LayeredDecomposition:
    """Decomposition of ``G^d``: merge ``d`` consecutive layers and grow each bag
    by the ball of radius ``d // 2``. Also certifies the clique cover number
    of every bag/layer intersection."""
    if d < 2:
        raise PreconditionError("power must be at least 2")
    if D.bound_kind is not BoundKind.TREEWIDTH:
        raise PreconditionError("decompose_power needs a layered treewidth witness")
    T = D.decomposition
    radius = d // 2
    bags = {t: G.ball(T.bags[t], radius) for t in T.nodes}
    layering = Layering(tuple(i // d for i in D.layering.layer_of))
    return LayeredDecomposition(
        TreeDecomposition(T.nodes, T.tree_edges, bags),
        layering,
        power_bound(d, D.certified_bound),
        BoundKind.INDEPENDENCE,
        "graph power balls",
        also_certifies=(BoundKind.CLIQUE_COVER,),
    )


def _bfs_tree(G: Graph, p: int, r: int) -> dict[int, int]:
    """Parents of the BFS tree from ``p`` cut at depth ``r``; the parent of a
    vertex is its lowest-id neighbour one step closer to ``p``."""
    dist = G.bfs_distances([p], r)
    parent = {p: -1}
    for u, du in dist.items():
        if du:
            parent[u] = min(w for w in G.adj[u] if dist.get(w) == du - 1)
    return parent


def decompose_cliquified(G: Graph, P: Iterable[int], r: int, D: LayeredDecomposition) -> LayeredDecomposition:
    """Decomposition of ``neighborhood_cliquify(G, P, r)``.

    Merges ``2r`` consecutive layers; bag ``t`` gains every ``u`` whose fixed
    shortest path to some ``p`` in ``P`` meets the old bag. Works from a layered
    treewidth witness, or from an independence witness when ``r = 1`` and ``P``
    is independent.
    """
    P = sorted(set(P))
    if r < 1:
        raise PreconditionError("r must be positive")
    if D.bound_kind is BoundKind.INDEPENDENCE:
        if r != 1:
            raise PreconditionError("an independence witness is only accepted with r = 1")
        if not G.is_independent(P):
            raise PreconditionError("an independence witness needs P to be an independent set")
    elif D.bound_kind is not BoundKind.TREEWIDTH:
        raise PreconditionError(f"unsupported witness kind {D.bound_kind.value}")

    # below[p][v]: vertices whose path to p passes through v
    below: list[dict[int, frozenset[int]]] = []
    for p in P:
        parent = _bfs_tree(G, p, r)
        children: dict[int, list[int]] = {}
        for u, w in parent.items():
            if w >= 0:
                children.setdefault(w, []).append(u)
        sub: dict[int, frozenset[int]] = {}
        stack = [(p, False)]
        while stack:
            u, done = stack.pop()
            if done:
                sub[u] = frozenset((u,)).union(*(sub[c] for c in children.get(u, ())))
            else:
                stack.append((u, True))
                stack.extend((c, False) for c in children.get(u, ()))
        below.append(sub)

    T = D.decomposition
    bags = {}
    for t in T.nodes:
        bag = set(T.bags[t])
        for sub in below:
            for v in T.bags[t]:
                if v in sub:
                    bag |= sub[v]
        bags[t] = frozenset(bag)
    layering = Layering(tuple(i // (2 * r) for i in D.layering.layer_of))
    return LayeredDecomposition(
        TreeDecomposition(T.nodes, T.tree_edges, bags), layering, 4 * r * D.certified_bound, BoundKind.INDEPENDENCE, "neighbourhood cliquification"
    )
