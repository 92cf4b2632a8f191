"""Exact weighted independent set and distance packing over tree decompositions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .decomposers import decompose_power
from .errors import CapacityError, InputError, PreconditionError
from .graph import Graph, LayeredDecomposition, TreeDecomposition, graph_power, validate_tree_decomposition

STATE_CAP = 10**6


@dataclass(frozen=True)
class NiceNode:
    kind: str  # "leaf" | "introduce" | "forget" | "join"
    bag: frozenset[int]
    children: tuple[int, ...] = ()
    vertex: int | None = None
    source: int | None = None  # node of the original decomposition


@dataclass(frozen=True)
class NiceDecomposition:
    """Rooted nice decomposition; children always precede their parent in ``nodes``."""

    nodes: tuple[NiceNode, ...]
    root: int

    def __len__(self) -> int:
        return len(self.nodes)

    def to_tree_decomposition(self) -> TreeDecomposition:
        edges = [(c, i) for i, node in enumerate(self.nodes) for c in node.children]
        return TreeDecomposition.from_bags([node.bag for node in self.nodes], edges)


def make_nice(T: TreeDecomposition, G: Graph | None = None) -> NiceDecomposition:
    """Convert ``T`` (rooted at its first node); validates against ``G`` if given."""
    if G is not None:
        rep = validate_tree_decomposition(G, T)
        if not rep.ok:
            raise InputError(f"invalid tree decomposition: {rep.condition} at {rep.witness}")
    if not T.nodes:
        return NiceDecomposition((NiceNode("leaf", frozenset()),), 0)
    nodes: list[NiceNode] = []

    def add(node: NiceNode) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def chain(top: int, target: frozenset[int], source: int) -> int:
        bag = nodes[top].bag
        for v in sorted(bag - target):
            bag = bag - {v}
            top = add(NiceNode("forget", bag, (top,), v, source))
        for v in sorted(target - bag):
            bag = bag | {v}
            top = add(NiceNode("introduce", bag, (top,), v, source))
        return top

    nbrs = T.neighbors()
    root = T.nodes[0]
    order, parent = [root], {root: None}
    for t in order:
        for s in sorted(nbrs[t]):
            if s not in parent:
                parent[s] = t
                order.append(s)
    top_of: dict[int, int] = {}
    for t in reversed(order):
        bag = T.bags[t]
        kids = [s for s in sorted(nbrs[t]) if parent[s] == t]
        if not kids:
            top_of[t] = chain(add(NiceNode("leaf", frozenset(), (), None, t)), bag, t)
            continue
        tops = [chain(top_of[s], bag, t) for s in kids]
        acc = tops[0]
        for other in tops[1:]:
            acc = add(NiceNode("join", bag, (acc, other), None, t))
        top_of[t] = acc
    return NiceDecomposition(tuple(nodes), top_of[root])


def _collect(sol) -> frozenset[int]:
    """Flatten a solution built from ``(vertex, rest)`` cells and ``("join", a, b)`` nodes."""
    out: set[int] = set()
    stack = [sol]
    while stack:
        s = stack.pop()
        if s is None:
            continue
        if s[0] == "join":
            stack.append(s[1])
            stack.append(s[2])
        else:
            out.add(s[0])
            stack.append(s[1])
    return frozenset(out)


def mwis(G: Graph, T: TreeDecomposition, state_cap: int = STATE_CAP, validate: bool = True) -> tuple[Fraction, frozenset[int]]:
    """Maximum weight independent set by dynamic programming over ``make_nice(T)``.

    States are the independent subsets of each bag, stored as bitmasks over
    global vertex ids. Weights stay exact rationals.
    """
    nice = make_nice(T, G if validate else None)
    masks = G.adjacency_masks()
    weight = [G.weight(v) for v in range(G.n)]
    tables: list[dict | None] = [None] * len(nice.nodes)
    pending = [0] * len(nice.nodes)
    for node in nice.nodes:
        for c in node.children:
            pending[c] += 1
    for i, node in enumerate(nice.nodes):
        if node.kind == "leaf":
            table = {0: (Fraction(0), None)}
        elif node.kind == "introduce":
            child = tables[node.children[0]]
            v = node.vertex
            bit = 1 << v
            table = dict(child)
            for S, (val, sol) in child.items():
                if not S & masks[v]:
                    table[S | bit] = (val + weight[v], (v, sol))
            if len(table) > state_cap:
                raise CapacityError(
                    f"bag of node {node.source} has more than {state_cap} independent subsets"
                )
        elif node.kind == "forget":
            child = tables[node.children[0]]
            keep = ~(1 << node.vertex)
            table = {}
            for S, entry in child.items():
                key = S & keep
                if key not in table or entry[0] > table[key][0]:
                    table[key] = entry
        else:
            a, b = (tables[c] for c in node.children)
            table = {}
            for S, (va, sa) in a.items():
                if S in b:
                    vb, sb = b[S]
                    table[S] = (va + vb - sum((weight[v] for v in _bits_of(S)), Fraction(0)), ("join", sa, sb))
        tables[i] = table
        for c in node.children:
            pending[c] -= 1
            if not pending[c]:
                tables[c] = None  # free children once consumed
    best_val, best_sol = max(tables[nice.root].values(), key=lambda e: e[0])
    return best_val, _collect(best_sol)


def _bits_of(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def distance_packing(
    G: Graph, d: int, D: LayeredDecomposition, strict: bool = True, state_cap: int = STATE_CAP
) -> tuple[Fraction, frozenset[int]]:
    """Maximum weight set with pairwise ``G``-distance above ``d`` (``strict``)
    or at least ``d`` (``strict=False``), solved as an independent set of the
    matching graph power with the decomposition from :func:`decompose_power`."""
    if d < 2 or d % 2:
        raise PreconditionError("distance packing needs an even d >= 2")
    p = d if strict else d - 1
    H = graph_power(G, p)
    T = D.decomposition if p == 1 else decompose_power(G, p, D).decomposition
    return mwis(H, T, state_cap)
