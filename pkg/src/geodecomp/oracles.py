"""Exact small-scale oracles: independence number, clique cover number,
brute-force MWIS, layered bag/layer measurements and degeneracy profiles.

All search routines work on Python-int bitsets over the vertex ids of the
host graph. Before branching, simplicial vertices are peeled off (for both
alpha and theta a simplicial ``v`` contributes exactly one unit and ``N[v]``
can be removed) and the remainder is split into connected components. The
oracle caps bound the size of the components that actually reach the
exponential search.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import CapacityError, InputError
from .graph import BoundKind, Graph, LayeredDecomposition

ALPHA_CAP = 64
THETA_CAP = 20
MWIS_CAP = 25
EXACT_DEGENERACY_CAP = 14


def oracle_cap(kind: str, cap: int | None = None) -> int:
    """Resolve a cap: explicit argument, then ``GEODECOMP_ORACLE_CAP``, then the default."""
    if cap is not None:
        return cap
    env = os.environ.get("GEODECOMP_ORACLE_CAP")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"GEODECOMP_ORACLE_CAP must be an integer, got {env!r}") from exc
    return {"alpha": ALPHA_CAP, "theta": THETA_CAP, "mwis": MWIS_CAP}[kind]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _components(masks: list[int], active: int) -> list[int]:
    comps = []
    while active:
        low = active & -active
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= masks[v]
            nxt &= active & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(comp)
        active &= ~comp
    return comps


def _peel_simplicial(masks: list[int], active: int) -> tuple[int, list[int]]:
    """Repeatedly remove closed neighbourhoods of simplicial vertices.

    Returns the remaining active set and the removed ``(v, N[v])`` pairs;
    each ``N[v]`` is a clique.
    """
    removed = []
    changed = True
    while changed:
        changed = False
        for v in _bits(active):
            if not (active >> v) & 1:
                continue
            nb = masks[v] & active
            simplicial = True
            for u in _bits(nb):
                if (nb & ~(1 << u)) & ~masks[u]:
                    simplicial = False
                    break
            if simplicial:
                removed.append((v, nb | (1 << v)))
                active &= ~(nb | (1 << v))
                changed = True
    return active, removed


def _max_independent(masks: list[int], cand: int) -> int:
    """Maximum independent set inside ``cand`` (a connected kernel) by branch and bound.

    Classic max-clique search run on the complement: candidates are numbered by
    a greedy partition into cliques of ``G``, which bounds how many more
    independent vertices can still be added.
    """
    # greedy start: repeatedly take a vertex of minimum remaining degree
    best_mask = 0
    rest = cand
    while rest:
        v = min(_bits(rest), key=lambda x: _popcount(masks[x] & rest))
        best_mask |= 1 << v
        rest &= ~(masks[v] | (1 << v))
    best = [_popcount(best_mask), best_mask]

    def clique_numbering(P: int) -> tuple[list[int], list[int]]:
        order: list[int] = []
        bounds: list[int] = []
        k = 0
        U = P
        while U:
            k += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= masks[v]
                U &= ~low
                order.append(v)
                bounds.append(k)
        return order, bounds

    def expand(size: int, chosen: int, P: int) -> None:
        order, bounds = clique_numbering(P)
        for i in range(len(order) - 1, -1, -1):
            if size + bounds[i] <= best[0]:
                return
            v = order[i]
            bit = 1 << v
            newP = P & ~masks[v] & ~bit
            if newP:
                expand(size + 1, chosen | bit, newP)
            elif size + 1 > best[0]:
                best[0] = size + 1
                best[1] = chosen | bit
            P &= ~bit

    expand(0, 0, cand)
    return best[1]


def _alpha_mask(masks: list[int], active: int, cap: int) -> int:
    rest, peeled = _peel_simplicial(masks, active)
    chosen = 0
    for v, _ in peeled:
        chosen |= 1 << v
    for comp in _components(masks, rest):
        size = _popcount(comp)
        if size > cap:
            raise CapacityError(f"independence oracle kernel has {size} vertices > cap {cap}")
        chosen |= _max_independent(masks, comp)
    return chosen


def _color_exact(hmasks: list[int], verts: list[int], lower: int, seed_clique: list[int]) -> list[int]:
    """Exact colouring (DSATUR branch and bound) of the graph given by ``hmasks`` on ``verts``.

    Returns a list of colour classes as bitmasks.
    """
    n = len(verts)
    color: dict[int, int] = {}
    degree = {v: _popcount(hmasks[v]) for v in verts}

    def dsatur_greedy() -> dict[int, int]:
        col: dict[int, int] = {}
        while len(col) < n:
            v = max(
                (u for u in verts if u not in col),
                key=lambda u: (len({col[w] for w in _bits(hmasks[u]) if w in col}), degree[u], -u),
            )
            used = {col[w] for w in _bits(hmasks[v]) if w in col}
            c = 0
            while c in used:
                c += 1
            col[v] = c
        return col

    best_col = dsatur_greedy()
    best = [max(best_col.values(), default=-1) + 1, best_col]
    if best[0] > lower:
        for i, v in enumerate(seed_clique):
            color[v] = i

        def search(ncolors: int) -> bool:
            if len(color) == n:
                if ncolors < best[0]:
                    best[0] = ncolors
                    best[1] = dict(color)
                return best[0] <= lower
            v = max(
                (u for u in verts if u not in color),
                key=lambda u: (len({color[w] for w in _bits(hmasks[u]) if w in color}), degree[u], -u),
            )
            used = {color[w] for w in _bits(hmasks[v]) if w in color}
            for c in range(ncolors):
                if c not in used:
                    color[v] = c
                    if search(ncolors):
                        return True
                    del color[v]
            if ncolors + 1 < best[0]:
                color[v] = ncolors
                if search(ncolors + 1):
                    return True
                del color[v]
            return False

        search(len(seed_clique))
    classes: dict[int, int] = {}
    for v, c in best[1].items():
        classes[c] = classes.get(c, 0) | (1 << v)
    return [classes[c] for c in sorted(classes)]


def _theta_mask(masks: list[int], active: int, cap: int) -> list[int]:
    rest, peeled = _peel_simplicial(masks, active)
    cliques = [nb for _, nb in peeled]
    for comp in _components(masks, rest):
        size = _popcount(comp)
        if size > cap:
            raise CapacityError(f"clique-cover oracle kernel has {size} vertices > cap {cap}")
        verts = list(_bits(comp))
        hmasks = list(masks)
        for v in verts:
            hmasks[v] = comp & ~masks[v] & ~(1 << v)
        seed = list(_bits(_max_independent(masks, comp)))
        cliques.extend(_color_exact(hmasks, verts, len(seed), seed))
    return cliques


# --- public oracles ----------------------------------------------------------


def exact_alpha(G: Graph, cap: int | None = None) -> tuple[int, frozenset[int]]:
    """Independence number with a maximum independent set as witness."""
    chosen = _alpha_mask(G.adjacency_masks(), (1 << G.n) - 1, oracle_cap("alpha", cap))
    return _popcount(chosen), frozenset(_bits(chosen))


def exact_omega(G: Graph, cap: int | None = None) -> tuple[int, frozenset[int]]:
    return exact_alpha(G.complement(), cap)


def exact_theta(G: Graph, cap: int | None = None) -> tuple[int, list[frozenset[int]]]:
    """Clique cover number with a partition of ``V`` into that many cliques."""
    cliques = _theta_mask(G.adjacency_masks(), (1 << G.n) - 1, oracle_cap("theta", cap))
    return len(cliques), [frozenset(_bits(c)) for c in cliques]


def exact_mwis_bruteforce(G: Graph, cap: int | None = None) -> tuple[Fraction, frozenset[int]]:
    """Maximum weight independent set by exhaustive enumeration of all independent sets."""
    cap = oracle_cap("mwis", cap)
    if G.n > cap:
        raise CapacityError(f"brute-force MWIS on {G.n} vertices > cap {cap}")
    masks = G.adjacency_masks()
    w = [G.weight(v) for v in range(G.n)]
    best = [Fraction(-1), 0]

    def rec(cand: int, chosen: int, total: Fraction) -> None:
        if not cand:
            if total > best[0]:
                best[0], best[1] = total, chosen
            return
        low = cand & -cand
        v = low.bit_length() - 1
        rec(cand & ~low & ~masks[v], chosen | low, total + w[v])
        rec(cand & ~low, chosen, total)

    rec((1 << G.n) - 1, 0, Fraction(0))
    return best[0], frozenset(_bits(best[1]))


def induced_alpha(G: Graph, vertices: Iterable[int], cap: int | None = None, masks=None) -> int:
    masks = G.adjacency_masks() if masks is None else masks
    return _popcount(_alpha_mask(masks, _mask_of(vertices), oracle_cap("alpha", cap)))


def induced_theta(G: Graph, vertices: Iterable[int], cap: int | None = None, masks=None) -> int:
    masks = G.adjacency_masks() if masks is None else masks
    return len(_theta_mask(masks, _mask_of(vertices), oracle_cap("theta", cap)))


def layered_independence(
    G: Graph,
    D: LayeredDecomposition,
    kind: BoundKind | str | None = None,
    cap: int | None = None,
) -> tuple[int, tuple[int, int] | None]:
    """Exact maximum over (bag, layer) of alpha / theta / size of ``G[bag & layer]``.

    ``kind`` defaults to the decomposition's own bound kind. Returns the value
    and the first (node, layer) pair attaining it.
    """
    kind = D.bound_kind if kind is None else BoundKind(kind)
    masks = G.adjacency_masks()
    layer_of = D.layering.layer_of
    cache: dict[int, int] = {}
    best, arg = 0, None
    for t in D.decomposition.nodes:
        groups: dict[int, int] = {}
        for v in D.decomposition.bags[t]:
            groups[layer_of[v]] = groups.get(layer_of[v], 0) | (1 << v)
        for layer in sorted(groups):
            part = groups[layer]
            if part in cache:
                value = cache[part]
            elif kind is BoundKind.TREEWIDTH:
                value = _popcount(part)
            elif kind is BoundKind.INDEPENDENCE:
                value = _popcount(_alpha_mask(masks, part, oracle_cap("alpha", cap)))
            else:
                value = len(_theta_mask(masks, part, oracle_cap("theta", cap)))
            cache[part] = value
            if value > best:
                best, arg = value, (t, layer)
    return best, arg


# --- degeneracy ---------------------------------------------------------------


@dataclass(frozen=True)
class DegeneracyProfile:
    mode: str
    elimination_order: tuple[int, ...]
    per_step_value: tuple[int, ...]
    value: int
    greedy_colors: int
    exact_value: int | None = None


def _measure(mode: str, masks: list[int], nb: int, cap: int | None) -> int:
    if mode == "degree":
        return _popcount(nb)
    if mode == "independence":
        return _popcount(_alpha_mask(masks, nb, oracle_cap("alpha", cap)))
    return len(_theta_mask(masks, nb, oracle_cap("theta", cap)))


def degeneracy_profile(G: Graph, mode: str = "independence", exact: bool = False, cap: int | None = None) -> DegeneracyProfile:
    """Greedy smallest-last elimination by the ``mode`` value of the remaining neighbourhood.

    Because each measure only shrinks when vertices are deleted, the greedy
    maximum equals the true degeneracy parameter; ``exact=True`` additionally
    computes the min-max over all orderings by exhaustive recursion.
    """
    if mode not in ("independence", "clique_cover", "degree"):
        raise InputError(f"unknown degeneracy mode {mode!r}")
    masks = G.adjacency_masks()
    alive = (1 << G.n) - 1
    value = {v: _measure(mode, masks, masks[v], cap) for v in range(G.n)}
    order: list[int] = []
    steps: list[int] = []
    while alive:
        v = min(_bits(alive), key=lambda u: (value[u], u))
        order.append(v)
        steps.append(value[v])
        alive &= ~(1 << v)
        for u in _bits(masks[v] & alive):
            value[u] = _measure(mode, masks, masks[u] & alive, cap)

    colors: dict[int, int] = {}
    for v in reversed(order):
        used = {colors[u] for u in G.adj[v] if u in colors}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    greedy_colors = len(set(colors.values()))

    exact_value = None
    if exact:
        if G.n > EXACT_DEGENERACY_CAP:
            raise CapacityError(f"exact degeneracy recursion on {G.n} vertices > cap {EXACT_DEGENERACY_CAP}")
        memo: dict[int, int] = {0: 0}

        def f(S: int) -> int:
            if S in memo:
                return memo[S]
            res = min(max(_measure(mode, masks, masks[v] & S, cap), f(S & ~(1 << v))) for v in _bits(S))
            memo[S] = res
            return res

        exact_value = f((1 << G.n) - 1)

    return DegeneracyProfile(mode, tuple(order), tuple(steps), max(steps, default=0), greedy_colors, exact_value)
