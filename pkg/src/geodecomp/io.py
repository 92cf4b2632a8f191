"""JSON (de)serialisation for every public object.

Parsers raise :class:`InputError` naming the offending field.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import InputError
from .geometry import DiskInstance
from .graph import BoundKind, Graph, LayeredDecomposition, Layering, TreeDecomposition
from .instances import PlanarWitness
from .separators import CliqueSeparator


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_file(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, str(path))


def dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)


def _field(data: Any, key: str, where: str):
    if not isinstance(data, dict):
        raise InputError(f"{where}: expected a JSON object")
    if key not in data:
        raise InputError(f"{where}: missing field {key!r}")
    return data[key]


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InputError(f"{where}: expected an integer, got {x!r}")
    return x


def _int_list(x: Any, where: str) -> list[int]:
    if not isinstance(x, list):
        raise InputError(f"{where}: expected a list")
    return [_int(v, f"{where}[{i}]") for i, v in enumerate(x)]


# --- numbers ------------------------------------------------------------------


def fraction_to_json(x: Fraction) -> Any:
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else {"num": x.numerator, "den": x.denominator}


def fraction_from_json(x: Any, where: str) -> Fraction:
    try:
        if isinstance(x, dict):
            return Fraction(_int(x["num"], where), _int(x["den"], where))
        if isinstance(x, bool):
            raise TypeError
        if isinstance(x, (int, str)):
            return Fraction(x)
        if isinstance(x, float):
            return Fraction(x)
    except (KeyError, TypeError, ValueError, ZeroDivisionError):
        pass
    raise InputError(f"{where}: expected a number, a 'p/q' string or {{'num', 'den'}}, got {x!r}")


# --- graphs and decompositions -------------------------------------------------


def graph_to_json(G: Graph) -> dict:
    out: dict = {"n": G.n, "edges": [list(e) for e in G.edges()]}
    if G.weights is not None:
        out["weights"] = [fraction_to_json(w) for w in G.weights]
    return out


def graph_from_json(data: Any, where: str = "graph") -> Graph:
    n = _int(_field(data, "n", where), f"{where}.n")
    edges_raw = _field(data, "edges", where)
    if not isinstance(edges_raw, list):
        raise InputError(f"{where}.edges: expected a list")
    edges = []
    for i, e in enumerate(edges_raw):
        pair = _int_list(e, f"{where}.edges[{i}]")
        if len(pair) != 2:
            raise InputError(f"{where}.edges[{i}]: expected [u, v]")
        edges.append(pair)
    weights = None
    if data.get("weights") is not None:
        ws = data["weights"]
        if not isinstance(ws, list) or len(ws) != n:
            raise InputError(f"{where}.weights: expected a list of {n} numbers")
        weights = [fraction_from_json(w, f"{where}.weights[{i}]") for i, w in enumerate(ws)]
    try:
        return Graph.from_edges(n, edges, weights)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None


def decomposition_to_json(D: TreeDecomposition | LayeredDecomposition, graph: Graph | None = None) -> dict:
    T = D.decomposition if isinstance(D, LayeredDecomposition) else D
    out: dict = {
        "nodes": list(T.nodes),
        "tree_edges": [list(e) for e in T.tree_edges],
        "bags": {str(t): sorted(T.bags[t]) for t in T.nodes},
    }
    if isinstance(D, LayeredDecomposition):
        out["layering"] = list(D.layering.layer_of)
        out["certified_bound"] = D.certified_bound
        out["bound_kind"] = D.bound_kind.value
        out["construction"] = D.construction
        if D.also_certifies:
            out["also_certifies"] = [k.value for k in D.also_certifies]
    if graph is not None:
        out["graph"] = graph_to_json(graph)
    return out


def decomposition_from_json(data: Any, where: str = "decomposition") -> TreeDecomposition | LayeredDecomposition:
    nodes = _int_list(_field(data, "nodes", where), f"{where}.nodes")
    edges = []
    for i, e in enumerate(_field(data, "tree_edges", where) or []):
        pair = _int_list(e, f"{where}.tree_edges[{i}]")
        if len(pair) != 2:
            raise InputError(f"{where}.tree_edges[{i}]: expected [a, b]")
        edges.append(tuple(pair))
    bags_raw = _field(data, "bags", where)
    if not isinstance(bags_raw, dict):
        raise InputError(f"{where}.bags: expected an object keyed by node id")
    bags = {}
    for key, vs in bags_raw.items():
        try:
            t = int(key)
        except ValueError:
            raise InputError(f"{where}.bags: node key {key!r} is not an integer") from None
        bags[t] = frozenset(_int_list(vs, f"{where}.bags[{key}]"))
    T = TreeDecomposition(tuple(nodes), tuple(edges), bags)
    if data.get("layering") is None:
        return T
    layering = Layering(tuple(_int_list(data["layering"], f"{where}.layering")))
    bound = _int(data.get("certified_bound", 0), f"{where}.certified_bound")
    kind = data.get("bound_kind", "independence")
    try:
        kind = BoundKind(kind)
        also = tuple(BoundKind(k) for k in data.get("also_certifies", ()))
    except ValueError:
        raise InputError(f"{where}.bound_kind: unknown kind {kind!r}") from None
    if bound < 1:
        raise InputError(f"{where}.certified_bound: a layered decomposition needs a positive bound")
    return LayeredDecomposition(T, layering, bound, kind, data.get("construction", ""), also)


def embedded_graph(data: Any) -> Graph | None:
    if isinstance(data, dict) and data.get("graph") is not None:
        return graph_from_json(data["graph"], "decomposition.graph")
    return None


# --- geometric instances and witnesses ----------------------------------------------


def instance_to_json(inst: DiskInstance) -> dict:
    return {"space": inst.space.value, "radius": inst.radius, "centers": [list(c) for c in inst.centers]}


def instance_from_json(data: Any, where: str = "instance") -> DiskInstance:
    space = _field(data, "space", where)
    radius = _field(data, "radius", where)
    centers = _field(data, "centers", where)
    if not isinstance(radius, (int, float)) or isinstance(radius, bool):
        raise InputError(f"{where}.radius: expected a number")
    if not isinstance(centers, list) or not all(isinstance(c, list) and len(c) == 2 for c in centers):
        raise InputError(f"{where}.centers: expected a list of [a, b] pairs")
    try:
        return DiskInstance(space, float(radius), tuple((float(a), float(b)) for a, b in centers))
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None


def witness_to_json(w: PlanarWitness) -> dict:
    edges = w.graph.edges()
    eid = {e: i for i, e in enumerate(edges)}
    rotation = {
        str(v): [eid[(min(v, u), max(v, u))] for u in w.rotation.get(v, ())] for v in range(w.graph.n)
    }
    return {"n": w.graph.n, "edges": [list(e) for e in edges], "side_X": sorted(w.side_X), "rotation": rotation}


def witness_from_json(data: Any, where: str = "witness") -> PlanarWitness:
    G = graph_from_json({"n": _field(data, "n", where), "edges": _field(data, "edges", where)}, where)
    edges = [tuple(e) for e in data["edges"]]
    side = _int_list(_field(data, "side_X", where), f"{where}.side_X")
    rot_raw = _field(data, "rotation", where)
    if not isinstance(rot_raw, dict):
        raise InputError(f"{where}.rotation: expected an object keyed by vertex")
    rotation = {}
    for key, ids in rot_raw.items():
        v = int(key)
        order = []
        for i in _int_list(ids, f"{where}.rotation[{key}]"):
            if not 0 <= i < len(edges) or v not in edges[i]:
                raise InputError(f"{where}.rotation[{key}]: edge index {i} is not incident to {v}")
            a, b = edges[i]
            order.append(b if a == v else a)
        rotation[v] = tuple(order)
    return PlanarWitness(G, frozenset(side), rotation)


# --- results -------------------------------------------------------------------------


def separator_to_json(cs: CliqueSeparator) -> dict:
    return {
        "A": sorted(cs.side_A),
        "B": sorted(cs.side_B),
        "cliques": [sorted(c) for c in cs.cliques],
        "size": cs.size,
        "weight": cs.weight,
        "balance": cs.balance,
    }


def separator_from_json(data: Any, where: str = "separator") -> CliqueSeparator:
    cliques = tuple(frozenset(_int_list(c, f"{where}.cliques[{i}]")) for i, c in enumerate(_field(data, "cliques", where)))
    return CliqueSeparator(
        frozenset(_int_list(_field(data, "A", where), f"{where}.A")),
        frozenset(_int_list(_field(data, "B", where), f"{where}.B")),
        cliques,
        _int(_field(data, "size", where), f"{where}.size"),
        float(_field(data, "weight", where)),
        float(_field(data, "balance", where)),
    )


def solver_result_to_json(value: Fraction, vertices, decomposition_alpha: int | None) -> dict:
    value = Fraction(value)
    return {
        "value": {"num": value.numerator, "den": value.denominator},
        "set": sorted(vertices),
        "decomposition_alpha": decomposition_alpha,
    }


def solver_result_from_json(data: Any) -> tuple[Fraction, frozenset[int], int | None]:
    value = fraction_from_json(_field(data, "value", "result"), "result.value")
    return value, frozenset(_int_list(_field(data, "set", "result"), "result.set")), data.get("decomposition_alpha")
