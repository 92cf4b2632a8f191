"""Command-line front end: ``geodecomp {decompose,verify,separate,solve,gen,bench}``.

Exit codes: 0 success, 1 internal error or failed certificate, 2 bad input or
violated precondition, 3 oracle/DP capacity exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from . import io
from .decomposers import (
    decompose_cliquified,
    decompose_eudg,
    decompose_hudg,
    decompose_map,
    decompose_power,
    decompose_sudg,
)
from .errors import CapacityError, GeodecompError, InputError, PreconditionError
from .geometry import Space, intersection_graph, normalize_pole
from .graph import (
    Graph,
    LayeredDecomposition,
    graph_power,
    half_square,
    neighborhood_cliquify,
    validate_layering,
    validate_tree_decomposition,
)
from .instances import (
    gen_layered_pathwidth,
    gen_map_witness,
    gen_named,
    gen_random_disks,
    gen_random_map_witness,
    gen_spherical_superclass,
)
from .oracles import induced_alpha, layered_independence
from .separators import clique_based_separator
from .solvers import distance_packing, mwis


@dataclass
class RunReport:
    command: str
    input_digest: str | None = None
    certified: dict[str, int] = field(default_factory=dict)
    measured: dict[str, Any] = field(default_factory=dict)
    stage_ms: dict[str, float] = field(default_factory=dict)
    ok: bool = True

    def within_bounds(self) -> bool:
        return all(
            isinstance(self.measured.get(kind), int) and self.measured[kind] <= bound
            for kind, bound in self.certified.items()
        )


class _Stages:
    def __init__(self, report: RunReport):
        self.report = report

    def __call__(self, name: str):
        report = self.report

        class _Timer:
            def __enter__(self):
                self.t = time.perf_counter()

            def __exit__(self, *exc):
                report.stage_ms[name] = round((time.perf_counter() - self.t) * 1000, 3)

        return _Timer()


def _digest(path: str) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(obj: Any, out: str | None) -> None:
    text = io.dump(obj)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _measure(G: Graph, D: LayeredDecomposition, report: RunReport) -> None:
    for kind in (D.bound_kind, *D.also_certifies):
        report.certified[kind.value] = D.certified_bound
        report.measured[kind.value] = layered_independence(G, D, kind)[0]


def _graph_and_decomp(args) -> tuple[Graph, Any]:
    data = io.load_file(args.decomp)
    D = io.decomposition_from_json(data)
    G = io.graph_from_json(io.load_file(args.graph)) if getattr(args, "graph", None) else io.embedded_graph(data)
    if G is None:
        raise InputError("no graph given: pass --graph or a decomposition with an embedded 'graph'")
    return G, D


def _bundle(path: str) -> tuple[Graph, LayeredDecomposition]:
    data = io.load_file(path)
    if isinstance(data, dict) and "decomposition" in data:
        G = io.graph_from_json(data.get("graph"), "graph")
        D = io.decomposition_from_json(data["decomposition"])
    else:
        D = io.decomposition_from_json(data)
        G = io.embedded_graph(data)
    if G is None:
        raise InputError(f"{path}: expected {{'graph', 'decomposition'}} or a decomposition with an embedded graph")
    if not isinstance(D, LayeredDecomposition):
        raise InputError(f"{path}: decomposition needs a layering and certified bound")
    return G, D


# --- subcommands ------------------------------------------------------------------


def cmd_decompose(args) -> RunReport:
    report = RunReport("decompose", _digest(args.input))
    stage = _Stages(report)
    with stage("decompose"):
        if args.space:
            inst = io.instance_from_json(io.load_file(args.input))
            if inst.space.value != args.space:
                raise InputError(f"instance space is {inst.space.value}, --space says {args.space}")
            if inst.space is Space.HYPERBOLIC:
                inst = normalize_pole(inst)
                D = decompose_hudg(inst)
            elif inst.space is Space.SPHERICAL:
                D = decompose_sudg(inst)
            else:
                D = decompose_eudg(inst)
            G = intersection_graph(inst)
        elif args.witness:
            w = io.witness_from_json(io.load_file(args.input))
            D = decompose_map(w)
            G = half_square(w.graph, w.side_X)
        elif args.power is not None:
            G0, D0 = _bundle(args.input)
            D = decompose_power(G0, args.power, D0)
            G = graph_power(G0, args.power)
        else:
            G0, D0 = _bundle(args.input)
            P_raw, r_raw = args.cliquify
            try:
                P = [int(x) for x in P_raw.split(",") if x.strip()]
                r = int(r_raw)
            except ValueError:
                raise InputError("--cliquify expects a comma-separated vertex list and an integer radius") from None
            D = decompose_cliquified(G0, P, r, D0)
            G = neighborhood_cliquify(G0, P, r)
    with stage("measure"):
        _measure(G, D, report)
    report.measured["construction"] = D.construction
    report.ok = report.within_bounds()
    _emit(io.decomposition_to_json(D, G), args.out)
    return report


def cmd_verify(args) -> RunReport:
    report = RunReport("verify", _digest(args.decomp))
    stage = _Stages(report)
    G, D = _graph_and_decomp(args)
    with stage("validate"):
        T = D.decomposition if isinstance(D, LayeredDecomposition) else D
        rep = validate_tree_decomposition(G, T)
        if rep.ok and isinstance(D, LayeredDecomposition):
            rep = validate_layering(G, D.layering)
    report.measured["valid"] = rep.ok
    if not rep.ok:
        report.measured["failed"] = rep.condition
        report.measured["witness"] = repr(rep.witness)
        report.ok = False
        return report
    if isinstance(D, LayeredDecomposition):
        with stage("measure"):
            _measure(G, D, report)
        report.ok = report.within_bounds()
    return report


def cmd_separate(args) -> RunReport:
    report = RunReport("separate", _digest(args.instance or args.decomp))
    stage = _Stages(report)
    rep = None
    with stage("decompose"):
        if args.instance:
            rep = io.instance_from_json(io.load_file(args.instance))
            if rep.space is Space.HYPERBOLIC:
                rep = normalize_pole(rep)
            D = {Space.HYPERBOLIC: decompose_hudg, Space.SPHERICAL: decompose_sudg, Space.EUCLIDEAN: decompose_eudg}[rep.space](rep)
            G = intersection_graph(rep)
        else:
            G, D = _graph_and_decomp(args)
            if not isinstance(D, LayeredDecomposition):
                raise InputError("separate needs a layered decomposition")
    with stage("separate"):
        cs = clique_based_separator(G, D, rep)
    report.measured.update(size=cs.size, weight=cs.weight, balance=cs.balance)
    report.ok = all(G.is_clique(c) for c in cs.cliques) and cs.balance <= 2 / 3
    _emit(io.separator_to_json(cs), args.out)
    return report


def cmd_solve(args) -> RunReport:
    report = RunReport("solve", _digest(args.decomp))
    stage = _Stages(report)
    G, D = _graph_and_decomp(args)
    with stage("solve"):
        if args.problem == "mwis":
            T = D.decomposition if isinstance(D, LayeredDecomposition) else D
            value, chosen = mwis(G, T)
        else:
            if args.d is None:
                raise InputError("--problem packing needs --d")
            if not isinstance(D, LayeredDecomposition):
                raise InputError("packing needs a layered treewidth decomposition")
            T = D.decomposition
            value, chosen = distance_packing(G, args.d, D, strict=not args.at_least)
    alpha = None
    try:
        alpha = max((induced_alpha(G, bag) for bag in T.bags.values()), default=0)
    except CapacityError:
        pass
    report.measured["value"] = str(value)
    _emit(io.solver_result_to_json(value, chosen, alpha), args.out)
    return report


def cmd_gen(args) -> RunReport:
    report = RunReport("gen")
    params = io.loads(args.params, "--params") if args.params else {}
    if not isinstance(params, dict):
        raise InputError("--params must be a JSON object")
    try:
        if args.kind == "disks":
            obj = io.instance_to_json(
                gen_random_disks(params.get("space", "euclidean"), params["n"], params.get("extent", 1.0), params["r"], args.seed)
            )
        elif args.kind == "superclass":
            inst, expected = gen_spherical_superclass(params["k"])
            obj = io.instance_to_json(inst)
        elif args.kind == "named":
            obj = io.graph_to_json(gen_named(params.pop("name"), **params))
        elif args.kind == "map":
            if params.get("drop"):
                w = gen_random_map_witness(params["rows"], params["cols"], args.seed, params["drop"])
            else:
                w = gen_map_witness(params["rows"], params["cols"])
            obj = io.witness_to_json(w)
        else:
            G, D = gen_layered_pathwidth(params["n"], params["layers"], params["k"], params.get("p", 0.5), args.seed)
            obj = io.decomposition_to_json(D, G)
    except KeyError as exc:
        raise InputError(f"--params is missing {exc.args[0]!r} for kind {args.kind}") from None
    except TypeError as exc:
        raise InputError(f"--params: {exc}") from None
    _emit(obj, args.out)
    return report


# --- bench ----------------------------------------------------------------------------

BENCH_COLUMNS = [
    "suite", "n", "seed", "params", "certified_bound", "measured_alpha",
    "sep_size", "sep_weight", "balance", "mwis_value", "ms_per_stage",
]
BENCH_MWIS_CAP = 10**5


def _bench_instance(suite: str, n: int, seed: int):
    """Graph, layered decomposition, optional representation and a params label."""
    if suite == "udg":
        inst = gen_random_disks(Space.EUCLIDEAN, n, math.sqrt(n), 0.5, seed)
        return intersection_graph(inst), decompose_eudg(inst), inst, f"r=0.5 extent={math.sqrt(n):.4g}"
    if suite == "hudg":
        R = 2 * math.log(n)
        inst = normalize_pole(gen_random_disks(Space.HYPERBOLIC, n, R, 1.0, seed))
        return intersection_graph(inst), decompose_hudg(inst), inst, f"r=1 R={R:.4g}"
    if suite == "sudg":
        r = math.acos(1 - 8 / n) / 2 if n > 4 else 0.5
        inst = gen_random_disks(Space.SPHERICAL, n, 0.0, r, seed)
        return intersection_graph(inst), decompose_sudg(inst), inst, f"r={r:.4g}"
    if suite == "map":
        side = max(2, round(math.sqrt(n)))
        w = gen_random_map_witness(side, side, seed)
        return half_square(w.graph, w.side_X), decompose_map(w), None, f"grid={side}x{side}"
    raise InputError(f"unknown bench suite {suite!r}")


def bench_row(suite: str, n: int, seed: int, timing: bool = False) -> dict:
    ms: dict[str, float] = {}

    def timed(name, fn):
        t = time.perf_counter()
        out = fn()
        ms[name] = (time.perf_counter() - t) * 1000
        return out

    G, D, rep, label = timed("decompose", lambda: _bench_instance(suite, n, seed))
    alpha = timed("measure", lambda: layered_independence(G, D)[0])
    cs = timed("separate", lambda: clique_based_separator(G, D, rep))
    try:
        value = str(timed("solve", lambda: mwis(G, D.decomposition, BENCH_MWIS_CAP, validate=False))[0])
    except CapacityError:
        value = "NA"
    return {
        "suite": suite,
        "n": G.n,
        "seed": seed,
        "params": label,
        "certified_bound": D.certified_bound,
        "measured_alpha": alpha,
        "sep_size": cs.size,
        "sep_weight": f"{cs.weight:.6f}",
        "balance": f"{cs.balance:.6f}",
        "mwis_value": value,
        "ms_per_stage": ";".join(f"{k}={v:.1f}" for k, v in ms.items()) if timing else "",
    }


def _bench_job(job):
    return bench_row(*job)


def run_bench(suite: str, sizes: list[int], seeds: list[int], workers: int = 1, timing: bool = False) -> list[dict]:
    jobs = [(suite, n, s, timing) for n in sizes for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_bench_job, jobs))
    else:
        rows = [_bench_job(j) for j in jobs]
    return sorted(rows, key=lambda r: (r["n"], r["seed"]))


def bench_csv(rows: list[dict]) -> str:
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def cmd_bench(args) -> RunReport:
    report = RunReport("bench")
    rows = run_bench(args.suite, _int_csv(args.sizes), _int_csv(args.seeds), args.workers, args.timing)
    text = bench_csv(rows)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    report.measured["rows"] = len(rows)
    report.ok = all(int(r["measured_alpha"]) <= int(r["certified_bound"]) for r in rows)
    return report


def _int_csv(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


# --- entry point -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geodecomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="build a layered decomposition with a certified bound")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--space", choices=[s.value for s in Space])
    mode.add_argument("--witness", action="store_true", help="input is a planar map witness")
    mode.add_argument("--power", type=int, metavar="D")
    mode.add_argument("--cliquify", nargs=2, metavar=("P", "R"), help="comma-separated vertices and radius")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="validate a decomposition and re-measure its bound")
    p.add_argument("--graph")
    p.add_argument("--decomp", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("separate", help="clique-based separator")
    p.add_argument("--graph")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--decomp")
    src.add_argument("--instance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("solve", help="exact MWIS or distance packing")
    p.add_argument("--problem", choices=["mwis", "packing"], required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--at-least", action="store_true", help="packing pairs need distance >= d instead of > d")
    p.add_argument("--graph")
    p.add_argument("--decomp", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate instances")
    p.add_argument("kind", choices=["disks", "superclass", "named", "map", "layered"])
    p.add_argument("--params", help="JSON object of generator parameters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="benchmark a suite, CSV output")
    p.add_argument("suite", choices=["udg", "hudg", "sudg", "map"])
    p.add_argument("--sizes", default="100,400,1600")
    p.add_argument("--seeds", default="0")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill ms_per_stage (breaks byte-for-byte reproducibility)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except (InputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"capacity exceeded: {exc}", file=sys.stderr)
        return 3
    except (GeodecompError, RecursionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    if args.command in ("decompose", "verify", "separate", "solve"):
        # the report shares stdout only when no payload is written there
        payload_on_stdout = args.command != "verify" and args.out is None
        print(json.dumps(asdict(report), sort_keys=True), file=sys.stderr if payload_on_stdout else sys.stdout)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
