import csv
import functools
import io as _io
import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import graphs
from geodecomp import cli, io, solvers
from geodecomp.cli import RunReport, bench_csv, main, run_bench
from geodecomp.decomposers import decompose_eudg
from geodecomp.errors import InputError
from geodecomp.geometry import intersection_graph
from geodecomp.instances import gen_layered_pathwidth, gen_map_witness, gen_random_disks, gen_random_map_witness
from geodecomp.separators import clique_based_separator


# --- JSON round trips -------------------------------------------------------------------


@given(graphs(max_n=10, weighted=True))
def test_graph_round_trip(G):
    data = json.loads(io.dump(io.graph_to_json(G)))
    assert io.graph_from_json(data) == G


@given(st.fractions(min_value=-50, max_value=50, max_denominator=20))
def test_fraction_round_trip(x):
    assert io.fraction_from_json(json.loads(io.dump(io.fraction_to_json(x))), "x") == x


def test_fraction_forms():
    assert io.fraction_from_json("3/4", "w") == Fraction(3, 4)
    assert io.fraction_from_json({"num": 1, "den": 3}, "w") == Fraction(1, 3)
    with pytest.raises(InputError, match="w"):
        io.fraction_from_json([1], "w")


def test_layered_decomposition_round_trip():
    G, D = gen_layered_pathwidth(30, 4, 2, 0.5, seed=1)
    data = json.loads(io.dump(io.decomposition_to_json(D, G)))
    assert io.decomposition_from_json(data) == D
    assert io.embedded_graph(data) == G
    T = D.decomposition
    assert io.decomposition_from_json(io.decomposition_to_json(T)) == T


def test_instance_and_witness_round_trip():
    for space in ("euclidean", "hyperbolic", "spherical"):
        inst = gen_random_disks(space, 20, 3.0, 0.4, seed=2)
        assert io.instance_from_json(json.loads(io.dump(io.instance_to_json(inst)))) == inst
    for w in (gen_map_witness(3, 4), gen_random_map_witness(4, 3, seed=5)):
        back = io.witness_from_json(json.loads(io.dump(io.witness_to_json(w))))
        assert back.graph == w.graph and back.side_X == w.side_X and back.rotation == w.rotation


def test_separator_and_result_round_trip():
    inst = gen_random_disks("euclidean", 60, 6.0, 0.5, seed=3)
    G = intersection_graph(inst)
    cs = clique_based_separator(G, decompose_eudg(inst), inst)
    assert io.separator_from_json(json.loads(io.dump(io.separator_to_json(cs)))) == cs
    data = json.loads(io.dump(io.solver_result_to_json(Fraction(7, 3), {4, 1}, 2)))
    assert io.solver_result_from_json(data) == (Fraction(7, 3), frozenset({1, 4}), 2)


def test_parse_errors_name_the_field():
    with pytest.raises(InputError, match="line 1"):
        io.loads("{nope", "x.json")
    with pytest.raises(InputError, match="edges"):
        io.graph_from_json({"n": 2})
    with pytest.raises(InputError, match=r"edges\[0\]"):
        io.graph_from_json({"n": 2, "edges": [[0, "a"]]})
    with pytest.raises(InputError, match="bags"):
        io.decomposition_from_json({"nodes": [0], "tree_edges": [], "bags": []})
    with pytest.raises(InputError, match="radius"):
        io.instance_from_json({"space": "euclidean", "radius": "big", "centers": []})


# --- CLI --------------------------------------------------------------------------------


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else io.dump(obj), encoding="utf-8")
    return str(p)


def report_of(capsys):
    """The run report is the last JSON line written to either stream."""
    out, err = capsys.readouterr()
    lines = [l for l in (out + err).splitlines() if l.startswith("{")]
    return json.loads(lines[-1])


def test_decompose_hyperbolic(tmp_path, capsys):
    inp = write(tmp_path, "h.json", io.instance_to_json(gen_random_disks("hyperbolic", 50, 6.0, 1.0, seed=1)))
    out = str(tmp_path / "d.json")
    assert main(["decompose", "--space", "hyperbolic", "--in", inp, "--out", out]) == 0
    rep = report_of(capsys)
    assert rep["measured"]["independence"] <= 6 * math.ceil(1 / math.tanh(1)) == rep["certified"]["independence"]
    assert main(["verify", "--decomp", out]) == 0
    assert report_of(capsys)["measured"]["valid"] is True


def test_decompose_malformed_json(tmp_path, capsys):
    inp = write(tmp_path, "bad.json", '{"space": "euclidean", ')
    assert main(["decompose", "--space", "euclidean", "--in", inp, "--out", str(tmp_path / "o.json")]) == 2
    assert "malformed JSON" in capsys.readouterr().err


def test_decompose_map_witness(tmp_path, capsys):
    inp = write(tmp_path, "w.json", io.witness_to_json(gen_map_witness(3, 3)))
    out = str(tmp_path / "d.json")
    assert main(["decompose", "--witness", "--in", inp, "--out", out]) == 0
    rep = report_of(capsys)
    assert rep["measured"]["independence"] <= 9
    assert main(["verify", "--decomp", out]) == 0


def test_decompose_power_and_cliquify(tmp_path, capsys):
    G, D = gen_layered_pathwidth(25, 3, 2, 0.5, seed=4)
    inp = write(tmp_path, "l.json", {"graph": io.graph_to_json(G), "decomposition": io.decomposition_to_json(D)})
    out = str(tmp_path / "p.json")
    assert main(["decompose", "--power", "2", "--in", inp, "--out", out]) == 0
    rep = report_of(capsys)
    assert rep["measured"]["clique_cover"] <= rep["certified"]["clique_cover"] == 8
    assert main(["decompose", "--cliquify", "0,5", "1", "--in", inp, "--out", out]) == 0
    assert main(["decompose", "--cliquify", "0,x", "1", "--in", inp, "--out", out]) == 2
    assert main(["decompose", "--power", "1", "--in", inp, "--out", out]) == 2


def test_verify_detects_broken_decomposition(tmp_path, capsys):
    G, D = gen_layered_pathwidth(10, 2, 1, 0.9, seed=0)
    data = io.decomposition_to_json(D, G)
    data["bags"] = {k: [] for k in data["bags"]}
    path = write(tmp_path, "broken.json", data)
    assert main(["verify", "--decomp", path]) == 1
    assert report_of(capsys)["measured"]["failed"] == "T1"


def test_separate_and_solve(tmp_path, capsys):
    inst = write(tmp_path, "u.json", io.instance_to_json(gen_random_disks("euclidean", 80, 6.0, 0.5, seed=2)))
    out = str(tmp_path / "s.json")
    assert main(["separate", "--instance", inst, "--out", out]) == 0
    cs = io.separator_from_json(io.load_file(out))
    assert cs.balance <= 2 / 3
    c5 = write(tmp_path, "c5.json", {"n": 5, "edges": [[i, (i + 1) % 5] for i in range(5)]})
    td = write(tmp_path, "td.json", {"nodes": [0, 1, 2], "tree_edges": [[0, 1], [1, 2]], "bags": {"0": [0, 1, 4], "1": [1, 3, 4], "2": [1, 2, 3]}})
    res = str(tmp_path / "r.json")
    assert main(["solve", "--problem", "mwis", "--graph", c5, "--decomp", td, "--out", res]) == 0
    value, chosen, _ = io.solver_result_from_json(io.load_file(res))
    assert value == 2 and len(chosen) == 2


def test_solve_packing(tmp_path, capsys):
    G, D = gen_layered_pathwidth(12, 3, 1, 0.8, seed=7)
    path = write(tmp_path, "l.json", io.decomposition_to_json(D, G))
    assert main(["solve", "--problem", "packing", "--d", "2", "--decomp", path]) == 0
    assert main(["solve", "--problem", "packing", "--decomp", path]) == 2


def test_capacity_exit_code(tmp_path, monkeypatch, capsys):
    G, D = gen_layered_pathwidth(40, 1, 3, 0.0, seed=0)
    data = io.decomposition_to_json(D, G)
    data["nodes"], data["tree_edges"], data["bags"] = [0], [], {"0": list(range(40))}
    path = write(tmp_path, "wide.json", data)
    monkeypatch.setattr(cli, "mwis", functools.partial(solvers.mwis, state_cap=10))
    assert main(["solve", "--problem", "mwis", "--decomp", path]) == 3


def test_gen_commands(tmp_path, capsys):
    out = str(tmp_path / "g.json")
    assert main(["gen", "superclass", "--params", '{"k": 2}', "--out", out]) == 0
    assert io.instance_from_json(io.load_file(out)).n == 7
    assert main(["gen", "named", "--params", '{"name": "petersen"}', "--out", out]) == 0
    assert io.graph_from_json(io.load_file(out)).m == 15
    assert main(["gen", "disks", "--params", '{"n": 3}', "--out", out]) == 2
    assert main(["gen", "map", "--params", '{"rows": 2, "cols": 3, "drop": 0.2}', "--seed", "4", "--out", out]) == 0
    assert main(["gen", "layered", "--params", '{"n": 10, "layers": 2, "k": 1}', "--out", out]) == 0


def test_run_report_bounds():
    assert RunReport("x", certified={"independence": 3}, measured={"independence": 3}).within_bounds()
    assert not RunReport("x", certified={"independence": 3}, measured={"independence": 4}).within_bounds()


# --- bench ------------------------------------------------------------------------------


def test_bench_reproducible_and_parallel_equal():
    a = bench_csv(run_bench("map", [9, 16], [0, 1]))
    b = bench_csv(run_bench("map", [9, 16], [0, 1], workers=2))
    assert a == b
    rows = list(csv.DictReader(_io.StringIO(a)))
    assert [(int(r["n"]), int(r["seed"])) for r in rows] == sorted((int(r["n"]), int(r["seed"])) for r in rows)
    assert all(int(r["measured_alpha"]) <= int(r["certified_bound"]) for r in rows)


def test_bench_udg_weight_per_vertex_decreases(tmp_path, capsys):
    out = tmp_path / "b.csv"
    assert main(["bench", "udg", "--sizes", "100,400,1600", "--seeds", "0", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    ratios = [float(r["sep_weight"]) / int(r["n"]) for r in rows]
    assert ratios == sorted(ratios, reverse=True) and len(set(ratios)) == 3
    again = tmp_path / "c.csv"
    main(["bench", "udg", "--sizes", "100,400,1600", "--seeds", "0", "--out", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "geodecomp.cli", "gen", "named", "--params", '{"name": "cycle", "n": 5}'],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 5
