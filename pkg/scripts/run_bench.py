"""Run the benchmark suites and write one CSV per suite.

    python3 scripts/run_bench.py --suites udg,map --sizes 100,400 --seeds 0,1 --outdir bench_out
"""

from __future__ import annotations

import argparse
import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from geodecomp.cli import bench_csv, run_bench


@dataclass
class BenchConfig:
    suites: list[str] = field(default_factory=lambda: ["udg", "hudg", "sudg", "map"])
    sizes: list[int] = field(default_factory=lambda: [100, 400, 1600])
    seeds: list[int] = field(default_factory=lambda: [0])
    workers: int = 1
    timing: bool = False
    outdir: Path = Path("bench_out")


def parse_args() -> BenchConfig:
    cfg = BenchConfig()
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--suites", default=",".join(cfg.suites))
    p.add_argument("--sizes", default=",".join(map(str, cfg.sizes)))
    p.add_argument("--seeds", default=",".join(map(str, cfg.seeds)))
    p.add_argument("--workers", type=int, default=cfg.workers)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--outdir", type=Path, default=cfg.outdir)
    a = p.parse_args()
    ints = lambda s: [int(x) for x in s.split(",") if x]
    return BenchConfig(a.suites.split(","), ints(a.sizes), ints(a.seeds), a.workers, a.timing, a.outdir)


def main() -> None:
    cfg = parse_args()
    cfg.outdir.mkdir(parents=True, exist_ok=True)
    for suite in cfg.suites:
        text = bench_csv(run_bench(suite, cfg.sizes, cfg.seeds, cfg.workers, cfg.timing))
        (cfg.outdir / f"{suite}.csv").write_text(text, encoding="utf-8")
        # mean separator weight per vertex for each size
        by_n: dict[int, list[float]] = {}
        for row in csv.DictReader(io.StringIO(text)):
            by_n.setdefault(int(row["n"]), []).append(float(row["sep_weight"]) / int(row["n"]))
        summary = "  ".join(f"n={n}: {sum(v) / len(v):.4f}" for n, v in sorted(by_n.items()))
        print(f"{suite:5s} weight/n  {summary}")


if __name__ == "__main__":
    main()
