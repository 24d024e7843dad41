"""Sweep connected graph partition instances through the solving pipeline.

Every connected atlas graph up to ``max_vertices`` contributes all triples
(graph, alpha, beta) with alpha < |V| and beta <= |E|. A seeded sample is
solved and compared against the brute-force partition oracle; the script
prints agreement, route counts and the worst count/bound ratio, and can
write one CSV row per instance.

    python3 scripts/cgp_sweep.py --samples 200 --exponent 1 --csv sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import random
import sys
import time
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from globalcsp.apps import (
    Graph,
    cgp_oracle,
    cgp_solution_bound,
    cgp_solution_count,
    check_cgp_witness,
    encode_cgp,
)
from globalcsp.solve import solve_pipeline


@dataclass
class SweepConfig:
    max_vertices: int = 6
    samples: int = 500  # 0 runs every triple
    exponent: int = 1
    seed: int = 0
    csv: str | None = None


def triples(max_vertices: int) -> list:
    out = []
    for i in range(1, 1253):
        g = nx.graph_atlas(i)
        if g.number_of_nodes() > max_vertices:
            break
        if not nx.is_connected(g):
            continue
        n, m = g.number_of_nodes(), g.number_of_edges()
        out.extend((i, a, b) for a in range(1, n) for b in range(m + 1))
    return out


def run(cfg: SweepConfig) -> int:
    population = triples(cfg.max_vertices)
    chosen = population
    if cfg.samples and cfg.samples < len(population):
        chosen = random.Random(cfg.seed).sample(population, cfg.samples)
    rows, routes = [], Counter()
    mismatches = 0
    worst = Fraction(0)
    start = time.perf_counter()
    for i, alpha, beta in chosen:
        G = Graph.from_networkx(nx.graph_atlas(i))
        P = encode_cgp(G, alpha, beta)
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = solve_pipeline(P, cfg.exponent)
        elapsed = time.perf_counter() - t0
        expected = cgp_oracle(G, alpha, beta)
        ok = result.satisfiable == expected
        if ok and result.satisfiable:
            ok = check_cgp_witness(G, alpha, beta, result.solution)
        mismatches += not ok
        routes[result.route] += 1
        count = cgp_solution_count(G, alpha, beta)
        bound = cgp_solution_bound(G, beta)
        worst = max(worst, Fraction(count, bound))
        rows.append({
            "atlas": i, "n": len(G.vertices), "m": len(G.edges), "alpha": alpha, "beta": beta,
            "sat": expected, "route": result.route, "ok": ok,
            "count": count, "bound": bound, "seconds": round(elapsed, 4),
        })
    total = time.perf_counter() - start
    print(f"instances  {len(chosen)} of {len(population)}")
    print(f"mismatches {mismatches}")
    print("routes     " + ", ".join(f"{k}={v}" for k, v in sorted(routes.items())))
    print(f"max count/bound {float(worst):.3g}")
    print(f"elapsed    {total:.1f}s")
    if cfg.csv:
        with open(cfg.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]) if rows else ["atlas"])
            writer.writeheader()
            writer.writerows(rows)
    return 1 if mismatches else 0


def parse(argv=None) -> SweepConfig:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in dataclasses.fields(SweepConfig):
        kind = int if f.type in ("int",) else str
        parser.add_argument("--" + f.name.replace("_", "-"), type=kind, default=f.default)
    return SweepConfig(**vars(parser.parse_args(argv)))


if __name__ == "__main__":
    sys.exit(run(parse()))
