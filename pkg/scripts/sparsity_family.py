"""Sparsity certificates for the two-part equality family.

Part one fixes exactly four ones on x1..xn and copies x into y; part two
asks for n ones among y1..yn, z1..zn. The largest projection onto the
shared variables has C(n, 4) solutions, which the certificate should
report for each n.

    python3 scripts/sparsity_family.py --sizes 5 6 7 8
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass, field

from globalcsp.constraints import CardinalitySet, EgcConstraint, TableConstraint
from globalcsp.core import CspInstance
from globalcsp.enumeration import has_sparse_intersections
from globalcsp.reduction import SubproblemDecomposition


@dataclass
class FamilyConfig:
    sizes: list = field(default_factory=lambda: [5, 6, 7, 8])
    exponent: int = 1


def family(n: int) -> CspInstance:
    B = frozenset({0, 1})
    xs = [f"x{i}" for i in range(1, n + 1)]
    ys = [f"y{i}" for i in range(1, n + 1)]
    zs = [f"z{i}" for i in range(1, n + 1)]
    four = EgcConstraint(xs, {1: CardinalitySet.of({4}), 0: CardinalitySet.interval(0, n)},
                         {v: B for v in xs})
    copies = [TableConstraint([x, y], [(0, 0), (1, 1)], {x: B, y: B}) for x, y in zip(xs, ys)]
    half = EgcConstraint(ys + zs, {1: CardinalitySet.of({n}), 0: CardinalitySet.of({n})},
                         {v: B for v in ys + zs})
    P = CspInstance({v: B for v in xs + ys}, [four] + copies)
    Q = CspInstance({v: B for v in ys + zs}, [half])
    return SubproblemDecomposition([P, Q]).as_instance()


def run(cfg: FamilyConfig) -> int:
    print(f"{'n':>3} {'|P|':>6} {'bound':>7} {'max':>6} {'C(n,4)':>7} {'probes':>7} verdict")
    bad = 0
    for n in cfg.sizes:
        inst = family(n)
        # every proper subset of the n shared variables gets probed
        t0 = time.perf_counter()
        cert = has_sparse_intersections(inst, cfg.exponent, probe_budget=2 ** n - 2)
        elapsed = time.perf_counter() - t0
        want = math.comb(n, 4)
        bad += cert.verdict == "sparse" and cert.max_count != want
        print(f"{n:>3} {inst.size():>6} {cert.bound:>7} {cert.max_count:>6} {want:>7} "
              f"{cert.probes:>7} {cert.verdict} ({elapsed:.1f}s)")
    return 1 if bad else 0


def parse(argv=None) -> FamilyConfig:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=FamilyConfig().sizes)
    parser.add_argument("--exponent", type=int, default=FamilyConfig.exponent)
    return FamilyConfig(**vars(parser.parse_args(argv)))


if __name__ == "__main__":
    sys.exit(run(parse()))
