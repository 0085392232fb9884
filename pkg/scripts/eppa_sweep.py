"""Minimal EPPA witness sizes for every single partial automorphism of every small graph.

    python3 scripts/eppa_sweep.py --max-vertices 4
"""

import argparse
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, permutations

from simlab.hrushovski import eppa_check
from simlab.partial_autos import ExtensionError, pauto
from simlab.structures import graph


@dataclass
class SweepConfig:
    max_vertices: int = 4
    max_size: int = 20


def graphs(n):
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield graph(n, [e for i, e in enumerate(pairs) if mask >> i & 1])


def partial_autos(A):
    for k in range(A.size + 1):
        for dom in combinations(range(A.size), k):
            for img in permutations(range(A.size), k):
                try:
                    yield pauto(A, dict(zip(dom, img)))
                except ExtensionError:
                    pass


def run(cfg: SweepConfig) -> None:
    print(f"# eppa sweep\tmax_vertices={cfg.max_vertices}\tmax_size={cfg.max_size}")
    print("vertices\tcases\tfailures\twitness_size_histogram")
    for n in range(1, cfg.max_vertices + 1):
        sizes, cases, failures = Counter(), 0, 0
        for A in graphs(n):
            for p in partial_autos(A):
                w = eppa_check(A, [p], cfg.max_size)
                cases += 1
                if w is None or not w.verify([p]):
                    failures += 1
                else:
                    sizes[w.B.size] += 1
        hist = ",".join(f"{k}:{sizes[k]}" for k in sorted(sizes))
        print(f"{n}\t{cases}\t{failures}\t{hist}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-vertices", type=int, default=4)
    ap.add_argument("--max-size", type=int, default=20)
    a = ap.parse_args()
    run(SweepConfig(a.max_vertices, a.max_size))
