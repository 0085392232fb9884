"""Run the L0 non-discreteness construction on seeded linear-order system families.

    python3 scripts/l0_pipeline.py --seeds 1 20 --eps 1/4
"""

import argparse
import time
from dataclasses import dataclass
from fractions import Fraction

from simlab.l0 import L0Error, l0_nondiscrete_from_jep, project_nondiscreteness, random_order_systems
from simlab.partial_autos import ExtensionError
from simlab.structures import Tag, descriptor
from simlab.words import format_word


@dataclass
class PipelineConfig:
    systems: int = 3
    maps: int = 2
    first_seed: int = 1
    last_seed: int = 5
    eps: Fraction = Fraction(1, 4)
    budget: int = 8


def run(cfg: PipelineConfig) -> None:
    cls = descriptor(Tag.LINEAR_ORDER)
    print(f"# l0 pipeline\tsystems={cfg.systems}\tmaps={cfg.maps}\teps={cfg.eps}\tbudget={cfg.budget}")
    print("seed\tstatus\tword\trho\tpieces\tprojected_piece\tseconds")
    for seed in range(cfg.first_seed, cfg.last_seed + 1):
        t0 = time.perf_counter()
        try:
            W = l0_nondiscrete_from_jep(cls, random_order_systems(cfg.systems, cfg.maps, seed), cfg.eps, cfg.budget)
            piece = project_nondiscreteness(W.fs, [W.word], cfg.eps, W.metric)
        except (ExtensionError, L0Error) as exc:
            print(f"{seed}\tfailed\t\t\t\t{exc}\t{time.perf_counter() - t0:.3f}")
            continue
        dt = time.perf_counter() - t0
        print(f"{seed}\tok\t{format_word(W.word)}\t{W.rho}\t{len(W.fs[0])}\t{piece}\t{dt:.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=3)
    ap.add_argument("--maps", type=int, default=2)
    ap.add_argument("--seeds", type=int, nargs=2, default=(1, 5), metavar=("FIRST", "LAST"))
    ap.add_argument("--eps", type=Fraction, default=Fraction(1, 4))
    ap.add_argument("--budget", type=int, default=8)
    a = ap.parse_args()
    run(PipelineConfig(a.systems, a.maps, a.seeds[0], a.seeds[1], a.eps, a.budget))
