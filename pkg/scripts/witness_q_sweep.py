"""Success rate of the non-discrete witness construction over a seed range.

    python3 scripts/witness_q_sweep.py --size 40 --depth 3 --seeds 1 20
"""

import argparse
import time
from dataclasses import dataclass

from simlab.partial_autos import ExtensionError
from simlab.trichotomy import VerdictTag, classify, nondiscrete_witness_pairs_Q, verify_verdict


@dataclass
class SweepConfig:
    size: int = 40
    depth: int = 3
    first_seed: int = 1
    last_seed: int = 10
    word_bound: int = 8


def run(cfg: SweepConfig) -> None:
    print(f"# witness-q sweep\tsize={cfg.size}\tdepth={cfg.depth}\tword_bound={cfg.word_bound}")
    print("seed\tstatus\twitnesses\tverdict\tseconds")
    ok = 0
    for seed in range(cfg.first_seed, cfg.last_seed + 1):
        t0 = time.perf_counter()
        try:
            q = nondiscrete_witness_pairs_Q(cfg.size, cfg.depth, seed)
        except ExtensionError as exc:
            print(f"{seed}\tfailed\t0\t{type(exc).__name__}\t{time.perf_counter() - t0:.3f}")
            continue
        v = classify(None, q.maps, q.designated, cfg.word_bound, fix_targets=[w.fixed for w in q.witnesses])
        good = v.tag == VerdictTag.NONDISCRETE and verify_verdict(v, q.maps)
        ok += good
        print(f"{seed}\t{'ok' if good else 'unverified'}\t{len(q.witnesses)}\t{v.tag.value}\t{time.perf_counter() - t0:.3f}")
    print(f"# verified {ok} of {cfg.last_seed - cfg.first_seed + 1}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=40)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--seeds", type=int, nargs=2, default=(1, 10), metavar=("FIRST", "LAST"))
    ap.add_argument("--word-bound", type=int, default=8)
    a = ap.parse_args()
    run(SweepConfig(a.size, a.depth, a.seeds[0], a.seeds[1], a.word_bound))
