"""Seeded generators shared by the unit and acceptance tests."""

from fractions import Fraction as F
from itertools import combinations, permutations

from simlab.l0 import StepFunction
from simlab.partial_autos import ExtensionError, pauto
from simlab.structures import graph


def random_step(rng, n=3, max_pieces=4, denom=16):
    k = rng.randint(1, max_pieces)
    cuts = sorted(rng.sample(range(1, denom), k - 1)) if k > 1 else []
    bounds = [0] + cuts + [denom]
    return StepFunction(
        tuple((F(b - a, denom), tuple(rng.sample(range(n), n))) for a, b in zip(bounds, bounds[1:]))
    )


def all_graphs(n):
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield graph(n, [e for i, e in enumerate(pairs) if mask >> i & 1])


def single_pautos(A):
    """Every partial automorphism of A, by brute force over partial injections."""
    out = []
    for k in range(A.size + 1):
        for dom in combinations(range(A.size), k):
            for img in permutations(range(A.size), k):
                try:
                    out.append(pauto(A, dict(zip(dom, img))))
                except ExtensionError:
                    pass
    return out
