from itertools import combinations, permutations, product

import pytest

from simlab.hrushovski import (
    EppaFailure,
    PrecompactKind,
    eppa_check,
    hrushovski_chain,
    precompact_evidence,
)
from simlab.partial_autos import PartialAutomorphism, pauto
from simlab.structures import Tag, descriptor, graph, is_automorphism, linear_order

from helpers import all_graphs, single_pautos


def min_witness_size(A, p, limit):
    """Unordered search: smallest k with a graph on k vertices extending A and an automorphism extending p."""
    n = A.size
    for k in range(n, limit + 1):
        new_pairs = [(i, j) for i, j in combinations(range(k), 2) if j >= n]
        free_src = [x for x in range(k) if x not in p.forward]
        free_dst = [y for y in range(k) if y not in p.backward]
        perms = []
        for img in permutations(free_dst):
            f = dict(p.forward)
            f.update(zip(free_src, img))
            perms.append(tuple(f[x] for x in range(k)))
        base = {(i, j) for i, j in A.rel if i < j}
        for bits in product((0, 1), repeat=len(new_pairs)):
            E = base | {e for e, b in zip(new_pairs, bits) if b}
            B = graph(k, E)
            if any(is_automorphism(B, f) for f in perms):
                return k
    return None


def test_eppa_examples():
    edge = graph(2, [(0, 1)])
    w = eppa_check(edge, [pauto(edge, {0: 1, 1: 0})], 12)
    assert w.B == edge and w.autos == ((1, 0),)
    order = linear_order(2)
    for m in (2, 5, 10):
        assert eppa_check(order, [pauto(order, {0: 1})], m) is None
    A = graph(3, [(0, 1)])
    p = pauto(A, {0: 2})
    w = eppa_check(A, [p], 12)
    assert w is not None and w.verify([p])
    assert w.B.size == min_witness_size(A, p, 6)


def test_eppa_minimality_against_unordered_search():
    for n in range(1, 4):
        for A in all_graphs(n):
            for p in single_pautos(A):
                w = eppa_check(A, [p], 8)
                assert w is not None and w.verify([p])
                assert w.B.size == min_witness_size(A, p, w.B.size)


def test_eppa_parallel_matches_serial():
    for A in all_graphs(3):
        for p in single_pautos(A)[:6]:
            assert eppa_check(A, [p], 8, workers=1) == eppa_check(A, [p], 8, workers=4)


def test_eppa_two_maps():
    A = graph(3, [(0, 1)])
    ps = [pauto(A, {0: 2}), pauto(A, {2: 1})]
    w = eppa_check(A, ps, 8)
    assert w is not None and w.verify(ps)


def test_chain_examples():
    cls = descriptor(Tag.GRAPH)
    edge = graph(2, [(0, 1)])
    chain, perms = hrushovski_chain(cls, [pauto(edge, {0: 1, 1: 0})], 3)
    assert chain == [edge] * 3 and perms == ((1, 0),)
    order = linear_order(2)
    with pytest.raises(EppaFailure) as exc:
        hrushovski_chain(descriptor(Tag.LINEAR_ORDER), [pauto(order, {0: 1})], 4)
    assert exc.value.stage == 1
    A = graph(3, [(0, 1)])
    p = pauto(A, {0: 2})
    chain, (f,) = hrushovski_chain(cls, [p], 2, new_points_per_stage=1, seed=5)
    for prev, nxt in zip([A] + chain, chain):
        assert nxt.size >= prev.size
        sub_rel = {(i, j) for i, j in nxt.rel if i < prev.size and j < prev.size}
        assert sub_rel == set(prev.rel)
    assert is_automorphism(chain[-1], f) and f[0] == 2


def test_precompact_evidence_examples():
    ident = (0, 1, 2, 3)
    v = precompact_evidence([ident], [0, 1, 2, 3], 3)
    assert v.kind == PrecompactKind.ALL_ORBITS_CLOSED and v.sizes == (1, 1, 1, 1)
    cyc = (1, 2, 3, 4, 0)
    v = precompact_evidence([cyc], [0], 5)
    assert v.kind == PrecompactKind.ALL_ORBITS_CLOSED and v.sizes == (5,)
    M = linear_order(6)
    shift = PartialAutomorphism(M, tuple((i, i + 1) for i in range(5)))
    assert precompact_evidence([shift], [2], 8).kind == PrecompactKind.BOUNDARY
