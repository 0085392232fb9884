import random

import pytest

from simlab.partial_autos import (
    AclError,
    ExtensionError,
    OrbitFlag,
    close_under_acl,
    compose,
    extend_to_avoid,
    extends,
    identity_on,
    is_closed_set,
    one_point_extend,
    orbit,
    pauto,
)
from simlab.structures import Tag, automorphisms, descriptor, eq_pairs, graph, linear_order
from simlab.words import Defined, Undefined, enumerate_words, partial_evaluate, word


def test_compose_examples():
    M = linear_order(4)
    q = pauto(M, {0: 1, 1: 2, 2: 3})
    assert compose(identity_on(M, [2, 3]), q) == pauto(M, {1: 2, 2: 3})
    assert compose(pauto(M, {1: 2}), pauto(M, {0: 1})) == pauto(M, {0: 2})
    assert compose(pauto(M, {0: 1}), pauto(M, {2: 3})) == pauto(M, {})


def test_extends_examples():
    G = graph(4)
    p = pauto(G, {0: 1, 2: 3})
    assert extends(p, p)
    assert extends(p, pauto(G, {}))
    assert not extends(p, pauto(G, {0: 2}))


def test_close_under_acl_examples():
    G = graph(3, [(0, 1)])
    p = pauto(G, {2: 2})
    assert close_under_acl(p) == p
    M = eq_pairs(4, [(0, 1), (2, 3)])
    assert close_under_acl(pauto(M, {0: 2})) == pauto(M, {0: 2, 1: 3})
    # the unique extension agrees with every automorphism extending {0->2}
    autos = [f for f in automorphisms(M) if f[0] == 2]
    assert {f[1] for f in autos} == {3}
    assert close_under_acl(pauto(M, {})) == pauto(M, {})
    with pytest.raises(AclError):
        close_under_acl(pauto(eq_pairs(3, [(0, 1)]), {0: 2}))


def test_close_under_acl_idempotent_exhaustive():
    for n in range(1, 7):
        for k in range(n // 2 + 1):
            M = eq_pairs(n, [(2 * i, 2 * i + 1) for i in range(k)])
            cls = descriptor(Tag.EQ_PAIRS)
            for a in range(n):
                for b in range(n):
                    try:
                        p = close_under_acl(pauto(M, {a: b}), cls)
                    except ExtensionError:
                        continue
                    assert extends(p, pauto(M, {a: b}))
                    assert close_under_acl(p, cls) == p


def test_one_point_extend_examples():
    M = linear_order(4)
    assert one_point_extend(pauto(M, {1: 2}), 0, 1) == pauto(M, {0: 1, 1: 2})
    with pytest.raises(ExtensionError):
        one_point_extend(pauto(M, {1: 2}), 0, 3)
    G = graph(3, [(0, 1)])
    assert one_point_extend(pauto(G, {}), 2, 0) == pauto(G, {2: 0})


def test_extend_to_avoid_example_and_precondition():
    M = linear_order(5)
    cls = descriptor(Tag.LINEAR_ORDER)
    (r,) = extend_to_avoid([pauto(M, {1: 2})], 0, word("s1", 1), cls)
    assert extends(r, pauto(M, {0: 1}))
    assert partial_evaluate(word("s1", 1), [r], 0) == Defined(1)
    with pytest.raises(ExtensionError):
        extend_to_avoid([pauto(M, {0: 1})], 0, word("s1", 1), cls)


def test_extend_to_avoid_graph_with_growth():
    G = graph(2, [(0, 1)])
    cls = descriptor(Tag.GRAPH)
    w = word("s1 s2 s1^-1", 2)
    qs = [pauto(G, {0: 0}), pauto(G, {})]
    rs = extend_to_avoid(qs, 1, w, cls, growth_budget=3)
    r = partial_evaluate(w, rs, 1)
    assert isinstance(r, Defined) and r.value != 1
    assert all(extends(x, q.rebase(x.ambient)) for x, q in zip(rs, qs))


def test_extend_to_avoid_random_graphs_postcondition():
    rng = random.Random("avoid-graph")
    cls = descriptor(Tag.GRAPH)
    words = [w for w in enumerate_words(2, 4) if w.letters]
    done = 0
    for _ in range(300):
        n = rng.randint(2, 5)
        G = graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5])
        qs = []
        for _ in range(2):
            dom = rng.sample(range(n), rng.randint(0, 2))
            img = rng.sample(range(n), len(dom))
            try:
                qs.append(pauto(G, dict(zip(dom, img))))
            except ExtensionError:
                qs.append(pauto(G, {}))
        w, a = rng.choice(words), rng.randrange(n)
        if not isinstance(partial_evaluate(w, qs, a), Undefined):
            continue
        try:
            rs = extend_to_avoid(qs, a, w, cls, growth_budget=len(w))
        except ExtensionError:
            continue
        r = partial_evaluate(w, rs, a)
        assert isinstance(r, Defined) and r.value != a
        done += 1
    assert done > 100


def test_orbit_examples():
    c3 = graph(3, [(0, 1), (1, 2), (0, 2)])
    ident = pauto(c3, {0: 0, 1: 1, 2: 2})
    assert orbit([ident], 1, 4) == (frozenset({1}), OrbitFlag.CLOSED)
    rot = pauto(c3, {0: 1, 1: 2, 2: 0})
    assert orbit([rot], 0, 3) == (frozenset({0, 1, 2}), OrbitFlag.CLOSED)
    M = linear_order(4)
    assert orbit([pauto(M, {1: 2})], 1, 2) == (frozenset({1, 2}), OrbitFlag.BOUNDARY)


def test_closed_orbits_are_invariant():
    rng = random.Random("orbit")
    G = graph(6)
    for _ in range(100):
        fs = [tuple(rng.sample(range(6), 6)) for _ in range(2)]
        qs = [pauto(G, dict(enumerate(f))) for f in fs]
        a = rng.randrange(6)
        pts, flag = orbit(qs, a, 6 * 2 * 2)
        assert flag == OrbitFlag.CLOSED
        assert is_closed_set(qs, pts)
