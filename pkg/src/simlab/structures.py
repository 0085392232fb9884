"""Finite relational structures for the four built-in Fraïssé classes.

Every class here carries exactly one binary relation (edge, strict order,
or the partner relation of an equivalence with classes of size at most 2),
so a structure is a universe ``0..n-1``, a set of ordered pairs, and for the
ordered metric class a symmetric matrix of exact rational distances.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class Tag(str, Enum):
    GRAPH = "Graph"
    LINEAR_ORDER = "LinearOrder"
    ORDERED_METRIC = "OrderedRationalMetric"
    EQ_PAIRS = "EqPairs"


REL_NAME = {
    Tag.GRAPH: "E",
    Tag.LINEAR_ORDER: "<",
    Tag.ORDERED_METRIC: "<",
    Tag.EQ_PAIRS: "~",
}

SYMMETRIC = {Tag.GRAPH, Tag.EQ_PAIRS}
ORDERED = {Tag.LINEAR_ORDER, Tag.ORDERED_METRIC}


class StructureError(ValueError):
    pass


@dataclass(frozen=True)
class FinStructure:
    tag: Tag
    size: int
    rel: frozenset = frozenset()
    dist: tuple | None = None

    def related(self, i: int, j: int) -> bool:
        return (i, j) in self.rel

    def distance(self, i: int, j: int) -> Fraction | None:
        return None if self.dist is None else self.dist[i][j]

    @cached_property
    def chain(self) -> tuple[int, ...]:
        """Elements listed from least to greatest (ordered classes only)."""
        above = [0] * self.size
        for i, _ in self.rel:
            above[i] += 1
        return tuple(sorted(range(self.size), key=lambda x: -above[x]))

    @cached_property
    def rank(self) -> tuple[int, ...]:
        r = [0] * self.size
        for k, x in enumerate(self.chain):
            r[x] = k
        return tuple(r)

    @cached_property
    def partner(self) -> dict[int, int]:
        return {i: j for i, j in self.rel}

    def diameter(self) -> Fraction:
        if self.dist is None or self.size < 2:
            return Fraction(0)
        return max(self.dist[i][j] for i in range(self.size) for j in range(self.size))

    @property
    def universe(self) -> range:
        return range(self.size)


# --- constructors -----------------------------------------------------------

def graph(n: int, edges: Iterable[tuple[int, int]] = ()) -> FinStructure:
    rel = set()
    for i, j in edges:
        rel.add((i, j))
        rel.add((j, i))
    return FinStructure(Tag.GRAPH, n, frozenset(rel))


def _order_pairs(chain: Sequence[int]) -> frozenset:
    return frozenset((chain[a], chain[b]) for a in range(len(chain)) for b in range(a + 1, len(chain)))


def linear_order(n: int, chain: Sequence[int] | None = None) -> FinStructure:
    """The order in which ``chain`` lists elements bottom to top (default 0<1<...)."""
    chain = tuple(range(n)) if chain is None else tuple(chain)
    return FinStructure(Tag.LINEAR_ORDER, n, _order_pairs(chain))


def ordered_metric(dist: Sequence[Sequence], chain: Sequence[int] | None = None) -> FinStructure:
    n = len(dist)
    chain = tuple(range(n)) if chain is None else tuple(chain)
    d = tuple(tuple(Fraction(x) for x in row) for row in dist)
    return FinStructure(Tag.ORDERED_METRIC, n, _order_pairs(chain), d)


def eq_pairs(n: int, pairs: Iterable[tuple[int, int]] = ()) -> FinStructure:
    rel = set()
    for i, j in pairs:
        rel.add((i, j))
        rel.add((j, i))
    return FinStructure(Tag.EQ_PAIRS, n, frozenset(rel))


def empty(tag: Tag) -> FinStructure:
    return FinStructure(Tag(tag), 0, frozenset(), () if tag == Tag.ORDERED_METRIC else None)


# --- validity ---------------------------------------------------------------

def is_valid(S: FinStructure) -> bool:
    n = S.size
    if any(not (0 <= i < n and 0 <= j < n) or i == j for i, j in S.rel):
        return False
    if S.tag in SYMMETRIC:
        if any((j, i) not in S.rel for i, j in S.rel):
            return False
        if S.tag == Tag.EQ_PAIRS:
            firsts = [i for i, _ in S.rel]
            if len(firsts) != len(set(firsts)):
                return False
        return S.dist is None
    # strict total order
    for i, j in combinations(range(n), 2):
        if ((i, j) in S.rel) == ((j, i) in S.rel):
            return False
    succ: dict[int, set[int]] = {i: set() for i in range(n)}
    for i, j in S.rel:
        succ[i].add(j)
    for i, j in S.rel:
        if not succ[j] <= succ[i]:
            return False
    if S.tag == Tag.LINEAR_ORDER:
        return S.dist is None
    return _metric_ok(S.dist, n)


def _metric_ok(d, n: int) -> bool:
    if d is None or len(d) != n or any(len(row) != n for row in d):
        return False
    for i in range(n):
        if d[i][i] != 0:
            return False
        for j in range(n):
            if d[i][j] != d[j][i] or (i != j and d[i][j] <= 0):
                return False
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][k] > d[i][j] + d[j][k]:
                    return False
    return True


# --- substructures and embeddings -------------------------------------------

def substructure(S: FinStructure, A: Iterable[int]) -> tuple[FinStructure, tuple[int, ...]]:
    """Induced structure on ``A``; returns it with the kept indices (new i is old idx[i])."""
    idx = tuple(sorted(set(A)))
    if any(not 0 <= a < S.size for a in idx):
        raise IndexError(f"index out of range for structure of size {S.size}")
    new = {old: k for k, old in enumerate(idx)}
    rel = frozenset((new[i], new[j]) for i, j in S.rel if i in new and j in new)
    dist = None
    if S.dist is not None:
        dist = tuple(tuple(S.dist[i][j] for j in idx) for i in idx)
    return FinStructure(S.tag, len(idx), rel, dist), idx


@dataclass(frozen=True)
class Embedding:
    source: FinStructure
    target: FinStructure
    map: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.map[i]

    def is_valid(self) -> bool:
        return _map_ok(self.source, self.target, self.map)


def _pair_ok(A: FinStructure, B: FinStructure, i: int, j: int, fi: int, fj: int) -> bool:
    if ((i, j) in A.rel) != ((fi, fj) in B.rel) or ((j, i) in A.rel) != ((fj, fi) in B.rel):
        return False
    if A.dist is not None and A.dist[i][j] != B.dist[fi][fj]:
        return False
    return True


def _map_ok(A: FinStructure, B: FinStructure, f: Sequence[int]) -> bool:
    if A.tag != B.tag or len(f) != A.size or len(set(f)) != len(f):
        return False
    if any(not 0 <= x < B.size for x in f):
        return False
    return all(_pair_ok(A, B, i, j, f[i], f[j]) for i, j in combinations(range(A.size), 2))


def enumerate_embeddings(A: FinStructure, B: FinStructure) -> list[Embedding]:
    """All embeddings A -> B in lexicographic order of the image tuple."""
    if A.tag != B.tag:
        return []
    out: list[Embedding] = []
    img: list[int] = []
    used = [False] * B.size

    def extend(i: int) -> None:
        if i == A.size:
            out.append(Embedding(A, B, tuple(img)))
            return
        for c in range(B.size):
            if used[c]:
                continue
            if all(_pair_ok(A, B, k, i, img[k], c) for k in range(i)):
                used[c] = True
                img.append(c)
                extend(i + 1)
                img.pop()
                used[c] = False

    extend(0)
    return out


def automorphisms(S: FinStructure) -> list[tuple[int, ...]]:
    return [e.map for e in enumerate_embeddings(S, S)]


def is_automorphism(S: FinStructure, f: Sequence[int]) -> bool:
    return len(f) == S.size and _map_ok(S, S, f)


# --- amalgamation and joint embedding --------------------------------------

@dataclass(frozen=True)
class Amalgam:
    structure: FinStructure
    left: Embedding
    right: Embedding


def free_amalgam(C: FinStructure, A: FinStructure, B: FinStructure, eA: Embedding, eB: Embedding) -> Amalgam:
    """A and B glued along C with no edges between A-C and B-C (graphs only)."""
    if C.tag != Tag.GRAPH:
        raise StructureError(f"{C.tag.value} does not have free amalgamation")
    if eA.source != C or eB.source != C or eA.target != A or eB.target != B:
        raise StructureError("embeddings must go from C into A and B")
    if not (eA.is_valid() and eB.is_valid()):
        raise StructureError("invalid embedding")
    # A keeps its indices; B - eB(C) is appended in increasing order
    from_c = {eB.map[c]: eA.map[c] for c in range(C.size)}
    fB = {}
    nxt = A.size
    for b in range(B.size):
        if b in from_c:
            fB[b] = from_c[b]
        else:
            fB[b] = nxt
            nxt += 1
    edges = [(i, j) for i, j in A.rel] + [(fB[i], fB[j]) for i, j in B.rel]
    D = graph(nxt, edges)
    left = Embedding(A, D, tuple(range(A.size)))
    right = Embedding(B, D, tuple(fB[b] for b in range(B.size)))
    return Amalgam(D, left, right)


def disjoint_stack(A: FinStructure, B: FinStructure, d0: Fraction | None = None) -> Amalgam:
    """A followed by B with nothing between them; for ordered classes all of A lies below B."""
    if A.tag != B.tag:
        raise StructureError("class mismatch")
    n, m = A.size, B.size
    rel = set(A.rel) | {(i + n, j + n) for i, j in B.rel}
    if A.tag in ORDERED:
        rel |= {(a, b + n) for a in range(n) for b in range(m)}
    dist = None
    if A.tag == Tag.ORDERED_METRIC:
        if d0 is None:
            raise StructureError("ordered metric stacking needs a cross distance")
        rows = []
        for i in range(n + m):
            row = []
            for j in range(n + m):
                if i < n and j < n:
                    row.append(A.dist[i][j])
                elif i >= n and j >= n:
                    row.append(B.dist[i - n][j - n])
                else:
                    row.append(Fraction(d0))
            rows.append(tuple(row))
        dist = tuple(rows)
    D = FinStructure(A.tag, n + m, frozenset(rel), dist)
    return Amalgam(D, Embedding(A, D, tuple(range(n))), Embedding(B, D, tuple(range(n, n + m))))


def jep_ordered_metric(A: FinStructure, B: FinStructure, d0) -> Amalgam:
    """Place A below B with every cross distance equal to ``d0``."""
    if A.tag != Tag.ORDERED_METRIC or B.tag != Tag.ORDERED_METRIC:
        raise StructureError("jep_ordered_metric needs OrderedRationalMetric inputs")
    d0 = Fraction(d0)
    if d0 <= 0 or 2 * d0 < max(A.diameter(), B.diameter()):
        raise StructureError(f"cross distance {d0} too small for the triangle inequality")
    return disjoint_stack(A, B, d0)


# --- class descriptors ------------------------------------------------------

class ClassDescriptor:
    """Plugin describing one Fraïssé class."""

    tag: Tag
    rigid = False          # finite members have only the trivial automorphism
    algebraic = False      # acl(A) can exceed A

    def is_valid(self, S: FinStructure) -> bool:
        return S.tag == self.tag and is_valid(S)

    def one_point_extensions(self, S: FinStructure) -> Iterator[FinStructure]:
        raise NotImplementedError

    def jep(self, A: FinStructure, B: FinStructure) -> Amalgam:
        return disjoint_stack(A, B)

    def acl(self, M: FinStructure, A: Iterable[int]) -> frozenset[int]:
        A = frozenset(A)
        if any(not 0 <= a < M.size for a in A):
            raise IndexError("index out of range")
        return A

    def realize_image(self, M: FinStructure, z: dict[int, int], b: int) -> tuple[FinStructure, int]:
        """Grow ``M`` by a fresh point ``c`` such that ``z + {b: c}`` preserves the structure."""
        raise NotImplementedError

    def grow_point(self, M: FinStructure, S: tuple[int, ...], key: tuple, rng: random.Random) -> FinStructure:
        """Append a point whose type over ``S`` is ``key``; other relations random."""
        raise NotImplementedError

    def empty(self) -> FinStructure:
        return empty(self.tag)

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


def type_key(M: FinStructure, x: int, S: Sequence[int]) -> tuple:
    """Quantifier-free type of ``x`` over the tuple ``S``."""
    return tuple(((x, s) in M.rel, (s, x) in M.rel, M.distance(x, s)) for s in S)


def _append_point(M: FinStructure, new_rel: Iterable[tuple[int, int]], new_dist: Sequence | None = None) -> FinStructure:
    n = M.size
    dist = None
    if M.dist is not None:
        rows = [tuple(M.dist[i]) + (Fraction(new_dist[i]),) for i in range(n)]
        rows.append(tuple(Fraction(x) for x in new_dist) + (Fraction(0),))
        dist = tuple(rows)
    return FinStructure(M.tag, n + 1, M.rel | frozenset(new_rel), dist)


def _insert_in_order(M: FinStructure, r: int) -> set[tuple[int, int]]:
    """Order pairs for a new point placed at rank ``r`` (0 = bottom)."""
    n = M.size
    chain = M.chain
    return {(x, n) for x in chain[:r]} | {(n, x) for x in chain[r:]}


class GraphClass(ClassDescriptor):
    tag = Tag.GRAPH

    def one_point_extensions(self, S):
        n = S.size
        for mask in range(1 << n):
            nb = [i for i in range(n) if mask >> i & 1]
            yield _append_point(S, [(i, n) for i in nb] + [(n, i) for i in nb])

    def jep(self, A, B):
        return disjoint_stack(A, B)

    def realize_image(self, M, z, b):
        n = M.size
        nb = [z[d] for d in z if (d, b) in M.rel]
        return _append_point(M, [(i, n) for i in nb] + [(n, i) for i in nb]), n

    def grow_point(self, M, S, key, rng):
        n = M.size
        inS = dict(zip(S, key))
        nb = []
        for i in range(n):
            if i in inS:
                if inS[i][0]:
                    nb.append(i)
            elif rng.random() < 0.5:
                nb.append(i)
        return _append_point(M, [(i, n) for i in nb] + [(n, i) for i in nb])


class LinearOrderClass(ClassDescriptor):
    tag = Tag.LINEAR_ORDER
    rigid = True

    def one_point_extensions(self, S):
        for r in range(S.size + 1):
            yield _append_point(S, _insert_in_order(S, r))

    def realize_image(self, M, z, b):
        return _append_point(M, _insert_in_order(M, _image_rank(M, z, b))), M.size

    def grow_point(self, M, S, key, rng):
        r = rng.choice(_ranks_matching(M, S, key))
        return _append_point(M, _insert_in_order(M, r))


def _image_rank(M: FinStructure, z: dict[int, int], b: int) -> int:
    """Rank just above the largest image of a domain point below ``b``."""
    lower = [M.rank[z[d]] for d in z if (d, b) in M.rel]
    return max(lower) + 1 if lower else 0


def _ranks_matching(M: FinStructure, S: Sequence[int], key: tuple) -> list[int]:
    out = []
    for r in range(M.size + 1):
        ok = all((M.rank[s] < r) == k[1] for s, k in zip(S, key))
        if ok:
            out.append(r)
    return out


class OrderedMetricClass(ClassDescriptor):
    """Linearly ordered finite metric spaces with rational distances.

    ``palette`` bounds the distances used by one-point extensions and
    truncation growth; with the default {1, 2} every assignment is metric.
    """

    tag = Tag.ORDERED_METRIC
    rigid = True

    def __init__(self, palette: Sequence = (1, 2)):
        self.palette = tuple(Fraction(p) for p in palette)

    def __repr__(self):
        return f"OrderedMetricClass(palette={[str(p) for p in self.palette]})"

    def jep(self, A, B):
        d0 = max(Fraction(1), A.diameter(), B.diameter())
        return jep_ordered_metric(A, B, d0)

    def empty(self):
        return FinStructure(Tag.ORDERED_METRIC, 0, frozenset(), ())

    def one_point_extensions(self, S):
        from itertools import product

        n = S.size
        for r in range(n + 1):
            pairs = _insert_in_order(S, r)
            for ds in product(self.palette, repeat=n):
                T = _append_point(S, pairs, ds)
                if _metric_ok(T.dist, T.size):
                    yield T

    def realize_image(self, M, z, b):
        n = M.size
        r = _image_rank(M, z, b)
        if z:
            ds = [min(M.dist[b][d] + M.dist[z[d]][y] for d in z) for y in range(n)]
        else:
            ds = [max(Fraction(1), M.diameter())] * n
        return _append_point(M, _insert_in_order(M, r), ds), n

    def grow_point(self, M, S, key, rng):
        n = M.size
        r = rng.choice(_ranks_matching(M, S, key))
        inS = dict(zip(S, key))
        for _ in range(1000):
            ds = [inS[y][2] if y in inS else rng.choice(self.palette) for y in range(n)]
            T = _append_point(M, _insert_in_order(M, r), ds)
            if _metric_ok(T.dist, T.size):
                return T
        raise StructureError("could not place a metric point with the given palette")


class EqPairsClass(ClassDescriptor):
    tag = Tag.EQ_PAIRS
    algebraic = True

    def one_point_extensions(self, S):
        n = S.size
        yield _append_point(S, [])
        for i in range(n):
            if i not in S.partner:
                yield _append_point(S, [(i, n), (n, i)])

    def acl(self, M, A):
        A = super().acl(M, A)
        return A | frozenset(M.partner[a] for a in A if a in M.partner)

    def realize_image(self, M, z, b):
        n = M.size
        if b not in M.partner:
            return _append_point(M, []), n
        bp = M.partner[b]
        if bp in z:
            raise StructureError("domain is not algebraically closed")
        M1 = _append_point(M, [])
        return _append_point(M1, [(n, n + 1), (n + 1, n)]), n

    def grow_point(self, M, S, key, rng):
        n = M.size
        for s, k in zip(S, key):
            if k[0]:
                return _append_point(M, [(s, n), (n, s)])
        free = [i for i in range(n) if i not in M.partner and i not in S]
        if free and rng.random() < 0.5:
            i = rng.choice(free)
            return _append_point(M, [(i, n), (n, i)])
        return _append_point(M, [])


def descriptor(tag: Tag | str) -> ClassDescriptor:
    tag = Tag(tag)
    return {
        Tag.GRAPH: GraphClass,
        Tag.LINEAR_ORDER: LinearOrderClass,
        Tag.ORDERED_METRIC: OrderedMetricClass,
        Tag.EQ_PAIRS: EqPairsClass,
    }[tag]()


def acl(M: FinStructure, A: Iterable[int], cls: ClassDescriptor | None = None) -> frozenset[int]:
    return (cls or descriptor(M.tag)).acl(M, A)


# --- generic truncations ----------------------------------------------------

def unrealized_types(cls: ClassDescriptor, M: FinStructure, richness: int) -> list[tuple[tuple[int, ...], tuple]]:
    """One-point extension types over subsets of size <= richness with no witness in M."""
    out = []
    for k in range(min(richness, M.size) + 1):
        for S in combinations(range(M.size), k):
            sub, _ = substructure(M, S)
            wanted = {type_key(T, k, range(k)) for T in cls.one_point_extensions(sub)}
            seen = {type_key(M, x, S) for x in range(M.size) if x not in S}
            out.extend((S, key) for key in sorted(wanted - seen, key=repr))
    return out


def generic_truncation(cls: ClassDescriptor, size: int, richness: int, seed: int) -> FinStructure:
    """Deterministic finite approximation of the class's Fraïssé limit.

    Repeatedly realizes a seeded-uniform choice among the unrealized
    one-point types over subsets of size <= ``richness``. Linear orders are
    rigidly determined by their size, so that class returns the chain.
    """
    if size < 1:
        raise StructureError("size must be at least 1")
    if cls.tag == Tag.LINEAR_ORDER:
        return linear_order(size)
    rng = random.Random(f"truncation:{cls.tag.value}:{size}:{richness}:{seed}")
    M = next(iter(cls.one_point_extensions(cls.empty())))
    while M.size < size:
        todo = unrealized_types(cls, M, richness)
        if todo:
            S, key = rng.choice(todo)
        else:
            S, key = (), ()
        M = cls.grow_point(M, S, key, rng)
    return M
