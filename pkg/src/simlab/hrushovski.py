"""Brute-force EPPA search, precompact chains, and orbit-based precompactness evidence."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, permutations
from typing import Iterator, Sequence

from . import perm as P
from .partial_autos import OrbitFlag, PartialAutomorphism, is_closed_set, orbit
from .structures import (
    ORDERED,
    SYMMETRIC,
    ClassDescriptor,
    Embedding,
    FinStructure,
    Tag,
    descriptor,
    is_automorphism,
    is_valid,
)


class EppaFailure(RuntimeError):
    def __init__(self, stage: int, max_size: int):
        super().__init__(f"no EPPA witness of size <= {max_size} at stage {stage}")
        self.stage = stage


@dataclass(frozen=True)
class EppaWitness:
    B: FinStructure
    inclusion: Embedding
    autos: tuple[P.Perm, ...]

    def verify(self, ps: Sequence[PartialAutomorphism]) -> bool:
        A = self.inclusion.source
        if not (is_valid(self.B) and self.inclusion.is_valid()):
            return False
        inc = self.inclusion.map
        for f, p in zip(self.autos, ps):
            if not is_automorphism(self.B, f):
                return False
            if any(f[inc[a]] != inc[b] for a, b in p.pairs):
                return False
        return len(self.autos) == len(ps) and all(p.ambient == A for p in ps)


def _extensions(p: PartialAutomorphism, k: int) -> Iterator[P.Perm]:
    """Permutations of range(k) extending p, in lexicographic order."""
    free_src = [x for x in range(k) if x not in p.forward]
    free_dst = [y for y in range(k) if y not in p.backward]
    for img in permutations(free_dst):
        f = dict(p.forward)
        f.update(zip(free_src, img))
        yield tuple(f[x] for x in range(k))


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _forced_structure(A: FinStructure, fs: Sequence[P.Perm], k: int) -> FinStructure | None:
    """Smallest structure on range(k) containing A (as prefix) and invariant under fs."""
    sym = A.tag in SYMMETRIC
    pairs = list(combinations(range(k), 2)) if sym else [(x, y) for x in range(k) for y in range(k) if x != y]
    key = (lambda x, y: (min(x, y), max(x, y))) if sym else (lambda x, y: (x, y))
    uf = _UnionFind()
    for x, y in pairs:
        for f in fs:
            uf.union(key(x, y), key(f[x], f[y]))
    status: dict = {}
    n = A.size
    for x, y in pairs:
        if x < n and y < n:
            r = uf.find((x, y))
            val = (x, y) in A.rel
            if status.setdefault(r, val) != val:
                return None
    rel = set()
    for x, y in pairs:
        if status.get(uf.find((x, y))):
            rel.add((x, y))
            if sym:
                rel.add((y, x))
    B = FinStructure(A.tag, k, frozenset(rel))
    return B if is_valid(B) else None


def _rel_key(B: FinStructure) -> tuple:
    return (len(B.rel), tuple(sorted(B.rel)))


def _search_size(A, ps, k, first_images=None):
    """Best (B, fs) of size k; ``first_images`` restricts f_1's image of its first free point."""
    best = None
    gens = [list(_extensions(p, k)) for p in ps]
    if first_images is not None:
        free = [x for x in range(k) if x not in ps[0].forward]
        gens[0] = [f for f in gens[0] if not free or f[free[0]] in first_images]
    from itertools import product

    for fs in product(*gens):
        B = _forced_structure(A, fs, k)
        if B is None:
            continue
        cand = (_rel_key(B), fs, B)
        if best is None or cand[:2] < best[:2]:
            best = cand
    return best


def eppa_check(
    A: FinStructure,
    ps: Sequence[PartialAutomorphism],
    max_size: int = 12,
    cls: ClassDescriptor | None = None,
    workers: int = 1,
) -> EppaWitness | None:
    """Smallest B ⊇ A (A as an index prefix) on which every p_i extends to an automorphism.

    Candidates are ordered by |B|, then by number of relation tuples, then by
    the sorted tuples, then by the automorphism tuple. For each tuple of
    permutations extending the p_i, the least invariant structure is the
    orbit closure of A's relations, so only the permutations are searched.
    Ordered classes are rigid: only restrictions of the identity extend.
    """
    cls = cls or descriptor(A.tag)
    ps = tuple(ps)
    if any(p.ambient != A for p in ps):
        raise ValueError("partial automorphisms must live on A")
    if max_size < A.size:
        return None
    inc = Embedding(A, A, tuple(range(A.size)))
    if not ps:
        return EppaWitness(A, inc, ())
    if cls.rigid or A.tag in ORDERED:
        if all(a == b for p in ps for a, b in p.pairs):
            return EppaWitness(A, inc, tuple(P.identity(A.size) for _ in ps))
        return None
    for k in range(A.size, max_size + 1):
        if workers > 1:
            free = [x for x in range(k) if x not in ps[0].forward]
            targets = [y for y in range(k) if y not in ps[0].backward] if free else [None]
            chunks = [None] if not free else [[t] for t in targets]
            with ThreadPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(lambda ch: _search_size(A, ps, k, ch), chunks))
            results = [r for r in results if r is not None]
            best = min(results, key=lambda r: r[:2]) if results else None
        else:
            best = _search_size(A, ps, k)
        if best is not None:
            _, fs, B = best
            return EppaWitness(B, Embedding(A, B, tuple(range(A.size))), tuple(fs))
    return None


def _grow_random(cls: ClassDescriptor, A: FinStructure, count: int, rng: random.Random) -> FinStructure:
    for _ in range(count):
        exts = list(cls.one_point_extensions(A))
        A = rng.choice(exts)
    return A


def hrushovski_chain(
    cls: ClassDescriptor,
    ps: Sequence[PartialAutomorphism],
    depth: int,
    max_size: int = 12,
    new_points_per_stage: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> tuple[list[FinStructure], tuple[P.Perm, ...]]:
    """A_1 ⊆ ... ⊆ A_depth with the maps of stage s total on A_s.

    Stage s optionally adds fresh points to A_{s-1} (seeded one-point
    extensions), then extends the current maps by an EPPA witness.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    rng = random.Random(f"chain:{seed}")
    A = ps[0].ambient
    maps = tuple(ps)
    chain = []
    for stage in range(1, depth + 1):
        A1 = _grow_random(cls, A, new_points_per_stage, rng)
        maps = tuple(PartialAutomorphism(A1, m.pairs) for m in maps)
        w = eppa_check(A1, maps, max_size, cls, workers)
        if w is None:
            raise EppaFailure(stage, max_size)
        A = w.B
        chain.append(A)
        maps = tuple(PartialAutomorphism(A, tuple(enumerate(f))) for f in w.autos)
    return chain, tuple(m.as_perm() for m in maps)


# --- precompactness evidence ----------------------------------------------

class PrecompactKind(str, Enum):
    ALL_ORBITS_CLOSED = "AllOrbitsClosed"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class PrecompactVerdict:
    kind: PrecompactKind
    sizes: tuple[int, ...] = ()
    boundary_point: int | None = None


def as_maps(fs, M: FinStructure | None = None) -> tuple[PartialAutomorphism, ...]:
    """Accept PartialAutomorphisms or permutation tuples."""
    out = []
    for f in fs:
        if isinstance(f, PartialAutomorphism):
            out.append(f)
        else:
            amb = M if M is not None else FinStructure(Tag.GRAPH, len(f))
            out.append(PartialAutomorphism(amb, tuple(enumerate(f))))
    return tuple(out)


def precompact_evidence(fs, base, word_bound: int) -> PrecompactVerdict:
    """AllOrbitsClosed if every base point's orbit is complete within ``word_bound``.

    An orbit counts as closed only when no letter is undefined along it and
    the points found are closed under every map and inverse.
    """
    maps = as_maps(fs)
    sizes = []
    for a in base:
        pts, flag = orbit(maps, a, word_bound)
        if flag == OrbitFlag.BOUNDARY or not is_closed_set(maps, pts):
            return PrecompactVerdict(PrecompactKind.BOUNDARY, boundary_point=a)
        sizes.append(len(pts))
    return PrecompactVerdict(PrecompactKind.ALL_ORBITS_CLOSED, tuple(sizes))
