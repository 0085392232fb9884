"""Scale-stamped evidence for the precompact / discrete / non-discrete trichotomy.

Every verdict is a statement about a finite truncation and a word bound,
never about the infinite automorphism group. Tuples are given as partial
automorphisms of a truncation: for ordered classes a finite chain has no
nontrivial automorphism, so maps are finite windows of automorphisms of
the limit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .hrushovski import PrecompactKind, as_maps, precompact_evidence
from .partial_autos import (
    AVOID,
    FIX,
    ExtensionError,
    Goal,
    PartialAutomorphism,
    compose,
    extend_for_goals,
    extend_to_avoid,
    pauto,
)
from .structures import (
    ORDERED,
    ClassDescriptor,
    Embedding,
    FinStructure,
    StructureError,
    Tag,
    disjoint_stack,
    linear_order,
)
from .words import (
    Defined,
    ReducedWord,
    Undefined,
    ends_with,
    enumerate_words,
    partial_evaluate,
)


class VerdictTag(str, Enum):
    PRECOMPACT = "PrecompactEvidence"
    DISCRETE = "DiscreteEvidence"
    NONDISCRETE = "NonDiscreteWitness"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class FixingWitness:
    word: ReducedWord
    fixed: tuple[int, ...]
    moved: int


@dataclass(frozen=True)
class TrichotomyVerdict:
    tag: VerdictTag
    size: int
    word_bound: int
    orbit_sizes: tuple[int, ...] = ()
    witnesses: tuple[FixingWitness, ...] = ()
    separating_set: tuple[int, ...] = ()
    words_scanned: int = 0


def _word_map(w: ReducedWord, maps: Sequence[PartialAutomorphism]) -> dict[int, int]:
    size = maps[0].ambient.size
    out = {}
    for x in range(size):
        r = partial_evaluate(w, maps, x)
        if isinstance(r, Defined):
            out[x] = r.value
    return out


def _moved_point(m: dict[int, int]) -> int | None:
    for x in sorted(m):
        if m[x] != x:
            return x
    return None


def _fixes(m: dict[int, int], A) -> bool:
    return all(m.get(a) == a for a in A)


def default_targets(base: Sequence[int], count: int = 3) -> list[tuple[int, ...]]:
    base = list(base)
    return [tuple(base[:k]) for k in range(1, min(count, len(base)) + 1)]


def classify(
    cls: ClassDescriptor | None,
    fs,
    base: Sequence[int],
    word_bound: int,
    fix_targets: Sequence[Sequence[int]] | None = None,
    max_words: int | None = None,
) -> TrichotomyVerdict:
    """Classify a tuple on a truncation from bounded orbit and word scans.

    ``fs`` are partial automorphisms (or permutations) of one truncation.
    Words are scanned in shortlex order; the shortlex-least witness wins for
    each target set.
    """
    maps = as_maps(fs)
    size = maps[0].ambient.size
    pre = precompact_evidence(maps, base, word_bound)
    if pre.kind == PrecompactKind.ALL_ORBITS_CLOSED:
        return TrichotomyVerdict(VerdictTag.PRECOMPACT, size, word_bound, orbit_sizes=pre.sizes)
    targets = [tuple(t) for t in (default_targets(base) if fix_targets is None else fix_targets)]
    if not targets:
        return TrichotomyVerdict(VerdictTag.INCONCLUSIVE, size, word_bound)
    found: dict[int, FixingWitness] = {}
    scanned = 0
    for w in enumerate_words(len(maps), word_bound):
        if not w.letters:
            continue
        if max_words is not None and scanned >= max_words:
            return TrichotomyVerdict(VerdictTag.INCONCLUSIVE, size, word_bound, words_scanned=scanned)
        scanned += 1
        m = _word_map(w, maps)
        x = _moved_point(m)
        if x is None:
            continue
        for k, A in enumerate(targets):
            if k not in found and _fixes(m, A):
                found[k] = FixingWitness(w, A, x)
        if len(found) == len(targets):
            wit = tuple(found[k] for k in range(len(targets)))
            return TrichotomyVerdict(VerdictTag.NONDISCRETE, size, word_bound, witnesses=wit, words_scanned=scanned)
    missing = next(k for k in range(len(targets)) if k not in found)
    return TrichotomyVerdict(
        VerdictTag.DISCRETE, size, word_bound, separating_set=targets[missing], words_scanned=scanned
    )


def verify_verdict(verdict: TrichotomyVerdict, fs) -> bool:
    """Re-check a NonDiscrete or Discrete payload by composing partial maps directly."""
    maps = as_maps(fs)

    def word_map(w: ReducedWord) -> dict[int, int]:
        M = maps[0].ambient
        out = PartialAutomorphism(M, tuple((x, x) for x in range(M.size)))
        for z in reversed(w.letters):
            q = maps[abs(z) - 1] if z > 0 else maps[abs(z) - 1].inverse()
            out = compose(q, out)
        return out.forward

    if verdict.tag == VerdictTag.NONDISCRETE:
        for wit in verdict.witnesses:
            m = word_map(wit.word)
            if not _fixes(m, wit.fixed) or m.get(wit.moved, wit.moved) == wit.moved:
                return False
        return True
    if verdict.tag == VerdictTag.DISCRETE:
        A = verdict.separating_set
        for w in enumerate_words(len(maps), verdict.word_bound):
            m = word_map(w)
            if _fixes(m, A) and any(m[x] != x for x in m):
                return False
        return True
    return True


# --- constructive non-discreteness -------------------------------------------

def find_fixing_word(
    qs: Sequence[PartialAutomorphism],
    fixed: Sequence[int],
    cls: ClassDescriptor | None = None,
    word_bound: int = 6,
    growth_budget: int = 0,
    max_nodes: int = 2000,
    words: Sequence[ReducedWord] | None = None,
) -> tuple[tuple[PartialAutomorphism, ...], ReducedWord, int]:
    """Extend ``qs`` and find a word fixing ``fixed`` pointwise yet moving some point.

    Scans words in shortlex order; for each, extends the maps so that every
    point of ``fixed`` returns to itself, then forces some other point to move.
    """
    fixed = list(fixed)
    M = qs[0].ambient
    cands = words if words is not None else enumerate_words(len(qs), word_bound)
    for w in cands:
        if not w.letters:
            continue
        fix_goals = [Goal(w, a, FIX) for a in fixed]
        try:
            base = extend_for_goals(qs, fix_goals, cls, growth_budget, max_nodes)
        except ExtensionError:
            continue
        m = _word_map(w, base)
        x = _moved_point(m)
        if x is not None:
            return base, w, x
        used = base[0].ambient.size - M.size
        for x in range(base[0].ambient.size + 1):
            if x in fixed:
                continue
            try:
                rs = extend_for_goals(base, [Goal(w, x, AVOID)], cls, growth_budget - used, max_nodes)
            except (ExtensionError, IndexError):
                continue
            return rs, w, x
    raise ExtensionError("no fixing word within the word bound")


def densify_witness(
    ps: Sequence[PartialAutomorphism],
    a: int,
    w_seq: Sequence[ReducedWord],
    k: int,
    cls: ClassDescriptor | None = None,
    growth_budget: int = 0,
    scan_bound: int = 6,
) -> tuple[tuple[PartialAutomorphism, ...], int]:
    """Find l >= k and an extension r of ps with w_l(r)(a) defined and != a.

    Scans u in shortlex order for u(ps)(a) undefined, then looks for
    w_l = v u with l >= k and runs the extension induction on w_l.
    """
    n = len(ps)
    undefined_found = False
    for u in enumerate_words(n, scan_bound):
        if not isinstance(partial_evaluate(u, ps, a), Undefined):
            continue
        undefined_found = True
        for l in range(k, len(w_seq)):
            if not ends_with(w_seq[l], u):
                continue
            try:
                rs = extend_to_avoid(ps, a, w_seq[l], cls, growth_budget)
            except ExtensionError:
                continue
            return rs, l
    if not undefined_found:
        raise ExtensionError(f"no word of length <= {scan_bound} is undefined at {a}")
    raise ExtensionError("growth budget exhausted for every candidate word")


# --- joint embedding of systems ----------------------------------------------

@dataclass(frozen=True)
class SystemJepWitness:
    A: FinStructure
    maps: tuple[PartialAutomorphism, ...]
    embeddings: tuple[Embedding, ...]

    def verify(self, systems) -> bool:
        """e_i o p_j^i ⊆ p^j o e_i for every system i and coordinate j."""
        for (Ai, ps), e in zip(systems, self.embeddings):
            if not e.is_valid() or e.source != Ai or e.target != self.A:
                return False
            for p, q in zip(ps, self.maps):
                if any(q.forward.get(e.map[a]) != e.map[b] for a, b in p.pairs):
                    return False
        return True


def diagonal_conjugacy_jep(cls: ClassDescriptor, systems: Sequence[tuple[FinStructure, Sequence[PartialAutomorphism]]]) -> SystemJepWitness:
    """Stack the systems (system i entirely below system i+1) and union the maps."""
    if cls.tag not in ORDERED:
        raise StructureError(f"system JEP is only built for ordered classes, not {cls.tag.value}")
    if not systems:
        raise ValueError("need at least one system")
    n = len(systems[0][1])
    if any(len(ps) != n for _, ps in systems):
        raise ValueError("systems must share the arity n")
    d0 = None
    if cls.tag == Tag.ORDERED_METRIC:
        d0 = max([Fraction(1)] + [A.diameter() for A, _ in systems])
    A, _ = systems[0][0], None
    offsets = [0]
    for Ai, _ in systems[1:]:
        offsets.append(A.size)
        A = disjoint_stack(A, Ai, d0).structure
    maps = []
    for j in range(n):
        pairs = []
        for (Ai, ps), off in zip(systems, offsets):
            pairs.extend((a + off, b + off) for a, b in ps[j].pairs)
        maps.append(pauto(A, dict(pairs)))
    embs = tuple(Embedding(Ai, A, tuple(range(off, off + Ai.size))) for (Ai, _), off in zip(systems, offsets))
    out = SystemJepWitness(A, tuple(maps), embs)
    assert out.verify(systems)
    return out


# --- pairs in Aut(Q) generating a non-discrete group ------------------------

@dataclass(frozen=True)
class QWitness:
    maps: tuple[PartialAutomorphism, PartialAutomorphism]
    designated: tuple[int, ...]
    witnesses: tuple[FixingWitness, ...]
    seed: int


class TruncationExhausted(ExtensionError):
    pass


def _shift(M: FinStructure, lo: int, hi: int, step: int) -> PartialAutomorphism:
    return pauto(M, {x: x + step for x in range(lo, hi) if x + step < M.size})


def nondiscrete_witness_pairs_Q(
    truncation_size: int,
    depth: int,
    seed: int,
    word_bound: int = 6,
    max_nodes: int = 2000,
) -> QWitness:
    """A pair of order-preserving maps on a chain with nested fixing words.

    The maps start as seeded shifts on seeded windows. For j = 1..depth the
    word search extends them (inside the truncation only) until some word
    fixes the first j designated points and moves another point.
    """
    N = truncation_size
    rng = random.Random(f"witness-q:{N}:{depth}:{seed}")
    M = linear_order(N)
    if depth == 0:
        return QWitness((pauto(M), pauto(M)), (), (), seed)
    if N < 4 * depth + 6:
        raise TruncationExhausted(f"truncation of size {N} is too small for depth {depth}; try >= {4 * depth + 6}")
    lo_mid, hi_mid = N // 4, (3 * N) // 4
    designated = tuple(rng.sample(range(lo_mid, hi_mid), depth))
    s1, s2 = rng.sample([1, 2, 3], 2)
    def window():
        lo = rng.randrange(max(0, lo_mid - 6), lo_mid + 1)
        hi = rng.randrange(hi_mid, min(N, hi_mid + 6) + 1)
        return lo, hi
    f = _shift(M, *window(), s1)
    g = _shift(M, *window(), s2)
    maps = (f, g)
    found = []
    for j in range(1, depth + 1):
        F = designated[:j]
        try:
            maps, w, x = find_fixing_word(maps, F, None, word_bound, 0, max_nodes)
        except ExtensionError as exc:
            raise TruncationExhausted(
                f"no witness for the first {j} designated points in a truncation of size {N}"
            ) from exc
        found.append(FixingWitness(w, F, x))
    out = QWitness(maps, designated, tuple(found), seed)
    verdict = TrichotomyVerdict(VerdictTag.NONDISCRETE, N, word_bound, witnesses=out.witnesses)
    assert verify_verdict(verdict, maps)
    return out
