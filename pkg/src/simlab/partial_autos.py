"""Partial automorphisms and the extension induction that forces a word to move a point."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .structures import ClassDescriptor, FinStructure, StructureError, _pair_ok, descriptor
from .words import Defined, ReducedWord, Undefined, partial_evaluate, trace


class ExtensionError(ValueError):
    """The requested extension breaks a class axiom or cannot be completed."""


class AclError(ExtensionError):
    """The ambient structure is too small to hold the algebraic closure."""


class GrowthBudgetExhausted(ExtensionError):
    pass


class SearchLimit(ExtensionError):
    pass


@dataclass(frozen=True)
class PartialAutomorphism:
    ambient: FinStructure
    pairs: tuple[tuple[int, int], ...]

    @cached_property
    def forward(self) -> dict[int, int]:
        return dict(self.pairs)

    @cached_property
    def backward(self) -> dict[int, int]:
        return {b: a for a, b in self.pairs}

    @property
    def dom(self) -> frozenset[int]:
        return frozenset(self.forward)

    @property
    def rng(self) -> frozenset[int]:
        return frozenset(self.backward)

    def __call__(self, a: int) -> int:
        return self.forward[a]

    def get(self, a: int, default=None):
        return self.forward.get(a, default)

    def __len__(self) -> int:
        return len(self.pairs)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{a}->{b}" for a, b in self.pairs) + "}"

    def inverse(self) -> "PartialAutomorphism":
        return PartialAutomorphism(self.ambient, tuple(sorted((b, a) for a, b in self.pairs)))

    def is_total(self) -> bool:
        return len(self.pairs) == self.ambient.size

    def rebase(self, ambient: FinStructure) -> "PartialAutomorphism":
        return PartialAutomorphism(ambient, self.pairs)

    def as_perm(self) -> tuple[int, ...]:
        if not self.is_total():
            raise ValueError("map is not total")
        return tuple(self.forward[i] for i in range(self.ambient.size))


def preserves(M: FinStructure, mapping: Mapping[int, int]) -> bool:
    """Injective, in range, and preserving the relation and distances on its domain."""
    items = list(mapping.items())
    if len({b for _, b in items}) != len(items):
        return False
    if any(not (0 <= a < M.size and 0 <= b < M.size) for a, b in items):
        return False
    for k, (a, fa) in enumerate(items):
        for c, fc in items[k + 1:]:
            if not _pair_ok(M, M, a, c, fa, fc):
                return False
    return True


def pauto(M: FinStructure, mapping: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> PartialAutomorphism:
    mapping = dict(mapping)
    if not preserves(M, mapping):
        raise ExtensionError(f"not a partial automorphism: {mapping}")
    return PartialAutomorphism(M, tuple(sorted(mapping.items())))


def identity_on(M: FinStructure, A: Iterable[int]) -> PartialAutomorphism:
    return pauto(M, {a: a for a in A})


def from_perm(M: FinStructure, f: Sequence[int]) -> PartialAutomorphism:
    return pauto(M, dict(enumerate(f)))


def compose(p: PartialAutomorphism, q: PartialAutomorphism) -> PartialAutomorphism:
    """p after q, defined on {a in dom q : q(a) in dom p}."""
    if p.ambient != q.ambient:
        raise ExtensionError("ambient mismatch")
    return PartialAutomorphism(
        p.ambient, tuple(sorted((a, p.forward[b]) for a, b in q.pairs if b in p.forward))
    )


def extends(p: PartialAutomorphism, q: PartialAutomorphism) -> bool:
    """Whether p lies in the basic open set [q]."""
    return all(p.forward.get(a) == b for a, b in q.pairs)


def _close(M: FinStructure, mapping: dict[int, int], cls: ClassDescriptor) -> dict[int, int]:
    if not cls.algebraic:
        return mapping
    out = dict(mapping)
    inv = {b: a for a, b in out.items()}
    for a, b in list(out.items()):
        pa, pb = M.partner.get(a), M.partner.get(b)
        if (pa is None) != (pb is None):
            raise AclError(f"closure of {a}->{b} needs a partner missing from the ambient")
        if pa is None:
            continue
        if out.get(pa, pb) != pb or inv.get(pb, pa) != pa:
            raise ExtensionError(f"partner of {a} cannot map to partner of {b}")
        out[pa] = pb
        inv[pb] = pa
    return out


def close_under_acl(p: PartialAutomorphism, cls: ClassDescriptor | None = None) -> PartialAutomorphism:
    """The unique extension of p with domain acl(dom p)."""
    cls = cls or descriptor(p.ambient.tag)
    closed = _close(p.ambient, p.forward, cls)
    if len(closed) == len(p.pairs):
        return p
    return pauto(p.ambient, closed)


def one_point_extend(p: PartialAutomorphism, b: int, c: int, cls: ClassDescriptor | None = None) -> PartialAutomorphism:
    cls = cls or descriptor(p.ambient.tag)
    if b in p.forward or c in p.backward:
        raise ExtensionError(f"{b} already in domain or {c} already in range")
    if not 0 <= b < p.ambient.size or not 0 <= c < p.ambient.size:
        raise IndexError("point outside the ambient")
    M = p.ambient
    if not all(_pair_ok(M, M, d, b, e, c) for d, e in p.pairs):
        raise ExtensionError(f"{b}->{c} is incompatible with {p}")
    m = dict(p.forward)
    m[b] = c
    return pauto(M, _close(M, m, cls))


# --- the extension search --------------------------------------------------

AVOID = "avoid"
FIX = "fix"


@dataclass(frozen=True)
class Goal:
    """Require w(r)(a) to be defined and != a (``avoid``) or == a (``fix``)."""

    word: ReducedWord
    point: int
    kind: str = AVOID

    def met_by(self, value: int) -> bool:
        return (value != self.point) if self.kind == AVOID else (value == self.point)


class _View:
    __slots__ = ("forward", "backward")

    def __init__(self, forward, backward):
        self.forward = forward
        self.backward = backward


class _Search:
    def __init__(self, cls: ClassDescriptor, budget: int, max_nodes: int):
        self.cls = cls
        self.budget = budget
        self.max_nodes = max_nodes
        self.nodes = 0
        self.exhausted_budget = False

    def add(self, M, fwd, g, b, c):
        """Extend generator g by b -> c (plus acl closure); None if invalid."""
        table = fwd[g]
        if b in table or c in set(table.values()):
            return None
        if not all(_pair_ok(M, M, d, b, e, c) for d, e in table.items()):
            return None
        m = dict(table)
        m[b] = c
        try:
            m = _close(M, m, self.cls)
        except ExtensionError:
            return None
        if len(m) > len(table) + 1 and not preserves(M, m):
            return None
        new = list(fwd)
        new[g] = m
        return new

    def solve(self, M, fwd, goals, k, used):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise SearchLimit(f"search exceeded {self.max_nodes} nodes")
        if k == len(goals):
            return M, fwd
        goal = goals[k]
        views = [_View(t, {v: u for u, v in t.items()}) for t in fwd]
        res = partial_evaluate(goal.word, views, goal.point)
        if isinstance(res, Defined):
            if goal.met_by(res.value):
                return self.solve(M, fwd, goals, k + 1, used)
            return None
        i0 = res.index
        z = goal.word.letters[i0 - 1]
        b = trace(goal.word, views, goal.point)[-1]
        g = abs(z) - 1
        def attempt(M1, c):
            # an inverse letter stores the new pair reversed in its generator
            pair = (b, c) if z > 0 else (c, b)
            return self.add(M1, fwd, g, *pair)

        def nxt_undefined(new, c):
            if i0 == 1:
                return True
            y = goal.word.letters[i0 - 2]
            t = new[abs(y) - 1]
            return c not in (t if y > 0 else {v: u for u, v in t.items()})

        preferred, others = [], []
        for c in range(M.size):
            if i0 == 1:
                ok = goal.met_by(c)
                if ok:
                    preferred.append(c)
                continue
            others.append(c)
        if i0 > 1:
            rest = []
            for c in others:
                new = attempt(M, c)
                if new is None:
                    continue
                if c != b and nxt_undefined(new, c):
                    preferred.append((c, new))
                else:
                    rest.append((c, new))
            others = rest
        else:
            preferred = [(c, attempt(M, c)) for c in preferred]
            preferred = [(c, new) for c, new in preferred if new is not None]
            others = []

        for c, new in preferred:
            out = self.solve(M, new, goals, k, used)
            if out is not None:
                return out
        if not (i0 == 1 and goal.kind == FIX):
            out = self._grow(M, fwd, goals, k, used, z, b, g)
            if out is not None:
                return out
        for c, new in others:
            out = self.solve(M, new, goals, k, used)
            if out is not None:
                return out
        return None

    def _grow(self, M, fwd, goals, k, used, z, b, g):
        table = fwd[g] if z > 0 else {v: u for u, v in fwd[g].items()}
        try:
            M1, c = self.cls.realize_image(M, table, b)
        except StructureError:
            return None
        cost = M1.size - M.size
        if used + cost > self.budget:
            self.exhausted_budget = True
            return None
        pair = (b, c) if z > 0 else (c, b)
        new = self.add(M1, fwd, g, *pair)
        if new is None:
            return None
        return self.solve(M1, new, goals, k, used + cost)


def _common_ambient(qs: Sequence[PartialAutomorphism]) -> FinStructure:
    if not qs:
        raise ExtensionError("need at least one map")
    M = qs[0].ambient
    if any(q.ambient != M for q in qs):
        raise ExtensionError("maps live in different ambients")
    return M


def extend_for_goals(
    qs: Sequence[PartialAutomorphism],
    goals: Sequence[Goal],
    cls: ClassDescriptor | None = None,
    growth_budget: int = 0,
    max_nodes: int = 200_000,
) -> tuple[PartialAutomorphism, ...]:
    """Extend ``qs`` (growing the shared ambient if allowed) until every goal holds.

    Undefined steps are filled in the order of the extension induction:
    first points that keep the next letter undefined, then one fresh point
    from the class, then any remaining compatible point, with backtracking.
    """
    M = _common_ambient(qs)
    cls = cls or descriptor(M.tag)
    search = _Search(cls, growth_budget, max_nodes)
    out = search.solve(M, [dict(q.forward) for q in qs], list(goals), 0, 0)
    if out is None:
        raise GrowthBudgetExhausted(
            "no extension within the ambient" + (" and growth budget" if growth_budget else "")
        )
    M1, fwd = out
    return tuple(PartialAutomorphism(M1, tuple(sorted(t.items()))) for t in fwd)


def extend_to_avoid(
    qs: Sequence[PartialAutomorphism],
    a: int,
    w: ReducedWord,
    cls: ClassDescriptor | None = None,
    growth_budget: int = 0,
    max_nodes: int = 200_000,
) -> tuple[PartialAutomorphism, ...]:
    """Extend ``qs`` so that w(r)(a) is defined and differs from ``a``."""
    M = _common_ambient(qs)
    cls = cls or descriptor(M.tag)
    for q in qs:
        if cls.acl(M, q.dom) != q.dom or cls.acl(M, q.rng) != q.rng:
            raise ExtensionError("domains and ranges must be algebraically closed")
    res = partial_evaluate(w, qs, a)
    if not isinstance(res, Undefined):
        raise ExtensionError(f"{w} is already defined at {a}")
    rs = extend_for_goals(qs, [Goal(w, a, AVOID)], cls, growth_budget, max_nodes)
    assert all(extends(r, q.rebase(r.ambient)) for r, q in zip(rs, qs))
    v = partial_evaluate(w, rs, a)
    assert isinstance(v, Defined) and v.value != a
    return rs


# --- orbits ----------------------------------------------------------------

class OrbitFlag(str, Enum):
    CLOSED = "Closed"
    BOUNDARY = "Boundary"


def orbit(qs: Sequence[PartialAutomorphism], a: int, word_bound: int) -> tuple[frozenset[int], OrbitFlag]:
    """Points u(q)(a) over reduced words u with |u| <= word_bound.

    Breadth-first over the maps and their inverses: a walk of length L that
    is defined reduces to a reduced word with the same value, and some
    reduced word of length <= L is undefined iff a point at distance < L
    lies outside the domain of some letter.
    """
    tables = []
    for q in qs:
        tables.append(q.forward)
        tables.append(q.backward)
    seen = {a}
    frontier = deque([(a, 0)])
    boundary = False
    while frontier:
        x, dist = frontier.popleft()
        if dist >= word_bound:
            continue
        for t in tables:
            if x not in t:
                boundary = True
                continue
            y = t[x]
            if y not in seen:
                seen.add(y)
                frontier.append((y, dist + 1))
    return frozenset(seen), OrbitFlag.BOUNDARY if boundary else OrbitFlag.CLOSED


def is_closed_set(qs: Sequence[PartialAutomorphism], S: Iterable[int]) -> bool:
    """Every map and inverse is defined on S and maps S into S."""
    S = set(S)
    for q in qs:
        for t in (q.forward, q.backward):
            if any(x not in t or t[x] not in S for x in S):
                return False
    return True
