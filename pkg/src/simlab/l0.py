"""Exact step-function model of L0(G) over the unit interval with Lebesgue measure.

Points of [0, 1] are never represented: a step function is an ordered list of
(weight, value) pieces laid left to right, so pointwise operations refine two
partitions by interval overlap. Values are group elements of one of three kinds:

* permutations (tuples of ints) of a finite truncation,
* :class:`PLAut`, exact piecewise-linear order automorphisms of the rationals,
* tuples of the above, read as elements of a direct product.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from . import perm as P
from .partial_autos import ExtensionError, PartialAutomorphism, pauto
from .structures import ClassDescriptor, StructureError, Tag, _append_point, _insert_in_order, linear_order
from .trichotomy import diagonal_conjugacy_jep, find_fixing_word
from .words import ReducedWord, Undefined, enumerate_words, partial_evaluate


class L0Error(ValueError):
    pass


# --- piecewise-linear automorphisms of Q -------------------------------------

@dataclass(frozen=True)
class PLAut:
    """Increasing PL bijection of Q: linear between breakpoints, translation outside.

    ``xs`` and ``ys`` are strictly increasing; the map sends xs[i] to ys[i]. The
    canonical form drops breakpoints where the slope does not change.
    """

    xs: tuple[Fraction, ...] = ()
    ys: tuple[Fraction, ...] = ()

    def __post_init__(self):
        xs = tuple(Fraction(x) for x in self.xs)
        ys = tuple(Fraction(y) for y in self.ys)
        if len(xs) != len(ys):
            raise L0Error("breakpoint lists differ in length")
        if any(b <= a for a, b in zip(xs, xs[1:])) or any(b <= a for a, b in zip(ys, ys[1:])):
            raise L0Error("breakpoints must be strictly increasing")
        xs, ys = _canonical_breaks(xs, ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def interpolate(cls, pairs: Iterable[tuple]) -> "PLAut":
        pts = sorted((Fraction(a), Fraction(b)) for a, b in pairs)
        return cls(tuple(a for a, _ in pts), tuple(b for _, b in pts))

    def __call__(self, x) -> Fraction:
        return _pl_eval(self.xs, self.ys, Fraction(x))

    def inverse(self) -> "PLAut":
        return PLAut(self.ys, self.xs)

    def __mul__(self, other: "PLAut") -> "PLAut":
        """self after other."""
        pts = set(other.xs) | {other.inverse()(x) for x in self.xs}
        return PLAut.interpolate((x, self(other(x))) for x in pts)

    def is_identity(self) -> bool:
        return not self.xs

    def __str__(self) -> str:
        if not self.xs:
            return "pl"
        return "pl " + " ".join(f"{x}->{y}" for x, y in zip(self.xs, self.ys))


def _slope(x0, y0, x1, y1) -> Fraction:
    return (y1 - y0) / (x1 - x0)


def _canonical_breaks(xs, ys):
    if not xs:
        return (), ()
    keep = []
    n = len(xs)
    for i in range(n):
        left = Fraction(1) if i == 0 else _slope(xs[i - 1], ys[i - 1], xs[i], ys[i])
        right = Fraction(1) if i == n - 1 else _slope(xs[i], ys[i], xs[i + 1], ys[i + 1])
        if left != right:
            keep.append(i)
    if not keep:
        # a pure translation keeps one anchor so the offset survives
        t = ys[0] - xs[0]
        return ((Fraction(0),), (t,)) if t else ((), ())
    return tuple(xs[i] for i in keep), tuple(ys[i] for i in keep)


def _pl_eval(xs, ys, x: Fraction) -> Fraction:
    if not xs:
        return x
    if x <= xs[0]:
        return ys[0] + (x - xs[0])
    if x >= xs[-1]:
        return ys[-1] + (x - xs[-1])
    lo, hi = 0, len(xs) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    return ys[lo] + (x - xs[lo]) * _slope(xs[lo], ys[lo], xs[hi], ys[hi])


# --- generic group operations ------------------------------------------------

def _is_perm(g) -> bool:
    return isinstance(g, tuple) and (not g or isinstance(g[0], int))


def gmul(g, h):
    """g after h."""
    if isinstance(g, PLAut):
        return g * h
    if _is_perm(g):
        return P.compose(g, h)
    return tuple(gmul(a, b) for a, b in zip(g, h))


def ginv(g):
    if isinstance(g, PLAut):
        return g.inverse()
    if _is_perm(g):
        return P.inverse(g)
    return tuple(ginv(a) for a in g)


def gidentity(g):
    """The identity of the group containing g."""
    if isinstance(g, PLAut):
        return PLAut()
    if _is_perm(g):
        return P.identity(len(g))
    return tuple(gidentity(a) for a in g)


def geval(w: ReducedWord, gs: Sequence):
    out = gidentity(gs[0])
    for z in reversed(w.letters):
        g = gs[abs(z) - 1]
        out = gmul(g if z > 0 else ginv(g), out)
    return out


def gorder(g, limit: int = 10**6) -> int:
    if _is_perm(g):
        return P.order(g)
    if isinstance(g, PLAut):
        return 1 if g.is_identity() else 0
    orders = [gorder(a, limit) for a in g]
    return 0 if 0 in orders else math.lcm(*orders)


# --- ambient metric -----------------------------------------------------------

def rationals() -> Iterator[Fraction]:
    """0, then q, -q over the Calkin-Wilf sequence of positive rationals."""
    yield Fraction(0)
    q = Fraction(1)
    while True:
        yield q
        yield -q
        q = 1 / (2 * math.floor(q) - q + 1)


@dataclass(frozen=True)
class AmbientMetric:
    """d(g, h) = 2^-m, m the least index with g(e_m) != h(e_m) or g^-1(e_m) != h^-1(e_m).

    For permutations of a truncation the enumeration is 0..N-1. For PL maps it
    is ``prefix`` followed by every other rational. Product values use the
    maximum over coordinates.
    """

    prefix: tuple[Fraction, ...] = ()
    max_index: int = 10**6

    def points(self) -> Iterator:
        seen = set()
        for x in self.prefix:
            if x not in seen:
                seen.add(x)
                yield x
        for x in rationals():
            if x not in seen:
                yield x

    def distance(self, g, h) -> Fraction:
        if _is_perm(g):
            if len(g) != len(h):
                raise L0Error("ambient mismatch: permutations of different degrees")
            gi, hi = P.inverse(g), P.inverse(h)
            for m in range(len(g)):
                if g[m] != h[m] or gi[m] != hi[m]:
                    return Fraction(1, 2**m)
            return Fraction(0)
        if isinstance(g, PLAut):
            if not isinstance(h, PLAut):
                raise L0Error("ambient mismatch")
            if g == h:
                return Fraction(0)
            gi, hi = g.inverse(), h.inverse()
            for m, x in enumerate(self.points()):
                if g(x) != h(x) or gi(x) != hi(x):
                    return Fraction(1, 2**m)
                if m >= self.max_index:
                    raise L0Error("enumeration exhausted before the maps separated")
        if len(g) != len(h):
            raise L0Error("ambient mismatch: product arities differ")
        return max((self.distance(a, b) for a, b in zip(g, h)), default=Fraction(0))


DEFAULT_METRIC = AmbientMetric()


# --- step functions -------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """Pieces (weight, value) laid out left to right on [0, 1].

    Adjacent equal values are merged; pieces are not reordered, since the
    order is what pointwise operations see.
    """

    pieces: tuple[tuple[Fraction, object], ...]

    def __post_init__(self):
        merged: list[list] = []
        total = Fraction(0)
        for w, v in self.pieces:
            w = Fraction(w)
            if w < 0:
                raise L0Error("piece weights must be positive")
            total += w
            if w == 0:
                continue
            if merged and merged[-1][1] == v:
                merged[-1][0] += w
            else:
                merged.append([w, v])
        if total != 1:
            raise L0Error(f"piece weights sum to {total}, not 1")
        object.__setattr__(self, "pieces", tuple((w, v) for w, v in merged))

    @classmethod
    def constant(cls, value) -> "StepFunction":
        return cls(((Fraction(1), value),))

    @classmethod
    def equal_weights(cls, values: Sequence) -> "StepFunction":
        k = len(values)
        return cls(tuple((Fraction(1, k), v) for v in values))

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(w for w, _ in self.pieces)

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self.pieces)

    def map(self, fn: Callable) -> "StepFunction":
        return StepFunction(tuple((w, fn(v)) for w, v in self.pieces))

    def __len__(self) -> int:
        return len(self.pieces)


def refine(*fs: StepFunction) -> tuple[tuple[Fraction, ...], tuple[tuple, ...]]:
    """Coarsest common refinement: (weights, one aligned value list per input)."""
    if not fs:
        raise ValueError("need at least one step function")
    cuts = sorted({c for f in fs for c in _cumulative(f.weights)})
    weights = tuple(b - a for a, b in zip([Fraction(0)] + cuts, cuts))
    aligned = []
    for f in fs:
        ends = _cumulative(f.weights)
        vals, i = [], 0
        for c in cuts:
            while ends[i] < c:
                i += 1
            vals.append(f.pieces[i][1])
        aligned.append(tuple(vals))
    return weights, tuple(aligned)


def _cumulative(ws) -> list[Fraction]:
    out, s = [], Fraction(0)
    for w in ws:
        s += w
        out.append(s)
    return out


def _distances(f: StepFunction, g: StepFunction, metric: AmbientMetric):
    weights, (fv, gv) = refine(f, g)
    return [(w, metric.distance(a, b)) for w, a, b in zip(weights, fv, gv)]


def rho(f: StepFunction, g: StepFunction, metric: AmbientMetric = DEFAULT_METRIC) -> Fraction:
    """inf{eps > 0 : mu(d(f, g) > eps) < eps}, exactly.

    mu(d > eps) is constant on each gap [delta_i, delta_{i+1}) between the
    distinct distance values, so the first gap that admits a valid eps gives
    the infimum max(delta_i, mu(d > delta_i)).
    """
    dw = _distances(f, g, metric)
    deltas = sorted({Fraction(0)} | {d for _, d in dw})
    for i, delta in enumerate(deltas):
        tail = sum((w for w, d in dw if d > delta), Fraction(0))
        cand = max(delta, tail)
        nxt = deltas[i + 1] if i + 1 < len(deltas) else None
        if nxt is None or cand < nxt:
            return cand
    raise AssertionError("unreachable")  # pragma: no cover


def tail_measure(f: StepFunction, g: StepFunction, eps, metric: AmbientMetric = DEFAULT_METRIC) -> Fraction:
    """mu(d(f, g) > eps)."""
    return sum((w for w, d in _distances(f, g, metric) if d > eps), Fraction(0))


def in_neighborhood(g: StepFunction, h: StepFunction, delta, eps, metric: AmbientMetric = DEFAULT_METRIC) -> bool:
    """g in [h, delta, eps], i.e. mu(d(g, h) < delta) > 1 - eps."""
    if delta <= 0 or eps <= 0:
        raise L0Error("delta and eps must be positive")
    near = sum((w for w, d in _distances(g, h, metric) if d < delta), Fraction(0))
    return near > 1 - Fraction(eps)


MULTIPLY = "multiply"
INVERT_FIRST = "invert-first"


def pointwise_op(f: StepFunction, g: StepFunction, op: str = MULTIPLY) -> StepFunction:
    """f(x) g(x), or f(x)^-1 g(x) for ``invert-first``."""
    weights, (fv, gv) = refine(f, g)
    if op == MULTIPLY:
        vals = [gmul(a, b) for a, b in zip(fv, gv)]
    elif op == INVERT_FIRST:
        vals = [gmul(ginv(a), b) for a, b in zip(fv, gv)]
    else:
        raise L0Error(f"unknown operation {op!r}")
    return StepFunction(tuple(zip(weights, vals)))


def inverse(f: StepFunction) -> StepFunction:
    return f.map(ginv)


def identity_like(f: StepFunction) -> StepFunction:
    return StepFunction.constant(gidentity(f.pieces[0][1]))


def evaluate_word(w: ReducedWord, fs: Sequence[StepFunction]) -> StepFunction:
    """w(f_1, ..., f_n) computed piece by piece."""
    if len(fs) != w.n:
        raise L0Error(f"need {w.n} step functions, got {len(fs)}")
    weights, vals = refine(*fs)
    return StepFunction(tuple((wt, geval(w, [v[i] for v in vals])) for i, wt in enumerate(weights)))


def product_identify(fs: Sequence[StepFunction]) -> StepFunction:
    weights, vals = refine(*fs)
    return StepFunction(tuple((wt, tuple(v[i] for v in vals)) for i, wt in enumerate(weights)))


def product_split(F: StepFunction) -> tuple[StepFunction, ...]:
    n = len(F.pieces[0][1])
    return tuple(F.map(lambda v, j=j: v[j]) for j in range(n))


# --- orbits, perturbation, closure ---------------------------------------------

def orbit_member(g: StepFunction, f: StepFunction, group: Sequence) -> StepFunction | None:
    """A step conjugator phi with phi f phi^-1 = g, or None.

    On each refined piece the first element of ``group`` conjugating f's value
    to g's value is used.
    """
    weights, (gv, fv) = refine(g, f)
    out = []
    for wt, a, b in zip(weights, gv, fv):
        phi = next((p for p in group if gmul(gmul(p, b), ginv(p)) == a), None)
        if phi is None:
            return None
        out.append((wt, phi))
    return StepFunction(tuple(out))


def perturb_off_closed(f: StepFunction, B, p, eps, weight=None) -> StepFunction:
    """g equal to f except on a right tail of weight a (default eps/2) where g = p."""
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise L0Error("need 0 < eps < 1")
    if p in B:
        raise L0Error("p must lie outside B")
    if any(v not in B for v in f.values):
        raise L0Error("f must take values in B")
    a = eps / 2 if weight is None else Fraction(weight)
    if not 0 < a < eps:
        raise L0Error("perturbation weight must lie strictly between 0 and eps")
    keep = 1 - a
    out, acc = [], Fraction(0)
    for w, v in f.pieces:
        take = min(w, keep - acc)
        if take > 0:
            out.append((take, v))
            acc += take
    out.append((a, p))
    return StepFunction(tuple(out))


def l0_precompact_closure(f: StepFunction, bound: int) -> frozenset[StepFunction] | None:
    """The closure of {f} under pointwise product and inverse, or None past ``bound``."""
    e = identity_like(f)
    gens = [f, inverse(f)]
    seen = {e, f}
    frontier = [e, f]
    while frontier:
        if len(seen) > bound:
            return None
        nxt = []
        for x in frontier:
            for s in gens:
                y = pointwise_op(s, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen) if len(seen) <= bound else None


# --- word selection and non-discreteness ------------------------------------------

def common_undefined_word(
    q_pieces: StepFunction, a: int, threshold, scan_bound: int
) -> tuple[ReducedWord, tuple[int, ...]]:
    """A single word undefined at ``a`` on pieces of total weight > threshold.

    Piece values are tuples of partial automorphisms; words are scanned in
    shortlex order.
    """
    threshold = Fraction(threshold)
    n = len(q_pieces.pieces[0][1])
    for u in enumerate_words(n, scan_bound):
        hit = tuple(
            i for i, (_, qs) in enumerate(q_pieces.pieces) if isinstance(partial_evaluate(u, qs, a), Undefined)
        )
        if sum((q_pieces.pieces[i][0] for i in hit), Fraction(0)) > threshold:
            return u, hit
    raise L0Error(f"no word of length <= {scan_bound} is undefined on weight > {threshold}")


@dataclass(frozen=True)
class L0Witness:
    fs: tuple[StepFunction, ...]
    word: ReducedWord
    metric: AmbientMetric
    rho: Fraction


def _pad(A, ps, K):
    for _ in range(K - A.size):
        A = _append_point(A, _insert_in_order(A, A.size))
    return A, tuple(PartialAutomorphism(A, p.pairs) for p in ps)


def l0_nondiscrete_from_jep(
    cls: ClassDescriptor,
    systems: Sequence[tuple],
    eps,
    truncation_budget: int = 8,
    word_bound: int = 6,
) -> L0Witness:
    """Step functions f_1..f_n with equal-weight pieces and a word w, 0 < rho(w(f), e) < eps.

    Each system is padded to K points with 2^-K < eps and the systems are
    stacked. A word fixing every stacked point but moving some other point is
    found by extension (``truncation_budget`` fresh points). Piece i carries the
    joint maps, interpolated to PL automorphisms of Q and conjugated so that
    system i sits on 0..K-1; the metric enumerates 0..K-1 first.
    """
    if cls.tag != Tag.LINEAR_ORDER:
        raise StructureError(f"L0 witnesses are only built over linear orders, not {cls.tag.value}")
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise L0Error("need 0 < eps <= 1")
    K = max([A.size for A, _ in systems] + [1])
    while Fraction(1, 2**K) >= eps:
        K += 1
    padded = [_pad(A, ps, K) for A, ps in systems]
    jw = diagonal_conjugacy_jep(cls, padded)
    fixed = list(range(jw.A.size))
    try:
        rs, w, _ = find_fixing_word(jw.maps, fixed, cls, word_bound, truncation_budget)
    except ExtensionError as exc:
        raise L0Error("no non-discreteness witness within bounds") from exc
    M = rs[0].ambient
    pos = M.rank  # chain coordinates of the extended truncation
    qs = [PLAut.interpolate((pos[a], pos[b]) for a, b in r.pairs) for r in rs]
    pieces = []
    for off in range(0, jw.A.size, K):
        block = sorted(pos[x] for x in range(off, off + K))
        phi = PLAut.interpolate(enumerate(block))
        phi_i = phi.inverse()
        pieces.append(tuple(phi_i * q * phi for q in qs))
    fs = tuple(StepFunction.equal_weights([v[j] for v in pieces]) for j in range(len(qs)))
    metric = AmbientMetric(tuple(Fraction(i) for i in range(K)))
    wf = evaluate_word(w, fs)
    r = rho(wf, identity_like(wf), metric)
    if not 0 < r < eps:
        raise L0Error(f"witness failed verification: rho = {r}")
    return L0Witness(fs, w, metric, r)


def project_nondiscreteness(
    fs: Sequence[StepFunction], words: Sequence[ReducedWord], cutoff, metric: AmbientMetric = DEFAULT_METRIC
) -> int:
    """Index of the first refined piece where every word lies within d <= cutoff of e."""
    cutoff = Fraction(cutoff)
    weights, vals = refine(*fs)
    for i in range(len(weights)):
        point = [v[i] for v in vals]
        e = gidentity(point[0])
        if all(metric.distance(geval(w, point), e) <= cutoff for w in words):
            return i
    raise L0Error("no piece keeps every word within the cutoff")


def random_order_systems(k: int, n: int, seed: int, max_size: int = 3) -> list[tuple]:
    """k seeded systems (A_i, p_i) on small chains, each map one or two order-preserving pairs."""
    rng = random.Random(f"order-systems:{k}:{n}:{seed}")
    out = []
    for _ in range(k):
        m = rng.randint(2, max_size)
        A = linear_order(m)
        ps = []
        for _ in range(n):
            a, b = rng.randrange(m), rng.randrange(m)
            pairs = {a: b}
            if a + 1 < m and b + 1 < m and rng.random() < 0.5:
                pairs[a + 1] = b + 1
            ps.append(pauto(A, pairs))
        out.append((A, tuple(ps)))
    return out
