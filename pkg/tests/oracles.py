"""Brute-force oracles, written independently of the library's search code."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product


def reduce_by_passes(seq):
    """Repeated single left-to-right cancellation passes until nothing changes."""
    seq = list(seq)
    while True:
        out, i, changed = [], 0, False
        while i < len(seq):
            if i + 1 < len(seq) and seq[i] == -seq[i + 1]:
                i += 2
                changed = True
            else:
                out.append(seq[i])
                i += 1
        seq = out
        if not changed:
            return tuple(seq)


def apply_word(letters, fs, x):
    """Last letter first, using plain index arithmetic on image lists."""
    for z in reversed(letters):
        f = fs[abs(z) - 1]
        x = f[x] if z > 0 else f.index(x)
    return x


def monotone_partial_injections(n):
    """Every order-preserving partial injection of 0 < 1 < ... < n-1, as dicts."""
    out = []
    for k in range(n + 1):
        for dom in combinations(range(n), k):
            for rng in combinations(range(n), k):
                out.append(dict(zip(dom, rng)))
    return out


def eval_partial(letters, maps, a):
    x = a
    for z in reversed(letters):
        m = maps[abs(z) - 1]
        if z > 0:
            if x not in m:
                return None
            x = m[x]
        else:
            inv = {v: k for k, v in m.items()}
            if x not in inv:
                return None
            x = inv[x]
    return x


def graph_automorphisms(n, edges):
    E = {frozenset(e) for e in edges}
    return [p for p in permutations(range(n)) if {frozenset((p[a], p[b])) for a, b in map(tuple, E)} == E]


def subgroup_order(gens):
    """Closure under composition of tuples of permutations (direct products allowed)."""
    def mul(g, h):
        if isinstance(g[0], int):
            return tuple(g[i] for i in h)
        return tuple(mul(a, b) for a, b in zip(g, h))

    def ident(g):
        if isinstance(g[0], int):
            return tuple(range(len(g)))
        return tuple(ident(a) for a in g)

    e = ident(gens[0])
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def rho_grid(dw, steps=4096):
    """Numeric estimate of inf{eps : mu(d > eps) < eps} on a uniform grid of [0, 1]."""
    best = 1.0
    for i in range(steps, 0, -1):
        eps = i / steps
        tail = sum(float(w) for w, d in dw if d > eps)
        if tail < eps:
            best = eps
        else:
            break
    return best


def graph_extension_property(n, adj, richness):
    """Every pair (or smaller set) of vertices has all one-point types witnessed."""
    for k in range(richness + 1):
        for S in combinations(range(n), k):
            for pattern in product((False, True), repeat=k):
                if not any(
                    x not in S and all((x in adj[s]) == want for s, want in zip(S, pattern)) for x in range(n)
                ):
                    return False
    return True


def frac_grid(denoms=16):
    return sorted({Fraction(p, q) for q in range(1, denoms + 1) for p in range(0, q + 1)})


def cancel_passes_blob(blob, pairs):
    """Repeated cancellation passes over a byte blob of many words.

    Words are separated by a byte that never occurs in ``pairs``, so one
    ``replace`` pass cancels inside every word at once. Free reduction is
    confluent, so the fixpoint is the reduced form of each word.
    """
    while True:
        new = blob
        for p in pairs:
            new = new.replace(p, b"")
        if new == blob:
            return blob
        blob = new


def pl_apply(xs, ys, x):
    """Piecewise-linear map through breakpoints xs -> ys, slope 1 outside them."""
    if not xs:
        return x
    if x <= xs[0]:
        return ys[0] + (x - xs[0])
    if x >= xs[-1]:
        return ys[-1] + (x - xs[-1])
    for (x0, y0), (x1, y1) in zip(zip(xs, ys), zip(xs[1:], ys[1:])):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    raise AssertionError("unreachable")


def pl_word(letters, maps, x):
    """Apply a word (last letter first) to x; maps are (xs, ys) breakpoint lists."""
    for z in reversed(letters):
        xs, ys = maps[abs(z) - 1]
        x = pl_apply(xs, ys, x) if z > 0 else pl_apply(ys, xs, x)
    return x
