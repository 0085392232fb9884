"""Permutations of {0, ..., n-1} stored as image tuples."""

from __future__ import annotations

import re
from itertools import permutations
from math import lcm
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    """p after q: x -> p[q[x]]."""
    return tuple(map(p.__getitem__, q))


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def is_perm(p: Sequence[int]) -> bool:
    return sorted(p) == list(range(len(p)))


def order(p: Perm) -> int:
    return lcm(*cycle_type(p)) if p else 1


def cycles(p: Perm) -> list[tuple[int, ...]]:
    seen = set()
    out = []
    for start in range(len(p)):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        x = p[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = p[x]
        out.append(tuple(cyc))
    return out


def cycle_type(p: Perm) -> tuple[int, ...]:
    return tuple(sorted(len(c) for c in cycles(p)))


def power(p: Perm, k: int) -> Perm:
    if k < 0:
        p, k = inverse(p), -k
    out = identity(len(p))
    for _ in range(k):
        out = compose(p, out)
    return out


def format_cycles(p: Perm) -> str:
    parts = [c for c in cycles(p) if len(c) > 1]
    if not parts:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in parts)


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, n: int | None = None) -> Perm:
    """Parse cycle notation ``(0 1)(2 3)`` (needs ``n``) or an image list ``1 0 2``."""
    text = text.strip()
    if text.startswith("("):
        if n is None:
            raise ValueError("cycle notation needs a known degree")
        if _CYCLE.sub("", text).strip():
            raise ValueError(f"malformed cycle notation: {text!r}")
        img = list(range(n))
        used: set[int] = set()
        for body in _CYCLE.findall(text):
            pts = [int(t) for t in body.replace(",", " ").split()]
            if any(not 0 <= x < n for x in pts) or used.intersection(pts) or len(set(pts)) != len(pts):
                raise ValueError(f"bad cycle ({body}) for degree {n}")
            used.update(pts)
            for a, b in zip(pts, pts[1:] + pts[:1]):
                img[a] = b
        return tuple(img)
    img = tuple(int(t) for t in text.strip("[]").replace(",", " ").split())
    if not is_perm(img):
        raise ValueError(f"not a permutation: {text!r}")
    if n is not None and len(img) != n:
        raise ValueError(f"expected degree {n}, got {len(img)}")
    return img


def generated_subgroup(gens: Iterable[Perm], n: int) -> set[Perm]:
    """Closure of ``gens`` under composition, by breadth-first search."""
    gens = list(gens)
    group = {identity(n)}
    frontier = [identity(n)]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = compose(s, g)
                if h not in group:
                    group.add(h)
                    nxt.append(h)
        frontier = nxt
    return group


def all_perms(n: int) -> list[Perm]:
    return list(permutations(range(n)))
