"""Free-group words: reduction, evaluation, and conjugation surgery.

A letter is a nonzero int: ``+i`` is the generator s_i and ``-i`` its
inverse. A word z_1 ... z_m acts on a point as z_1(z_2(... z_m(a))), so the
last letter is applied first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import perm as P


class WordError(ValueError):
    pass


class ReducedWord:
    """Immutable by convention; a slotted class is much cheaper to build than
    a frozen dataclass, and exhaustive sweeps build millions of these."""

    __slots__ = ("letters", "n")

    def __init__(self, letters: tuple[int, ...], n: int):
        self.letters = letters
        self.n = n

    def _key(self):
        return (self.letters, self.n)

    def __eq__(self, other):
        return isinstance(other, ReducedWord) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, other: ReducedWord) -> bool:
        return self._key() < other._key()

    def __le__(self, other: ReducedWord) -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: ReducedWord) -> bool:
        return self._key() > other._key()

    def __ge__(self, other: ReducedWord) -> bool:
        return self._key() >= other._key()

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"ReducedWord({format_word(self)!r}, n={self.n})"

    def __iter__(self):
        return iter(self.letters)

    @property
    def first(self) -> int:
        return self.letters[0]

    @property
    def last(self) -> int:
        return self.letters[-1]


def empty_word(n: int) -> ReducedWord:
    return ReducedWord((), n)


def _check(seq: Iterable[int], n: int) -> tuple[int, ...]:
    seq = tuple(seq)
    if seq and (0 in seq or max(seq) > n or min(seq) < -n):
        bad = next(x for x in seq if x == 0 or abs(x) > n)
        raise WordError(f"generator {bad} out of range for F_{n}")
    return seq


def reduce(seq: Iterable[int], n: int) -> ReducedWord:
    """Free reduction with a stack."""
    out: list[int] = []
    push, pop = out.append, out.pop
    for x in _check(seq, n):
        if out and out[-1] == -x:
            pop()
        else:
            push(x)
    return ReducedWord(tuple(out), n)


def word(text_or_letters, n: int) -> ReducedWord:
    if isinstance(text_or_letters, str):
        return parse_word(text_or_letters, n)
    return reduce(text_or_letters, n)


def is_reduced(seq: Sequence[int]) -> bool:
    return all(seq[i] != -seq[i + 1] for i in range(len(seq) - 1))


def concat(*words: ReducedWord) -> ReducedWord:
    n = words[0].n
    letters: list[int] = []
    for w in words:
        if w.n != n:
            raise WordError("arity mismatch")
        letters.extend(w.letters)
    return reduce(letters, n)


def invert(w: ReducedWord) -> ReducedWord:
    return ReducedWord(tuple(-x for x in reversed(w.letters)), w.n)


def gen(i: int, n: int) -> ReducedWord:
    return reduce([i], n)


# --- text syntax ------------------------------------------------------------

def format_word(w: ReducedWord) -> str:
    if not w.letters:
        return "e"
    return " ".join(f"s{x}" if x > 0 else f"s{-x}^-1" for x in w.letters)


def parse_word(text: str, n: int | None = None) -> ReducedWord:
    """Parse ``s1 s2^-1 s1``; ``e`` or an empty string is the identity.

    Without ``n`` the arity is the largest generator index seen (at least 1).
    """
    letters = []
    for tok in text.split():
        if tok in ("e", "1"):
            continue
        base, _, exp = tok.partition("^")
        if not base.startswith("s") or not base[1:].isdigit():
            raise WordError(f"bad letter {tok!r}")
        i = int(base[1:])
        if exp not in ("", "1", "-1", "+1"):
            raise WordError(f"bad exponent in {tok!r}")
        letters.append(-i if exp == "-1" else i)
    if n is None:
        n = max([abs(x) for x in letters] + [1])
    return reduce(letters, n)


# --- evaluation -------------------------------------------------------------

def _letter_perm(x: int, fs: Sequence[P.Perm], invs: dict[int, P.Perm]) -> P.Perm:
    if x > 0:
        return fs[x - 1]
    if x not in invs:
        invs[x] = P.inverse(fs[-x - 1])
    return invs[x]


def evaluate(w: ReducedWord, fs: Sequence[P.Perm], structure=None) -> P.Perm:
    """The permutation w(f_1, ..., f_n); pass ``structure`` to check the f_i are automorphisms."""
    if len(fs) != w.n:
        raise WordError(f"need {w.n} maps, got {len(fs)}")
    if not fs:
        raise WordError("cannot evaluate on an empty tuple")
    deg = len(fs[0])
    for f in fs:
        if len(f) != deg or not P.is_perm(f):
            raise WordError("evaluation needs bijections of one common set")
    if structure is not None:
        from .structures import is_automorphism

        if not all(is_automorphism(structure, f) for f in fs):
            raise WordError("input map is not an automorphism")
    invs: dict[int, P.Perm] = {}
    out = P.identity(deg)
    for x in reversed(w.letters):
        f = fs[x - 1] if x > 0 else invs.get(x) or _letter_perm(x, fs, invs)
        out = tuple(map(f.__getitem__, out))
    return out


def diagonal_conjugate(g: P.Perm, hs: Sequence[P.Perm]) -> tuple[P.Perm, ...]:
    gi = P.inverse(g)
    return tuple(P.compose(g, P.compose(h, gi)) for h in hs)


@dataclass(frozen=True)
class Defined:
    value: int


@dataclass(frozen=True)
class Undefined:
    index: int  # 1-based position i0 of the letter that fails


def partial_evaluate(w: ReducedWord, qs: Sequence, a: int):
    """Apply z_m, ..., z_1 to ``a`` through partial maps.

    Each ``qs[i]`` needs ``forward`` and ``backward`` dicts (a
    PartialAutomorphism, say). Returns ``Defined(value)`` or ``Undefined(i0)``
    with i0 the largest index such that z_{i0} ... z_m(a) is undefined.
    """
    if len(qs) != w.n:
        raise WordError(f"need {w.n} maps, got {len(qs)}")
    amb = getattr(qs[0], "ambient", None) if qs else None
    if amb is not None and not 0 <= a < amb.size:
        raise IndexError(f"point {a} outside the ambient universe")
    x = a
    for i in range(len(w.letters), 0, -1):
        z = w.letters[i - 1]
        q = qs[abs(z) - 1]
        table = q.forward if z > 0 else q.backward
        if x not in table:
            return Undefined(i)
        x = table[x]
    return Defined(x)


def trace(w: ReducedWord, qs: Sequence, a: int) -> list[int]:
    """Points visited: [a, z_m(a), z_{m-1} z_m(a), ...] up to where evaluation stops."""
    out = [a]
    x = a
    for z in reversed(w.letters):
        q = qs[abs(z) - 1]
        table = q.forward if z > 0 else q.backward
        if x not in table:
            break
        x = table[x]
        out.append(x)
    return out


# --- conjugation surgery ----------------------------------------------------

def _candidates(u: ReducedWord, x: ReducedWord):
    ui = invert(u)
    yield x, concat(ui, x)
    t = 1 if abs(u.first) != 1 else 2
    st, sti = gen(t, u.n), gen(-t, u.n)
    for xp in (concat(sti, x, st), concat(st, x, sti)):
        yield xp, concat(ui, xp)


def surgery_pair(u: ReducedWord, x: ReducedWord) -> tuple[ReducedWord, ReducedWord]:
    """(x', w) where w = v u is reduced and equals u^-1 x' u, with x' = x or an s_t-conjugate of x.

    s_t is the smallest generator other than the one u starts with; the
    first candidate v whose last letter does not cancel u's first is used.
    """
    if u.n != x.n:
        raise WordError("arity mismatch")
    if u.n < 2:
        raise WordError("surgery needs at least two generators")
    if not u.letters:
        raise WordError("surgery needs a nonempty u")
    if not x.letters:
        # every conjugate of e is e, so no candidate can end in u
        raise WordError("surgery needs a nontrivial x")
    for xp, v in _candidates(u, x):
        if not v.letters or v.last != -u.first:
            return xp, ReducedWord(v.letters + u.letters, u.n)
    raise AssertionError("no surgery candidate survived")  # pragma: no cover


def surgery(u: ReducedWord, x: ReducedWord) -> ReducedWord:
    """The word half of :func:`surgery_pair`."""
    return surgery_pair(u, x)[1]


def surgery_conjugand(u: ReducedWord, x: ReducedWord) -> ReducedWord:
    """The x' used by :func:`surgery` for this pair."""
    return surgery_pair(u, x)[0]


def build_convergent_words(u_seq: Sequence[ReducedWord], x_seq: Sequence[ReducedWord]) -> list[ReducedWord]:
    """w_k = v_k u_k for each u_k, consuming one x from ``x_seq`` per word.

    An empty u_k imposes no suffix, so w_k is the consumed x itself.
    """
    out = []
    xs = iter(x_seq)
    for u in u_seq:
        try:
            x = next(xs)
        except StopIteration:
            raise WordError(f"x_seq exhausted after {len(out)} words") from None
        if u.n < 2:
            raise WordError("need at least two generators")
        out.append(surgery(u, x) if u.letters else x)
    return out


def ends_with(w: ReducedWord, u: ReducedWord) -> bool:
    return len(u) <= len(w) and w.letters[len(w) - len(u):] == u.letters


# --- enumeration ------------------------------------------------------------

def alphabet(n: int) -> list[int]:
    """Letter order used for shortlex: s1 < s1^-1 < s2 < s2^-1 < ..."""
    return [y for i in range(1, n + 1) for y in (i, -i)]


def enumerate_words(n: int, max_len: int) -> list[ReducedWord]:
    if n < 1:
        raise WordError("need n >= 1")
    letters = alphabet(n)
    out = [ReducedWord((), n)]
    layer = [()]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        out.extend(ReducedWord(w, n) for w in nxt)
        layer = nxt
    return out


def count_reduced(n: int, max_len: int) -> int:
    return 1 + sum(2 * n * (2 * n - 1) ** (k - 1) for k in range(1, max_len + 1))
