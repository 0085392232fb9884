"""Line-oriented text formats for structures (with partial automorphisms) and step functions.

Structure files::

    class LinearOrder
    size 3
    rel < 0 1
    rel < 1 2
    pauto p 0->1

Metric classes add ``dist i j p/q`` lines. Step-function files::

    step
    size 3
    piece 1/2 (0 1)
    piece 1/2 1 2 0

Product values separate coordinates with ``;``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import perm as P
from .partial_autos import PartialAutomorphism, pauto
from .structures import REL_NAME, SYMMETRIC, FinStructure, Tag, is_valid


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        # line 0 marks a whole-file problem
        super().__init__(f"line {lineno}: {msg}" if lineno else msg)
        self.lineno = lineno


@dataclass(frozen=True)
class StructureFile:
    structure: FinStructure
    pautos: tuple[tuple[str, PartialAutomorphism], ...]

    @property
    def maps(self) -> tuple[PartialAutomorphism, ...]:
        return tuple(p for _, p in self.pautos)


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, f"expected an integer, got {tok!r}") from None


def _frac(tok: str, lineno: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"expected a rational p/q, got {tok!r}") from None


def parse_structure(text: str) -> StructureFile:
    tag = size = None
    rel: set[tuple[int, int]] = set()
    dist: dict[tuple[int, int], Fraction] = {}
    raw_pautos: list[tuple[int, str, list[tuple[int, int]]]] = []
    for lineno, toks in _lines(text):
        key = toks[0]
        if key == "class":
            if len(toks) != 2:
                raise ParseError(lineno, "usage: class <tag>")
            try:
                tag = Tag(toks[1])
            except ValueError:
                raise ParseError(lineno, f"unknown class {toks[1]!r}") from None
        elif key == "size":
            if len(toks) != 2:
                raise ParseError(lineno, "usage: size <n>")
            size = _int(toks[1], lineno)
            if size < 0:
                raise ParseError(lineno, "size must be non-negative")
        elif key == "rel":
            if tag is None or size is None:
                raise ParseError(lineno, "rel before class/size")
            if len(toks) != 4 or toks[1] != REL_NAME[tag]:
                raise ParseError(lineno, f"usage: rel {REL_NAME[tag]} <i> <j>")
            i, j = _int(toks[2], lineno), _int(toks[3], lineno)
            if not (0 <= i < size and 0 <= j < size) or i == j:
                raise ParseError(lineno, f"bad pair ({i}, {j})")
            rel.add((i, j))
            if tag in SYMMETRIC:
                rel.add((j, i))
        elif key == "dist":
            if tag != Tag.ORDERED_METRIC or size is None:
                raise ParseError(lineno, "dist lines need class OrderedRationalMetric and a size")
            if len(toks) != 4:
                raise ParseError(lineno, "usage: dist <i> <j> <p>/<q>")
            i, j = _int(toks[1], lineno), _int(toks[2], lineno)
            if not (0 <= i < size and 0 <= j < size) or i == j:
                raise ParseError(lineno, f"bad pair ({i}, {j})")
            d = _frac(toks[3], lineno)
            dist[(i, j)] = dist[(j, i)] = d
        elif key == "pauto":
            if len(toks) < 2:
                raise ParseError(lineno, "usage: pauto <name> <i>-><j> ...")
            pairs = []
            for tok in toks[2:]:
                a, sep, b = tok.partition("->")
                if not sep:
                    raise ParseError(lineno, f"expected i->j, got {tok!r}")
                pairs.append((_int(a, lineno), _int(b, lineno)))
            raw_pautos.append((lineno, toks[1], pairs))
        else:
            raise ParseError(lineno, f"unknown directive {key!r}")
    if tag is None or size is None:
        raise ParseError(0, "missing class or size line")
    dmat = None
    if tag == Tag.ORDERED_METRIC:
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                if i == j:
                    row.append(Fraction(0))
                elif (i, j) in dist:
                    row.append(dist[(i, j)])
                else:
                    raise ParseError(0, f"missing dist {i} {j}")
            rows.append(tuple(row))
        dmat = tuple(rows)
    S = FinStructure(tag, size, frozenset(rel), dmat)
    if not is_valid(S):
        raise ParseError(0, "structure violates the class axioms")
    pautos = []
    for lineno, name, pairs in raw_pautos:
        if len(dict(pairs)) != len(pairs):
            raise ParseError(lineno, f"pauto {name}: repeated domain point")
        if any(not (0 <= a < size and 0 <= b < size) for a, b in pairs):
            raise ParseError(lineno, f"pauto {name}: point outside 0..{size - 1}")
        try:
            pautos.append((name, pauto(S, dict(pairs))))
        except ValueError as exc:
            raise ParseError(lineno, f"pauto {name}: {exc}") from None
    return StructureFile(S, tuple(pautos))


def format_structure(S: FinStructure, pautos=()) -> str:
    lines = [f"class {S.tag.value}", f"size {S.size}"]
    name = REL_NAME[S.tag]
    for i, j in sorted(S.rel):
        if S.tag in SYMMETRIC and i > j:
            continue
        lines.append(f"rel {name} {i} {j}")
    if S.dist is not None:
        for i in range(S.size):
            for j in range(i + 1, S.size):
                lines.append(f"dist {i} {j} {S.dist[i][j]}")
    for pname, p in pautos:
        lines.append(" ".join(["pauto", pname] + [f"{a}->{b}" for a, b in p.pairs]))
    return "\n".join(lines) + "\n"


def read_structure(path) -> StructureFile:
    return parse_structure(Path(path).read_text(encoding="utf-8"))


# --- step functions -------------------------------------------------------------

def parse_step(text: str):
    from .l0 import L0Error, StepFunction

    pieces = []
    size = None
    seen_header = False
    for lineno, toks in _lines(text):
        if not seen_header:
            if toks != ["step"]:
                raise ParseError(lineno, "expected 'step' header")
            seen_header = True
            continue
        if toks[0] == "size":
            if len(toks) != 2:
                raise ParseError(lineno, "usage: size <n>")
            size = _int(toks[1], lineno)
        elif toks[0] == "piece":
            if len(toks) < 3:
                raise ParseError(lineno, "usage: piece <p>/<q> <permutation>")
            w = _frac(toks[1], lineno)
            if w <= 0:
                raise ParseError(lineno, "weights must be positive")
            body = " ".join(toks[2:])
            parts = body.split(";")
            try:
                vals = tuple(P.parse_perm(part, size) for part in parts)
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
            value = vals[0] if len(vals) == 1 else vals
            pieces.append((w, value))
        else:
            raise ParseError(lineno, f"unknown directive {toks[0]!r}")
    if not seen_header:
        raise ParseError(0, "empty step file")
    if not pieces:
        raise ParseError(0, "no pieces")
    try:
        return StepFunction(tuple(pieces))
    except L0Error as exc:
        raise ParseError(0, str(exc)) from None


def format_value(v) -> str:
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return " ; ".join(format_value(x) for x in v)
    if isinstance(v, tuple):
        return " ".join(map(str, v))
    return str(v)


def format_step(f) -> str:
    lines = ["step"]
    for w, v in f.pieces:
        lines.append(f"piece {w} {format_value(v)}")
    return "\n".join(lines) + "\n"


def read_step(path):
    return parse_step(Path(path).read_text(encoding="utf-8"))
