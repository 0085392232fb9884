"""``simlab``: seeded experiment front end with TSV reports.

Every report starts with a ``#`` header line echoing the configuration,
then a column row and data rows. Exit status is 0 on success, 1 on a domain
error and 2 on a parse error. ``SIMLAB_THREADS`` caps worker threads and
never changes the output.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .hrushovski import EppaFailure, eppa_check, hrushovski_chain
from .l0 import (
    L0Error,
    l0_nondiscrete_from_jep,
    l0_precompact_closure,
    orbit_member,
    project_nondiscreteness,
    random_order_systems,
    rho,
)
from .partial_autos import ExtensionError
from .structures import StructureError, Tag, automorphisms, descriptor, graph
from .textio import ParseError, format_structure, format_value, read_step, read_structure
from .trichotomy import (
    TruncationExhausted,
    classify,
    diagonal_conjugacy_jep,
    nondiscrete_witness_pairs_Q,
)
from .words import WordError, format_word, parse_word, surgery_pair


@dataclass
class ExperimentConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    seed: int = 0
    params: dict = field(default_factory=dict)

    def header(self) -> str:
        items = [f"subcommand={self.subcommand}", f"seed={self.seed}"]
        items += [f"input={p}" for p in self.inputs]
        items += [f"{k}={v}" for k, v in sorted(self.params.items())]
        return "# simlab\t" + "\t".join(items)


class DomainError(Exception):
    pass


def workers() -> int:
    try:
        return max(1, int(os.environ.get("SIMLAB_THREADS", "1")))
    except ValueError:
        return 1


def _row(*cells) -> str:
    return "\t".join(str(c) for c in cells)


def _perm_text(f) -> str:
    return " ".join(map(str, f))


def _index_set(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(t) for t in text.split(",")) if text else ()


def _targets(text: str | None):
    if text is None:
        return None
    return [_index_set(part) for part in text.split(";") if part.strip()]


# --- subcommands ----------------------------------------------------------------

def cmd_reduce(args, cfg):
    w = parse_word(args.word, args.n)
    return [_row("input", "reduced", "length"), _row(args.word, format_word(w), len(w))]


def cmd_surgery(args, cfg):
    n = args.n or max(parse_word(args.u).n, parse_word(args.x).n, 2)
    u, x = parse_word(args.u, n), parse_word(args.x, n)
    try:
        xp, w = surgery_pair(u, x)
    except WordError as exc:
        raise DomainError(str(exc)) from None
    return [_row("u", "x", "conjugand", "w"), _row(format_word(u), format_word(x), format_word(xp), format_word(w))]


def cmd_eppa(args, cfg):
    sf = read_structure(args.input)
    w = eppa_check(sf.structure, sf.maps, args.max_size, workers=workers())
    if w is None:
        return [_row("result"), _row("none")]
    autos = " | ".join(_perm_text(f) for f in w.autos)
    return [_row("result", "B_size", "autos"), _row("found", w.B.size, autos)]


def cmd_chain(args, cfg):
    sf = read_structure(args.input)
    cls = descriptor(sf.structure.tag)
    try:
        chain, perms = hrushovski_chain(cls, sf.maps, args.depth, args.max_size, args.grow, args.seed, workers())
    except EppaFailure as exc:
        raise DomainError(f"EPPA failed at stage {exc.stage}") from None
    out = [_row("stage", "size", "relations")]
    for s, A in enumerate(chain, 1):
        out.append(_row(s, A.size, len(A.rel)))
    out.append(_row("autos", "", " | ".join(_perm_text(f) for f in perms)))
    return out


def cmd_classify(args, cfg):
    sf = read_structure(args.input)
    if not sf.maps:
        raise DomainError("input declares no pauto lines")
    base = _index_set(args.base) if args.base is not None else tuple(range(sf.structure.size))
    v = classify(descriptor(sf.structure.tag), sf.maps, base, args.word_bound, _targets(args.targets), args.max_words)
    out = [_row("verdict", "size", "word_bound", "payload")]
    if v.witnesses:
        for wit in v.witnesses:
            payload = f"word={format_word(wit.word)};fixed={','.join(map(str, wit.fixed))};moved={wit.moved}"
            out.append(_row(v.tag.value, v.size, v.word_bound, payload))
    elif v.separating_set or v.tag.value == "DiscreteEvidence":
        out.append(_row(v.tag.value, v.size, v.word_bound, "set=" + ",".join(map(str, v.separating_set))))
    elif v.orbit_sizes:
        out.append(_row(v.tag.value, v.size, v.word_bound, "orbits=" + ",".join(map(str, v.orbit_sizes))))
    else:
        out.append(_row(v.tag.value, v.size, v.word_bound, f"words_scanned={v.words_scanned}"))
    return out


def cmd_witness_q(args, cfg):
    try:
        q = nondiscrete_witness_pairs_Q(args.size, args.depth, args.seed, args.word_bound)
    except TruncationExhausted as exc:
        raise DomainError(str(exc)) from None
    out = [_row("kind", "word", "fixed", "moved")]
    for name, m in zip(("f", "g"), q.maps):
        out.append(_row("map", name, " ".join(f"{a}->{b}" for a, b in m.pairs), ""))
    for wit in q.witnesses:
        out.append(_row("witness", format_word(wit.word), ",".join(map(str, wit.fixed)), wit.moved))
    return out


def cmd_jep(args, cfg):
    files = [read_structure(p) for p in args.inputs]
    tag = files[0].structure.tag
    if any(f.structure.tag != tag for f in files):
        raise DomainError("systems must share one class")
    jw = diagonal_conjugacy_jep(descriptor(tag), [(f.structure, f.maps) for f in files])
    names = [name for name, _ in files[0].pautos]
    out = [_row("system", "embedding")]
    for i, e in enumerate(jw.embeddings):
        out.append(_row(i, " ".join(map(str, e.map))))
    out.append(_row("structure", format_structure(jw.A, list(zip(names, jw.maps))).strip().replace("\n", " | ")))
    return out


def cmd_l0_rho(args, cfg):
    f, g = read_step(args.a), read_step(args.b)
    return [_row("rho"), _row(rho(f, g))]


def cmd_l0_orbit(args, cfg):
    g, f = read_step(args.g), read_step(args.f)
    deg = len(f.pieces[0][1])
    if args.structure:
        S = read_structure(args.structure).structure
        if S.size != deg:
            raise DomainError("structure size differs from the permutation degree")
    else:
        S = graph(deg)
    phi = orbit_member(g, f, automorphisms(S))
    if phi is None:
        return [_row("result"), _row("none")]
    return [_row("result", "weight", "conjugator")] + [_row("piece", w, format_value(v)) for w, v in phi.pieces]


def cmd_l0_nondiscrete(args, cfg):
    systems = random_order_systems(args.systems, args.n, args.seed)
    eps = args.eps
    W = l0_nondiscrete_from_jep(descriptor(Tag.LINEAR_ORDER), systems, eps, args.budget, args.word_bound)
    piece = project_nondiscreteness(W.fs, [W.word], eps, W.metric)
    out = [_row("word", "rho", "pieces", "projected_piece"), _row(format_word(W.word), W.rho, len(W.fs[0]), piece)]
    for j, f in enumerate(W.fs, 1):
        for w, v in f.pieces:
            out.append(_row(f"f{j}", w, str(v), ""))
    return out


def cmd_l0_closure(args, cfg):
    f = read_step(args.input)
    S = l0_precompact_closure(f, args.bound)
    if S is None:
        return [_row("result", "bound"), _row("overflow", args.bound)]
    return [_row("result", "size"), _row("closed", len(S))]


# --- parser -----------------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simlab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_, parent=sub):
        sp = parent.add_parser(name, help=help_, description=help_)
        sp.add_argument("--seed", type=int, default=0, help="seed echoed in the header (default 0)")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("reduce", cmd_reduce, "Free reduction of a word in the free group.")
    sp.add_argument("word")
    sp.add_argument("--n", type=_positive, default=None, help="rank of the free group")

    sp = add("surgery", cmd_surgery, "Conjugation surgery: a reduced word v u equal to u^-1 x' u.")
    sp.add_argument("--u", required=True)
    sp.add_argument("--x", required=True)
    sp.add_argument("--n", type=_positive, default=None)

    sp = add("eppa", cmd_eppa, "Hrushovski property: smallest B where the partial automorphisms extend.")
    sp.add_argument("--input", required=True)
    sp.add_argument("--max-size", type=_positive, default=12)

    sp = add("chain", cmd_chain, "Chain of finite structures on which the maps become total (precompact chains).")
    sp.add_argument("--input", required=True)
    sp.add_argument("--depth", type=_positive, default=2)
    sp.add_argument("--max-size", type=_positive, default=12)
    sp.add_argument("--grow", type=_nonneg, default=0, help="fresh points per stage")

    sp = add("classify", cmd_classify, "Trichotomy evidence: precompact, discrete, or non-discrete at this scale.")
    sp.add_argument("--input", required=True)
    sp.add_argument("--word-bound", type=_positive, default=6)
    sp.add_argument("--base", default=None, help="comma-separated base points (default: all)")
    sp.add_argument("--targets", default=None, help="fix targets, e.g. '0;0,1;0,1,2'")
    sp.add_argument("--max-words", type=_positive, default=None)

    sp = add("witness-q", cmd_witness_q, "Pairs of order automorphisms generating a non-discrete group, with fixing words.")
    sp.add_argument("--size", type=_positive, default=40)
    sp.add_argument("--depth", type=_nonneg, default=3)
    sp.add_argument("--word-bound", type=_positive, default=6)

    sp = add("jep", cmd_jep, "Joint embedding of structures carrying partial automorphisms, for diagonal conjugacy.")
    sp.add_argument("inputs", nargs="+")

    l0p = sub.add_parser("l0", help="Step-function model of L0(G).", description="Step-function model of L0(G).")
    l0s = l0p.add_subparsers(dest="l0cmd", required=True)
    sp = add("rho", cmd_l0_rho, "Convergence-in-measure distance between two step functions.", l0s)
    sp.add_argument("a")
    sp.add_argument("b")
    sp = add("orbit", cmd_l0_orbit, "Is g in the conjugacy orbit of f? Pointwise conjugator search.", l0s)
    sp.add_argument("g")
    sp.add_argument("f")
    sp.add_argument("--structure", default=None, help="ambient structure (default: edgeless graph)")
    sp = add("nondiscrete", cmd_l0_nondiscrete, "Non-discreteness in L0 from joint embedding of linear-order systems.", l0s)
    sp.add_argument("--systems", type=_positive, default=3)
    sp.add_argument("--n", type=_positive, default=2)
    sp.add_argument("--eps", type=Fraction, default=Fraction(1, 4))
    sp.add_argument("--budget", type=_nonneg, default=8)
    sp.add_argument("--word-bound", type=_positive, default=6)
    sp = add("closure", cmd_l0_closure, "Closure of a step function under products and inverses (precompactness lifting).", l0s)
    sp.add_argument("input")
    sp.add_argument("--bound", type=_positive, default=1000)
    return p


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    name = args.cmd + (f" {args.l0cmd}" if args.cmd == "l0" else "")
    params = {k: v for k, v in vars(args).items() if k not in ("fn", "cmd", "l0cmd", "seed", "input", "inputs")}
    inputs = [args.input] if getattr(args, "input", None) else list(getattr(args, "inputs", []) or [])
    cfg = ExperimentConfig(name, inputs, args.seed, params)
    try:
        lines = args.fn(args, cfg)
    except (ParseError, WordError, OSError) as exc:
        print(f"simlab: parse error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, StructureError, ExtensionError, L0Error, ValueError) as exc:
        print(f"simlab: {exc}", file=sys.stderr)
        return 1
    out.write(cfg.header() + "\n")
    for line in lines:
        out.write(line + "\n")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
