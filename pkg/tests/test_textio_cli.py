import io
import os
from fractions import Fraction as F
from pathlib import Path

import pytest

from simlab.cli import build_parser, run
from simlab.l0 import StepFunction
from simlab.partial_autos import pauto
from simlab.structures import graph, linear_order, ordered_metric
from simlab.textio import ParseError, format_step, format_structure, parse_step, parse_structure

DATA = Path(__file__).resolve().parent.parent / "data"


def cli(*argv, env=None):
    old = os.environ.get("SIMLAB_THREADS")
    if env is not None:
        os.environ["SIMLAB_THREADS"] = env
    try:
        buf = io.StringIO()
        code = run([str(a) for a in argv], buf)
        return code, buf.getvalue()
    finally:
        if old is None:
            os.environ.pop("SIMLAB_THREADS", None)
        else:
            os.environ["SIMLAB_THREADS"] = old


def test_structure_round_trip():
    for S, maps in [
        (linear_order(3), [("p", pauto(linear_order(3), {0: 1}))]),
        (graph(3, [(0, 1)]), [("p", pauto(graph(3, [(0, 1)]), {0: 2})), ("q", pauto(graph(3, [(0, 1)]), {}))]),
        (ordered_metric([[0, F(1, 2)], [F(1, 2), 0]]), []),
    ]:
        sf = parse_structure(format_structure(S, maps))
        assert sf.structure == S and list(sf.pautos) == maps


def test_step_round_trip():
    f = StepFunction(((F(1, 3), (1, 0, 2)), (F(2, 3), (0, 1, 2))))
    assert parse_step(format_step(f)) == f
    prod = StepFunction(((F(1), ((1, 0), (0, 2, 1))),))
    assert parse_step(format_step(prod)) == prod


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("class Graph\nsize 2\nrel E 0 5\n", 3),
        ("class Nope\n", 1),
        ("class Graph\nsize two\n", 2),
        ("class Graph\nsize 2\npauto p 0->1 0->0\n", 3),
        ("class LinearOrder\nsize 2\nrel < 0 1\npauto p 0->7\n", 4),
    ],
)
def test_structure_parse_errors_carry_line_numbers(text, lineno):
    with pytest.raises(ParseError) as exc:
        parse_structure(text)
    assert exc.value.lineno == lineno and f"line {lineno}" in str(exc.value)


def test_step_parse_errors():
    with pytest.raises(ParseError) as exc:
        parse_step("step\npiece 1/2 0 1\npiece x 1 0\n")
    assert exc.value.lineno == 3
    with pytest.raises(ParseError):
        parse_step("step\npiece 1/2 0 1\n")
    with pytest.raises(ParseError):
        parse_step("")


def test_cli_examples():
    code, out = cli("reduce", "s1 s1^-1")
    assert code == 0 and out.splitlines()[-1] == "s1 s1^-1\te\t0"
    code, out = cli("eppa", "--input", DATA / "order2.struct", "--max-size", 10)
    assert code == 0 and out.splitlines()[1:] == ["result", "none"]
    code, out = cli("l0", "rho", DATA / "half.step", DATA / "ident.step")
    assert code == 0 and out.splitlines()[-1] == "1/2"
    code, out = cli("l0", "closure", DATA / "mixed.step")
    assert out.splitlines()[-1] == "closed\t6"


def test_cli_header_echoes_config():
    code, out = cli("classify", "--input", DATA / "pair.struct", "--base", "10,9", "--seed", 7)
    head = out.splitlines()[0].split("\t")
    assert head[0] == "# simlab" and "subcommand=classify" in head and "seed=7" in head
    assert f"input={DATA / 'pair.struct'}" in head and "base=10,9" in head


def test_cli_exit_codes(tmp_path):
    assert cli("surgery", "--u", "s1", "--x", "e")[0] == 1
    assert cli("witness-q", "--size", 6, "--depth", 3)[0] == 1
    assert cli("reduce", "s1 s3", "--n", 2)[0] == 2
    assert cli("eppa", "--input", tmp_path / "missing.struct")[0] == 2
    bad = tmp_path / "bad.struct"
    bad.write_text("class Graph\nsize 2\nrel E 0 9\n")
    assert cli("eppa", "--input", bad)[0] == 2
    assert cli("bogus")[0] == 2
    assert cli("witness-q", "--size", 0)[0] == 2


def test_every_subcommand_help_names_its_construct():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "cmd")
    names = set(sub.choices)
    assert names == {"reduce", "surgery", "eppa", "chain", "classify", "witness-q", "jep", "l0"}
    l0 = next(a for a in sub.choices["l0"]._actions if a.dest == "l0cmd")
    assert set(l0.choices) == {"rho", "orbit", "nondiscrete", "closure"}
    for p in list(sub.choices.values()) + list(l0.choices.values()):
        assert p.description and len(p.description) > 20


def test_threads_do_not_change_output():
    argv = ("chain", "--input", DATA / "graph3.struct", "--grow", 1, "--seed", 1)
    assert cli(*argv, env="1") == cli(*argv, env="4")
