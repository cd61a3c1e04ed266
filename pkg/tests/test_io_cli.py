from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from plkdecomp import generators
from plkdecomp.cli import main, run_command
from plkdecomp.io import (
    FIXTURES,
    CRNDocument,
    ParseError,
    documents_equal,
    fixture_path,
    load_fixture,
    parse_blocks,
    parse_crn,
    parse_points,
    render_crn,
)
from plkdecomp.linalg import Matrix

from .strategies import seeds

SMALL = """\
# reversible pair
reaction f: A + 2 B -> C   # forward
reaction b: C -> A + 2 B
kinetics f: A=1, B=0.5
rate f: 2
rate b: 0.25
block one: f, b
"""


def test_parse_small_document():
    doc = parse_crn(SMALL)
    net = doc.network
    assert net.species == ("A", "B", "C")
    assert net.labels == ("f", "b")
    assert doc.F.row(0) == (1, Fraction(1, 2), 0)
    assert doc.F.row(1) == (0, 0, 1)
    assert doc.mass_action_default == ("b",)
    assert doc.rates == (2.0, 0.25)
    assert doc.blocks == [("one", ["f", "b"])]


def test_zero_complex():
    doc = parse_crn("reaction r1: 0 -> A\nreaction r2: A -> 0\n")
    assert doc.network.complex_name(0) == "0"


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("reaction r1: A -> B\nreaction r2 A -> B\n", 2, "expected 'reaction"),
        ("reaction r1: A -> B\nfoo bar\n", 2, "unknown keyword"),
        ("reaction r1: A -> \n", 1, "empty complex"),
        ("reaction r1: A -> B\nkinetics r1: A=x\n", 2, "invalid number"),
        ("reaction r1: A -> B\nrate r1: -1\n", 2, "positive"),
        ("reaction r1: A -> B\nreaction r2: B -> A\nrate r1: 1\n", 3, "rates missing"),
        ("species A\nreaction r1: A -> B\n", 2, "undeclared species"),
        ("reaction r1: A -> B\nreaction r1: B -> A\n", 2, "duplicate reaction label"),
        ("reaction r1: A -> B\nblock x: r9\n", 2, "unknown reaction"),
        ("reaction r1: A -> B\nkinetics r2: A=1\n", 2, "unknown reaction"),
        ("# nothing\n", 1, "no reactions"),
        ("reaction r1: A -> A\n", 1, "self-loop"),
        ("reaction r1: A -> -B\n", 1, "cannot read term"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(ParseError) as info:
        parse_crn(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_blocks_and_points():
    assert parse_blocks("block a: r1, r2\nblock b: r3\n") == [("a", ["r1", "r2"]), ("b", ["r3"])]
    with pytest.raises(ParseError):
        parse_blocks("reaction r1: A -> B\n")
    assert parse_points("A=1, B=2\nB=0.5, A=3\n", ("A", "B")) == [[1.0, 2.0], [3.0, 0.5]]
    with pytest.raises(ParseError, match="misses B"):
        parse_points("A=1\n", ("A", "B"))
    with pytest.raises(ParseError, match="positive"):
        parse_points("A=1, B=0\n", ("A", "B"))


@pytest.mark.parametrize("name", FIXTURES)
def test_fixtures_round_trip(name):
    doc = load_fixture(name)
    again = parse_crn(render_crn(doc))
    assert documents_equal(doc, again)


@given(seeds)
def test_random_round_trip(seed):
    rng = np.random.default_rng(seed)
    net = generators.random_network(rng)
    F = Matrix.from_rows([[Fraction(int(v), 4) for v in rng.integers(-8, 9, size=net.m)] for _ in range(net.r)],
                         cols=net.m)
    rates = tuple(float(v) for v in np.exp(rng.normal(size=net.r)))
    doc = CRNDocument(net, F, rates, [("all", list(net.labels))])
    assert documents_equal(doc, parse_crn(render_crn(doc)))


def _run(*argv):
    report, code, _ = run_command(["--format", "json", *argv])
    return report, code


def test_cli_analyze_and_classify():
    report, code = _run("analyze", str(fixture_path("schmitz.crn")))
    assert code == 0
    s = report["result"]["summary"]
    assert (s["complexes"], s["linkage_classes"], s["rank"], s["deficiency"]) == (6, 1, 5, 0)
    assert report["result"]["nf_nodes"] == ["M1", "M2", "M3"]
    report, code = _run("classify", str(fixture_path("example4.crn")))
    x1 = next(n for n in report["result"]["nodes"] if n["complex"] == "X1")
    assert x1["type"] == "NF" and x1["cf_subsets"] == [["R1"], ["R5"]]
    assert (x1["in_degree"], x1["out_degree"]) == (3, 2)


def test_cli_exit_codes(tmp_path):
    assert _run("decompose", str(fixture_path("schmitz_sub.crn")), "--wr-cf")[1] == 0
    assert _run("decompose", str(fixture_path("example6.crn")), "--wr-cf")[1] == 1
    assert _run("decompose", str(fixture_path("example6.crn")), "--wr-cf", "--mode", "greedy")[1] == 1
    assert _run("decompose", str(fixture_path("example6.crn")), "--wr-cf", "--max-cycles", "1")[1] == 3
    bad = tmp_path / "bad.crn"
    bad.write_text("reaction r1: A -> \n")
    report, code = _run("analyze", str(bad))
    assert code == 2 and "line 1" in report["error"]
    assert _run("analyze", str(tmp_path / "missing.crn"))[1] == 2


def test_cli_decompose_independent():
    report, code = _run("decompose", str(fixture_path("schmitz_sub.crn")), "--independent")
    assert code == 0 and report["result"]["nontrivial"]
    assert not report["result"]["coordinate_graph"]["connected"]
    report, code = _run("decompose", str(fixture_path("schmitz.crn")), "--independent-wr-cf")
    assert code == 1 and report["result"]["outcome"] == "not_found_proven"


def test_cli_kinetic_complexes_and_plp(tmp_path):
    blocks = tmp_path / "d.txt"
    blocks.write_text("block a: r1, r2, r3, r4\nblock b: r5, r6, r7, r8\n")
    path = str(fixture_path("schmitz_sub.crn"))
    report, code = _run("kinetic-complexes", path, "--decomposition", str(blocks))
    r = report["result"]
    assert code == 0 and (r["n"], r["l"], r["s"], r["deficiency"]) == (7, 1, 6, 0)
    assert (r["induced"]["n"], r["induced"]["l"], r["induced"]["s"]) == (7, 2, 5)
    report, code = _run("plp", path, "--decomposition", str(blocks))
    r = report["result"]
    assert code == 0 and [c["dim"] for c in r["block_certificates"]] == [2, 3]
    assert r["theorem"]["P_E"]["dim"] == 5
    assert r["theorem"]["P_E_perp"]["basis"] == [["1", "5/47", "1", "1", "9/25", "9/25"]]
    report, code = _run("plp", path)
    assert code == 0 and report["result"]["decomposition"]["blocks"][0] == ["r1", "r2", "r3", "r4"]


def test_cli_plp_with_rates_and_check_equilibrium(tmp_path):
    crn = tmp_path / "pair.crn"
    crn.write_text("reaction f: A -> B\nreaction b: B -> A\nrate f: 1\nrate b: 2\n")
    report, code = _run("plp", str(crn), "--samples", "5")
    assert code == 0 and report["result"]["numeric"]["max_sample_residual"] < 1e-8
    pts = tmp_path / "pts.txt"
    pts.write_text("A=2, B=1\nA=1, B=1\n")
    report, code = _run("check-equilibrium", str(crn), "--point", str(pts))
    assert code == 1
    assert [p["equilibrium"] for p in report["result"]["points"]] == [True, False]


def test_json_output_is_deterministic(capsys):
    argv = ["--format", "json", "decompose", str(fixture_path("schmitz.crn")), "--wr-cf"]
    outs = []
    for _ in range(2):
        assert main(argv) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["result"]["outcome"] == "found"


def test_text_output_and_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "plkdecomp.cli", "analyze", str(fixture_path("schmitz_sub.crn"))],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "deficiency: 0" in proc.stdout
