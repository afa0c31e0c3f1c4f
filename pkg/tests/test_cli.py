import json
from collections import Counter

import pytest

from conftest import FRAME_FILES, RING, torsion_complex
from morseward import cli
from morseward.chain import dumps_complex
from morseward.exceptions import InvariantViolation
from morseward.image import build_simplicial, parse_image, sweep_filtration
from morseward.oracle import direct_barcode
from morseward.persist import Barcode

FRAMES = [str(p) for p in FRAME_FILES]

# two holes stacked vertically, closed by the 4th and 9th of ten rows
TWO_HOLES = "\n".join(["###", "#.#", "#.#", "###", "###", "###", "#.#", "#.#", "###", "###"]) + "\n"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def ring_file(tmp_path):
    p = tmp_path / "ring.txt"
    p.write_text(RING)
    return p


@pytest.fixture
def torsion_file(tmp_path):
    p = tmp_path / "E.cx"
    p.write_text(dumps_complex(torsion_complex()))
    return p


def test_info_frames(capsys):
    code, out, _ = run(capsys, "info", *FRAMES)
    assert code == 0
    assert out.splitlines()[0] == "203 vertices, 408 edges, 208 triangles"
    assert "step 4: 203 vertices, 408 edges, 208 triangles" in out
    assert "Euler characteristic: 3" in out


def test_info_ring_cubical(capsys, ring_file):
    code, out, _ = run(capsys, "info", ring_file, "--complex", "cubical")
    assert code == 0
    assert out.splitlines()[0] == "16 vertices, 24 edges, 8 squares"


def test_info_empty_image(capsys, tmp_path):
    p = tmp_path / "blank.txt"
    p.write_text("...\n...\n")
    code, out, _ = run(capsys, "info", p)
    assert code == 0
    assert out.splitlines()[0] == "0 vertices, 0 edges, 0 triangles"


def test_persist_session_format(capsys):
    code, out, _ = run(capsys, "persist", *FRAMES, "--query", "1,4,0", "--query", "2,4,1")
    assert code == 0
    assert out == (
        "Persistent Homology H^{1,4}_0\n" + "Component Z\n" * 4
        + "Persistent Homology H^{2,4}_1\n" + "Component Z\n" * 2
    )


def test_persist_zero_index_is_empty(capsys):
    code, out, _ = run(capsys, "persist", *FRAMES, "--query", "0,4,1")
    assert code == 0
    assert out == "Persistent Homology H^{0,4}_1\n"


def test_persist_same_without_reduction(capsys, ring_file, tmp_path):
    holes = tmp_path / "holes.txt"
    holes.write_text(TWO_HOLES)
    for args in ([ring_file, "--complex", "cubical"], [holes, "--filtration", "rows", "--steps", "10"]):
        _, reduced, _ = run(capsys, "persist", *args, "--query", "all")
        _, direct, _ = run(capsys, "persist", *args, "--query", "all", "--skip-reduction")
        assert reduced == direct and reduced


def test_persist_triple_and_json(capsys, torsion_file):
    code, out, _ = run(capsys, "persist", torsion_file, "--query", "1,1,2,1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["queries"][0]["name"] == "H^{1,1,2}_1"
    # classes of the loop that die mod 2 by step 2: the even multiples
    assert (data["queries"][0]["rank"], data["queries"][0]["torsion"]) == (1, [])


def test_reduce_frames(capsys):
    code, out, _ = run(capsys, "reduce", *FRAMES, "--dump-dvf")
    assert code == 0
    assert "degree 1 vector field: 187 vectors" in out
    assert "degree 2 vector field: 207 vectors" in out
    assert "critical: 16 vertices, 14 edges, 1 triangles (31 cells" in out
    assert "dvf degree 1: {(" in out


def test_reduce_json_and_empty(capsys, tmp_path):
    p = tmp_path / "blank.txt"
    p.write_text("..\n")
    code, out, _ = run(capsys, "reduce", p, "--format", "json")
    assert code == 0
    assert json.loads(out)["critical_cells"] == 0


def test_homology_ring(capsys, ring_file):
    code, out, _ = run(capsys, "homology", ring_file, "--complex", "cubical", "--emit-generators")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "H_0 = Z" and "H_1 = Z" in lines
    gen = json.loads(lines[lines.index("H_1 = Z") + 1].split(": ", 1)[1])
    assert len(gen) == 8


def test_barcode_torsion_json_round_trip(capsys, torsion_file, tmp_path):
    out_path = tmp_path / "bars.json"
    code, _, _ = run(capsys, "barcode", torsion_file, "--out", out_path)
    assert code == 0
    text = out_path.read_text()
    bc = Barcode.from_json(text)
    assert any(b.label == "Z_2" for b in bc.bars)
    assert Barcode.from_json(bc.to_json()) == bc


def test_barcode_single_pixel(capsys, tmp_path):
    p = tmp_path / "dot.txt"
    p.write_text("#\n")
    _, out, _ = run(capsys, "barcode", p)
    bars = json.loads(out)["bars"]
    assert bars == [{"dim": 0, "birth": 1, "death": None, "label": "Z"}]


def test_barcode_two_holes(capsys, tmp_path):
    p = tmp_path / "holes.txt"
    p.write_text(TWO_HOLES)
    _, out, _ = run(capsys, "barcode", p, "--filtration", "rows", "--steps", "10")
    bc = Barcode.from_json(out)
    births = sorted(b.birth for b in bc.in_degree(1))
    assert births == [4, 9]
    img = parse_image(TWO_HOLES)
    C = build_simplicial(img, sweep_filtration(img, "rows", 10))
    assert Counter((b.dim, b.birth, b.death, b.label) for b in bc.bars) == direct_barcode(C)


def test_barcode_svg_and_text(capsys, torsion_file):
    _, svg, _ = run(capsys, "barcode", torsion_file, "--format", "svg")
    assert svg.startswith("<svg") and "Z_2" in svg
    _, text, _ = run(capsys, "barcode", torsion_file, "--format", "text")
    assert "H1 [1, inf) Z_2" in text


def test_generators_command(capsys):
    code, out, _ = run(capsys, "generators", *FRAMES, "--query", "2,4,1", "--format", "json")
    assert code == 0
    q = json.loads(out)["queries"][0]
    assert q["components"] == ["Z", "Z"] and len(q["generators"]) == 2


def test_gray_filtration(capsys, tmp_path):
    p = tmp_path / "g.pgm"
    p.write_text("P2\n3 1\n255\n10 100 200\n")
    code, out, _ = run(capsys, "info", p, "--filtration", "gray", "--thresholds", "64,128,255")
    assert code == 0
    assert "step 1: 4 vertices, 5 edges, 2 triangles" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["info"],
        ["frobnicate", "x"],
        ["persist", FRAMES[0], "--query", "1,2"],
        ["persist", *FRAMES, "--query", "3,1,0"],
        ["persist", *FRAMES, "--query", "1,9,0"],
        ["info", *FRAMES, "--format", "svg"],
        ["info", *FRAMES, "--threads", "0"],
        ["info", *FRAMES, "--filtration", "rows"],
        ["homology", FRAMES[0], "--filtration", "gray"],
    ],
)
def test_usage_errors_exit_1(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 1


def test_input_errors_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("#x#\n")
    assert run(capsys, "info", bad)[0] == 2
    assert run(capsys, "info", tmp_path / "missing.txt")[0] == 2
    broken = tmp_path / "c.cx"
    broken.write_text("morseward-complex 1\nnonsense\n")
    assert run(capsys, "info", broken)[0] == 2
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    a.write_text("##\n")
    b.write_text("#.\n")
    code, _, err = run(capsys, "info", a, b)
    assert code == 2 and "(0, 1)" in err


def test_invariant_violation_exit_3(capsys, monkeypatch, torsion_file):
    def boom(*args, **kwargs):
        raise InvariantViolation("forced")

    monkeypatch.setattr(cli, "barcode", boom)
    code, _, err = run(capsys, "barcode", torsion_file)
    assert code == 3 and "forced" in err


def test_unwritable_output(capsys, torsion_file, tmp_path):
    code, _, err = run(capsys, "barcode", torsion_file, "--out", tmp_path / "no" / "such" / "dir.json")
    assert code == 1 and "cannot write" in err


def test_skip_reduction_limit(capsys, monkeypatch, torsion_file):
    monkeypatch.setattr(cli, "SKIP_REDUCTION_LIMIT", 2)
    assert run(capsys, "persist", torsion_file, "--skip-reduction")[0] == 1
