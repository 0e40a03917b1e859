import json
from importlib import resources

import numpy as np
import pytest

from symwave.cli import main
from symwave.fileio import read_pgm, write_pgm
from symwave.transform import Grid

DATA = resources.files("symwave.data")


def _data(name):
    return str(DATA.joinpath(name))


@pytest.fixture
def ex3_file(tmp_path):
    out = tmp_path / "ex3.json"
    rc = main(["design", "--matrix", "1,1;1,-1", "--order", "2", "--symmetry", "group",
               "--group-file", _data("fourfold.json"), "--out", str(out)])
    assert rc == 0
    return out


def test_design_examples(tmp_path):
    out = tmp_path / "e1.json"
    assert main(["design", "--matrix", "1,-2;2,-1", "--center", "0,0", "--order", "4",
                 "--symmetry", "point-a", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    m0 = [e for e in doc["masks"] if e["index"] == 0 and not e["dual"]][0]
    assert m0["meta"]["sum_rule"] == 4
    assert main(["design", "--matrix", "2,0;0,2", "--center", "1/2,1/2", "--order", "2",
                 "--symmetry", "axial", "--out", str(tmp_path / "e2.json")]) == 0


def test_design_from_table(tmp_path):
    out = tmp_path / "g1.json"
    assert main(["design", "--matrix", "1,-2;2,-1", "--center", "0,0", "--order", "4", "--symmetry",
                 "point-a", "--mask", _data("ex1_m0.csv"), "--out", str(out)]) == 0
    assert main(["verify", str(out), "--against-mask", _data("ex1_dual_m1.csv"),
                 "--compare-up-to-scalar"]) == 0


def test_verify_tables(capsys):
    assert main(["verify", _data("ex1_m0.csv"), "--matrix", "1,-2;2,-1", "--symmetry", "point-a",
                 "--center", "0,0", "--order", "4"]) == 0
    rep = json.loads(capsys.readouterr().out)
    sr = [r for r in rep["records"] if r["name"] == "sum_rule"][0]
    assert sr["order"] == 4
    assert main(["verify", _data("ex3_dual_m1.csv"), "--order", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert [r for r in rep["records"] if r["name"] == "vanishing_moments"][0]["order"] == 2


def test_verify_negative_control(tmp_path, capsys):
    text = open(_data("ex1_m0.csv")).read().replace("0,0,0,0,-3,0,0", "0,0,0,0,-2,0,0", 1)
    bad = tmp_path / "bad.csv"
    bad.write_text(text)
    rc = main(["verify", str(bad), "--matrix", "1,-2;2,-1", "--symmetry", "point-a", "--center", "0,0",
               "--order", "4"])
    assert rc == 3
    assert "witness" in capsys.readouterr().err


def test_roundtrip_pgm(tmp_path, ex3_file, capsys):
    img = tmp_path / "r.pgm"
    write_pgm(img, np.random.default_rng(0).integers(0, 256, (16, 16)))
    assert main(["transform", str(ex3_file), str(img), "--levels", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["ok"] and out["max_error"] == 0


def test_analyze_synthesize_files(tmp_path, ex3_file):
    img = tmp_path / "r.pgm"
    write_pgm(img, np.random.default_rng(1).integers(0, 256, (6, 6)))
    pyr = tmp_path / "pyr"
    assert main(["transform", str(ex3_file), str(img), "--mode", "analyze", "--levels", "2",
                 "--out", str(pyr)]) == 0
    assert (pyr / "level1_band1.csv").exists()
    rec = tmp_path / "rec.csv"
    assert main(["transform", str(ex3_file), str(pyr), "--mode", "synthesize", "--out", str(rec)]) == 0
    lines = rec.read_text().splitlines()
    origin = tuple(int(v) for v in lines[0].split(":")[1].split(","))
    rows = np.array([[int(v) for v in l.split(",")] for l in lines if not l.startswith("#")])
    back = Grid(rows, origin).on_box((0, 0), (5, 5))
    assert (back == read_pgm(img)).all()
    assert Grid(rows, origin).trimmed().lo >= (0, 0)
    assert rows.shape == Grid(rows, origin).trimmed().data.shape  # output is cropped


def test_cascade_and_bench(tmp_path, capsys):
    hat = tmp_path / "hat.csv"
    hat.write_text("# dim: 1\n# origin_col: 1\n1/4,1/2,1/4\n")
    bank = tmp_path / "hat.json"
    assert main(["design", "--matrix", "2", "--order", "2", "--symmetry", "point-a", "--mask", str(hat),
                 "--out", str(bank)]) == 0
    capsys.readouterr()
    assert main(["cascade", str(bank), "--levels", "3", "--exact", "--out", str(tmp_path / "c.csv")]) == 0
    assert json.loads(capsys.readouterr().out)["mass"] == "1"
    assert main(["bench", str(bank), "--levels", "5"]) == 0
    text = capsys.readouterr().out
    slope = float([l for l in text.splitlines() if l.startswith("# slope")][0].split(",")[1])
    assert abs(slope + 1.386) / 1.386 < 0.15


def test_exit_codes(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["design", "--matrix", "2", "--order", "2", "--symmetry", "nope"])
    assert e.value.code == 2
    assert main(["design", "--matrix", "1,2;3,x", "--order", "2", "--symmetry", "point-a"]) == 2
    assert main(["design", "--matrix", "1,0;0,1", "--order", "2", "--symmetry", "point-a"]) == 2
    assert main(["cascade", str(tmp_path / "missing.json")]) == 4
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({"version": "symwave-bank/1"}))
    assert main(["cascade", str(broken)]) == 4
