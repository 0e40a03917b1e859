import copy
import json
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given

from symwave.errors import BankInvalid
from symwave.fileio import (bank_from_json, bank_to_json, format_table, golden, golden_names, parse_table,
                            read_grid, read_pgm, validate_bank_json, write_grid, write_pgm)
from strategies import polys


def test_golden_inventory():
    names = golden_names()
    assert len(names) == 15
    assert golden("ex1_m0").core_moment((0, 0)) == 1
    # scale 1/243 and the origin coefficient 81/243
    assert golden("ex1_m0").coefficient((0, 0)) == F(1, 3)
    assert golden("ex1_dual_m1").surd == 3


def test_table_orientation():
    t = parse_table("# origin_row: 1\n# origin_col: 1\n0,2,0\n0,1,3\n0,0,0\n")
    # row index increases downward, so the row above the origin is k2 = +1
    assert t.coeffs == {(0, 1): 2, (0, 0): 1, (1, 0): 3}


@given(polys(dim=2, complex_=False))
def test_table_roundtrip(t):
    if t.is_zero:
        return
    assert parse_table(format_table(t)) == t


@pytest.mark.parametrize("name", ["ex1_dual_m2", "ex3_dual_m1", "ex2_m0"])
def test_table_roundtrip_golden(name):
    t = golden(name)
    assert parse_table(format_table(t)) == t


@pytest.mark.parametrize("fixture", ["ex1_bank", "ex2_bank", "ex3_bank", "hat_bank"])
def test_bank_json_roundtrip(fixture, request):
    bank = request.getfixturevalue(fixture)
    doc = json.loads(json.dumps(bank_to_json(bank)))
    back = bank_from_json(doc)
    assert back.masks == bank.masks and back.duals == bank.duals
    assert back.ctx.digits == bank.ctx.digits
    assert back.fingerprint() == bank.fingerprint()


def test_bank_json_layout(ex1_bank):
    doc = bank_to_json(ex1_bank)
    assert doc["version"] == "symwave-bank/1"
    assert doc["dilation"] == [1, -2, 2, -1]
    wav = [e for e in doc["masks"] if e["dual"] and e["index"] == 2][0]
    # the dual wavelet carries 1/sqrt(3): one power of sqrt(m)
    assert wav["scale_pow_m_half"] == 1
    assert all(c["re"] != "0" or c["im"] != "0" for e in doc["masks"] for c in e["coeffs"])
    assert all(isinstance(c["re"], str) for e in doc["masks"] for c in e["coeffs"])


def test_bank_json_rejects_bad_documents(ex2_bank):
    doc = bank_to_json(ex2_bank)
    bad = copy.deepcopy(doc)
    bad["version"] = "symwave-bank/2"
    with pytest.raises(BankInvalid):
        validate_bank_json(bad)
    bad = copy.deepcopy(doc)
    bad["masks"][0]["coeffs"][0]["re"] = 0.5
    with pytest.raises(BankInvalid):
        bank_from_json(bad)
    bad = copy.deepcopy(doc)
    bad["masks"] = bad["masks"][:-1]
    with pytest.raises(BankInvalid):
        bank_from_json(bad)


def test_grid_io(tmp_path):
    arr = np.array([[F(1, 2), F(-3)], [F(0), F(7, 5)]], dtype=object)
    p = tmp_path / "g.csv"
    write_grid(p, arr)
    assert (read_grid(p) == arr).all()
    img = np.arange(12).reshape(3, 4) * 20
    for big in (False, True):
        q = tmp_path / f"i{big}.pgm"
        write_pgm(q, img * (200 if big else 1))
        assert (read_pgm(q) == img * (200 if big else 1)).all()
    (tmp_path / "a.pgm").write_text("P2\n# c\n2 1\n255\n3 4\n")
    assert read_grid(tmp_path / "a.pgm").tolist() == [[3, 4]]
