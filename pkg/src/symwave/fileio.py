"""Coefficient tables, grid files and the JSON filter-bank format.

Coefficient tables are CSV files of rationals. Comment lines carry the anchor
(``origin_row``, ``origin_col``), a rational ``scale`` and an optional ``inv_sqrt``
``r`` so the represented mask is ``scale / sqrt(r) * entry``. Entry ``(row, col)``
is the coefficient at ``k = (col - origin_col, origin_row - row)``.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List

import jsonschema
import numpy as np

from .errors import BankInvalid
from .laurent import GaussianRational, LaurentPoly, split_square

SCHEMA_VERSION = "symwave-bank/1"


# ---------------------------------------------------------------------------
# coefficient tables

def parse_table(text: str) -> LaurentPoly:
    """Parse a coefficient table from CSV text (2-D or, with one row, 1-D)."""
    meta: Dict[str, str] = {}
    rows: List[List[Fraction]] = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if ":" in body:
                key, val = body.split(":", 1)
                meta[key.strip()] = val.strip()
            continue
        rows.append([Fraction(x.strip()) for x in next(csv.reader([s]))])
    if not rows:
        raise ValueError("table has no entries")
    r0 = int(meta.get("origin_row", 0))
    c0 = int(meta.get("origin_col", 0))
    scale = Fraction(meta.get("scale", "1"))
    inv = int(meta.get("inv_sqrt", "1"))
    dim = int(meta.get("dim", "2"))
    coeffs = {}
    # value = scale / sqrt(inv) * x = (scale / inv) * sqrt(inv) * x
    f = scale / inv
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            if x:
                k = (j - c0,) if dim == 1 else (j - c0, r0 - i)
                coeffs[k] = x * f
    return LaurentPoly(coeffs, dim=dim, surd=inv)


def load_table(path) -> LaurentPoly:
    return parse_table(Path(path).read_text())


def golden(name: str) -> LaurentPoly:
    """A shipped reference table, e.g. ``golden("ex1_m0")``."""
    return parse_table(resources.files("symwave.data").joinpath(f"{name}.csv").read_text())


def golden_names() -> List[str]:
    return sorted(p.name[:-4] for p in resources.files("symwave.data").iterdir()
                  if p.name.endswith(".csv"))


def format_table(t: LaurentPoly) -> str:
    """Inverse of :func:`parse_table` for real 2-D (or 1-D) integer-offset masks."""
    if any(t.par):
        raise ValueError("tables hold integer-offset masks only")
    if not t.is_real:
        raise ValueError("tables hold real coefficients only")
    lo, hi = t.bounding_box() if not t.is_zero else ((0,) * t.dim, (0,) * t.dim)
    cf = t.coeffs
    # sqrt(surd) * x = (x * surd) / sqrt(surd)
    out = io.StringIO()
    if t.dim == 1:
        out.write(f"# dim: 1\n# origin_row: 0\n# origin_col: {-lo[0]}\n")
    else:
        out.write(f"# origin_row: {hi[1]}\n# origin_col: {-lo[0]}\n")
    out.write("# scale: 1\n")
    if t.surd != 1:
        out.write(f"# inv_sqrt: {t.surd}\n")
    mult = t.surd

    def val(k):
        g = cf.get(k)
        return "0" if g is None else str(g.re * mult)

    if t.dim == 1:
        out.write(",".join(val((k,)) for k in range(lo[0], hi[0] + 1)) + "\n")
    else:
        for k2 in range(hi[1], lo[1] - 1, -1):
            out.write(",".join(val((k1, k2)) for k1 in range(lo[0], hi[0] + 1)) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# grids

def read_grid(path) -> np.ndarray:
    """Read a CSV (rationals or decimals) or PGM grid as an object or integer array."""
    p = Path(path)
    if p.suffix.lower() == ".pgm":
        return read_pgm(p)
    rows = []
    for line in p.read_text().splitlines():
        s = line.strip()
        if s and not s.startswith("#"):
            rows.append([Fraction(x.strip()) for x in s.split(",")])
    if not rows:
        raise ValueError(f"{p} holds no data")
    arr = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        if len(r) != arr.shape[1]:
            raise ValueError(f"{p}: ragged rows")
        arr[i, :] = r
    return arr


def write_grid(path, arr: np.ndarray) -> None:
    a = np.atleast_2d(arr)
    with open(path, "w") as fh:
        for row in a:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _fmt(x) -> str:
    if isinstance(x, (Fraction, int, np.integer)):
        return str(x)
    if isinstance(x, GaussianRational):
        return str(x.re) if x.im == 0 else str(x)
    if isinstance(x, complex):
        return repr(x.real) if x.imag == 0 else repr(x)
    return repr(float(x))


def read_pgm(path) -> np.ndarray:
    """Binary (P5) or ASCII (P2) PGM with 8- or 16-bit samples."""
    data = Path(path).read_bytes()
    tokens: List[bytes] = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    magic, w, h, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic == b"P2":
        vals = [int(x) for x in data[pos:].split()]
        return np.array(vals[: w * h], dtype=np.int64).reshape(h, w)
    if magic != b"P5":
        raise ValueError(f"{path}: not a PGM file")
    pos += 1
    dt = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    arr = np.frombuffer(data, dtype=dt, count=w * h, offset=pos)
    return arr.reshape(h, w).astype(np.int64)


def write_pgm(path, arr: np.ndarray) -> None:
    a = np.asarray(arr, dtype=np.int64)
    maxval = 65535 if a.max(initial=0) > 255 else 255
    dt = ">u2" if maxval > 255 else "u1"
    with open(path, "wb") as fh:
        fh.write(f"P5\n{a.shape[1]} {a.shape[0]}\n{maxval}\n".encode())
        fh.write(np.clip(a, 0, maxval).astype(dt).tobytes())


# ---------------------------------------------------------------------------
# filter-bank JSON

_RAT = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}

BANK_SCHEMA = {
    "type": "object",
    "required": ["version", "dim", "dilation", "digits", "masks"],
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "dim": {"type": "integer", "minimum": 1},
        "dilation": {"type": "array", "items": {"type": "integer"}},
        "digits": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
        "center": {"type": "array", "items": _RAT},
        "symmetry": {"type": "object"},
        "masks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["role", "dual", "index", "sigma", "scale_pow_m_half", "coeffs"],
                "properties": {
                    "role": {"enum": ["refinable", "wavelet"]},
                    "dual": {"type": "boolean"},
                    "index": {"type": "integer", "minimum": 0},
                    "sigma": {"type": "array", "items": _RAT},
                    "scale_pow_m_half": {"type": "integer"},
                    "surd": {"type": "integer", "minimum": 1},
                    "coeffs": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["k", "re", "im"],
                            "properties": {"k": {"type": "array", "items": {"type": "integer"}},
                                           "re": _RAT, "im": _RAT},
                        },
                    },
                    "meta": {"type": "object"},
                },
            },
        },
        "provenance": {"type": "object"},
    },
}


def poly_to_json(t: LaurentPoly, m: int) -> dict:
    """Serialize a mask; the irrational factor is written as a power of ``sqrt(m)``
    when possible, else as an explicit ``surd``."""
    core = LaurentPoly._raw(t.dim, t.par, dict(t.terms), t.den, 1)
    pow_, rest = 0, t.surd
    f, r = split_square(m)
    if t.surd != 1 and r == t.surd:
        # sqrt(r) = sqrt(m) / f
        pow_, rest = 1, 1
        core = core.scale(Fraction(1, f))
    coeffs = [{"k": list(k), "re": str(g.re), "im": str(g.im)} for k, g in core.coeffs.items()]
    out = {"sigma": [str(s) for s in t.sigma], "scale_pow_m_half": pow_, "coeffs": coeffs}
    if rest != 1:
        out["surd"] = rest
    return out


def poly_from_json(obj: dict, m: int, dim: int) -> LaurentPoly:
    sigma = [Fraction(s) for s in obj["sigma"]]
    coeffs = {tuple(c["k"]): GaussianRational(Fraction(c["re"]), Fraction(c["im"]))
              for c in obj["coeffs"]}
    t = LaurentPoly(coeffs, sigma=sigma, dim=dim)
    p = obj["scale_pow_m_half"]
    if p:
        half, odd = divmod(p, 2)
        t = t.scale(Fraction(m) ** half)
        if odd:
            t = t.with_surd(m)
    if obj.get("surd", 1) != 1:
        t = t.with_surd(obj["surd"])
    return t


def validate_bank_json(doc: dict) -> None:
    try:
        jsonschema.validate(doc, BANK_SCHEMA)
    except jsonschema.ValidationError as e:
        raise BankInvalid(f"bank file fails schema: {e.message}") from None


def dump_json(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load_json(path) -> dict:
    return json.loads(Path(path).read_text())


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, GaussianRational):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def bank_to_json(bank) -> dict:
    """Document in the ``symwave-bank/1`` layout (masks first, then duals)."""
    ctx = bank.ctx
    masks = []
    for dual, polys, metas in ((False, bank.masks, bank.meta), (True, bank.duals, bank.dual_meta)):
        for nu, t in enumerate(polys):
            entry = poly_to_json(t, ctx.m)
            entry.update(role="refinable" if nu == 0 else "wavelet", dual=dual, index=nu)
            if nu < len(metas):
                entry["meta"] = _jsonable(metas[nu])
            masks.append(entry)
    doc = {
        "version": SCHEMA_VERSION,
        "dim": ctx.dim,
        "dilation": [int(x) for row in ctx.M for x in row],
        "digits": [list(s) for s in ctx.digits],
        "center": [str(x) for x in bank.center],
        "symmetry": _jsonable(bank.symmetry),
        "masks": masks,
        "provenance": _jsonable(bank.provenance),
    }
    validate_bank_json(doc)
    return doc


def bank_from_json(doc: dict):
    """Rebuild a :class:`~symwave.extension.FilterBank`; metadata is recomputed."""
    from .extension import FilterBank, _mask_meta
    from .lattice import build_context

    validate_bank_json(doc)
    d = doc["dim"]
    flat = doc["dilation"]
    if len(flat) != d * d:
        raise BankInvalid("dilation must hold dim*dim integers")
    M = [flat[i * d:(i + 1) * d] for i in range(d)]
    try:
        ctx = build_context(M, [tuple(s) for s in doc["digits"]])
    except Exception as e:  # bad digits or a non-expanding matrix
        raise BankInvalid(f"invalid dilation context: {e}") from None
    m = ctx.m
    masks: List = [None] * (m + 1)
    duals: List = [None] * (m + 1)
    for entry in doc["masks"]:
        i = entry["index"]
        if i > m:
            raise BankInvalid(f"mask index {i} exceeds m = {m}")
        (duals if entry["dual"] else masks)[i] = poly_from_json(entry, m, d)
    if any(t is None for t in masks + duals):
        raise BankInvalid("bank must list m + 1 masks and m + 1 duals")
    sym = dict(doc.get("symmetry") or {"type": "none"})
    if "center" in sym:
        sym["center"] = tuple(Fraction(x) for x in sym["center"])
    if "group" in sym:
        sym["group"] = tuple(tuple(tuple(r) for r in E) for E in sym["group"])
    center = tuple(Fraction(x) for x in doc.get("center", ["0"] * d))
    bank = FilterBank(ctx, masks, duals, center, sym, provenance=dict(doc.get("provenance") or {}))
    kind = sym.get("type", "none")
    kind = "point-a" if kind == "none" else kind
    bank.meta = [_mask_meta(t, ctx, kind, sym.get("group"), nu == 0) for nu, t in enumerate(masks)]
    bank.dual_meta = [_mask_meta(t, ctx, kind, sym.get("group"), nu == 0) for nu, t in enumerate(duals)]
    return bank
