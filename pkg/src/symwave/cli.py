"""Command-line interface.

Exit codes: 0 success, 2 invalid flags or parameters, 3 failed verification,
4 input/output failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import fileio
from . import verify as V
from .design import design_axial, design_group, design_point, verify_bank
from .errors import (BankInvalid, ContextMismatch, NonFiniteSamples, SymwaveError,
                     VerificationFailed)
from .lattice import build_context, matmul
from .laurent import LaurentPoly
from .transform import (CoefficientPyramid, Grid, analyze, approx_order_experiment, cascade,
                        grids_equal, max_abs_diff, synthesize)

EXIT_OK, EXIT_FLAGS, EXIT_VERIFY, EXIT_IO = 0, 2, 3, 4


class FlagError(Exception):
    pass


class IOFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# flag parsing

def parse_matrix(s: str) -> List[List[int]]:
    try:
        rows = [[int(x) for x in r.split(",")] for r in s.split(";")]
    except ValueError:
        raise FlagError(f"--matrix: cannot parse {s!r}") from None
    if any(len(r) != len(rows) for r in rows):
        raise FlagError("--matrix must be square")
    return rows


def parse_vector(s: str, name: str) -> tuple:
    try:
        return tuple(Fraction(x) for x in s.split(","))
    except (ValueError, ZeroDivisionError):
        raise FlagError(f"{name}: cannot parse {s!r}") from None


def parse_digits(s: Optional[str]):
    if not s:
        return None
    try:
        return [tuple(int(x) for x in p.split(",")) for p in s.split(";")]
    except ValueError:
        raise FlagError(f"--digits: cannot parse {s!r}") from None


def _read_json(path):
    try:
        return fileio.load_json(path)
    except (OSError, json.JSONDecodeError) as e:
        raise IOFailure(f"{path}: {e}") from None


def load_group(path: str):
    """Group file: ``{"elements": [matrix, ...]}``; generators are closed under products."""
    doc = _read_json(path)
    try:
        gens = [tuple(tuple(int(x) for x in r) for r in E) for E in doc["elements"]]
    except (KeyError, TypeError, ValueError):
        raise FlagError(f"{path}: expected {{'elements': [matrices]}}") from None
    out = set(gens)
    frontier = list(gens)
    while frontier:
        a = frontier.pop()
        for b in list(out):
            for p in (matmul(a, b), matmul(b, a)):
                if p not in out:
                    out.add(p)
                    frontier.append(p)
                    if len(out) > 10000:
                        raise FlagError("group file does not generate a finite group")
    return tuple(sorted(out))


def load_lambda(spec: Optional[str], d: int):
    """``None``/``delta`` or a JSON file mapping ``"b1,b2"`` to rationals."""
    if spec is None or spec == "delta":
        return None
    doc = _read_json(spec)
    try:
        return {tuple(int(x) for x in k.split(",")): Fraction(v) for k, v in doc.items()}
    except (AttributeError, ValueError):
        raise FlagError(f"{spec}: expected a JSON object of multi-index -> rational") from None


def load_bank(path):
    doc = _read_json(path)
    return fileio.bank_from_json(doc)


def _policy(flag: str) -> str:
    return "minimal" if flag == "minimal" else "product"


# ---------------------------------------------------------------------------
# commands

def cmd_design(a) -> int:
    M = parse_matrix(a.matrix)
    d = len(M)
    policy = _policy(a.generators)
    center = parse_vector(a.center, "--center") if a.center else (Fraction(0),) * d
    if len(center) != d:
        raise FlagError("--center dimension differs from --matrix")
    if a.mask:
        bank = _bank_from_tables(a, M, center, policy)
    elif a.symmetry in ("point-a", "point-b"):
        bank = design_point(M, center, a.order, a.symmetry[-1], policy,
                            load_lambda(a.lambda_, d), parse_digits(a.digits))
    elif a.symmetry == "axial":
        if d != 2:
            raise FlagError("axial symmetry needs a 2x2 matrix")
        kind = "integer" if all(x.denominator == 1 for x in center) else "semi-integer"
        bank = design_axial(M, kind, a.order, policy)
    else:
        if not a.group_file:
            raise FlagError("--symmetry group requires --group-file")
        G = load_group(a.group_file)
        bank = design_group(M, G, a.order, "minimal" if a.generators == "default" else policy,
                            parse_digits(a.digits))
    rep = verify_bank(bank, a.order)
    print(rep.summary(), file=sys.stderr)
    if not rep.ok:
        return EXIT_VERIFY
    bank.provenance["order"] = a.order
    text = fileio.dump_json(fileio.bank_to_json(bank))
    _emit(text, a.out)
    return EXIT_OK


def _bank_from_tables(a, M, center, policy):
    """Extend a given refinable mask (and optional dual) to a symmetric bank."""
    from .design import bank_from_masks
    from .dualgen import build_dual_mask
    from .lattice import pair_digits, validate_group
    try:
        m0 = fileio.load_table(a.mask)
        dual = fileio.load_table(a.dual_mask) if a.dual_mask else None
    except OSError as e:
        raise IOFailure(str(e)) from None
    except ValueError as e:
        raise FlagError(str(e)) from None
    if m0.dim != len(M):
        raise FlagError("--mask dimension differs from --matrix")
    digits = parse_digits(a.digits)
    group = None
    if a.symmetry in ("point-a", "point-b"):
        ctx, _ = pair_digits(build_context(M, digits, "minimal"), center)
    elif a.symmetry == "axial":
        ctx = build_context(M, digits)
    else:
        if not a.group_file:
            raise FlagError("--symmetry group requires --group-file")
        ctx = build_context(M, digits)
        group = validate_group(ctx, load_group(a.group_file))
    if dual is None:
        how = {"point-a": "auto", "point-b": "point-b"}.get(a.symmetry, a.symmetry)
        try:
            dual = build_dual_mask(m0, center, a.order, how, policy=policy, group=group)
        except SymwaveError:
            if how != "auto" and not _delta_rho(m0, center, a.order):
                raise
            dual = build_dual_mask(m0, center, a.order, "trivial")
    return bank_from_masks(m0, dual, ctx, a.symmetry, center, group,
                           provenance={"builder": "tables", "n": a.order})


def _delta_rho(m0, c, n) -> bool:
    from .dualgen import solve_dual_moments
    return all(v == int(not any(b)) for b, v in solve_dual_moments(m0, c, n).items())


def _emit(text: str, out: Optional[str]):
    if out:
        try:
            Path(out).write_text(text + "\n")
        except OSError as e:
            raise IOFailure(str(e)) from None
    else:
        print(text)


def _table_report(t: LaurentPoly, a) -> V.VerificationReport:
    rep = V.VerificationReport()
    d = t.dim
    rep.add(V.PropertyRecord("value_at_0", True, witness=str(t.core_moment((0,) * d)) if t.surd == 1
                             else f"{t.core_moment((0,) * d)}*sqrt({t.surd})"))
    refinable = t.surd == 1 and t.core_moment((0,) * d) == 1
    vm = V.check_vanishing_moments(t)
    # the order flag constrains vanishing moments of wavelet masks only
    rep.add(V.PropertyRecord("vanishing_moments", refinable or a.order is None or vm >= a.order, order=vm))
    if a.matrix:
        ctx = build_context(parse_matrix(a.matrix))
        if refinable:
            sr = V.sum_rule_report(t, ctx)
            rep.add(V.PropertyRecord("sum_rule", a.order is None or (sr.order or 0) >= a.order,
                                     order=sr.order, witness=sr.witness))
    kinds = [a.symmetry] if a.symmetry else (["point-a", "point-b", "axial"] if d == 2 else ["point-a", "point-b"])
    group = load_group(a.group_file) if a.group_file else None
    if group and not a.symmetry:
        kinds.append("group")
    for kind in kinds:
        if a.center is not None:
            rec = V.check_symmetry(t, V.SymmetrySpec(kind, parse_vector(a.center, "--center"), group))
            rep.add(rec)
        else:
            found = V.detect_symmetry(t, kind, group)
            rep.add(V.PropertyRecord(f"symmetry:{kind}", bool(found) or not a.symmetry,
                                     centers=[list(c) for c, _ in found]))
    return rep


def cmd_verify(a) -> int:
    path = Path(a.input)
    if path.suffix.lower() == ".json":
        bank = load_bank(path)
        n = a.order if a.order is not None else int(bank.provenance.get("order", 1))
        rep = verify_bank(bank, n)
        polys = [(f"m{nu}", t) for nu, t in enumerate(bank.masks)] + \
                [(f"dual_m{nu}", t) for nu, t in enumerate(bank.duals)]
    else:
        try:
            t = fileio.load_table(path)
        except OSError as e:
            raise IOFailure(str(e)) from None
        except ValueError as e:
            raise BankInvalid(f"{path}: {e}") from None
        rep = _table_report(t, a)
        polys = [("table", t)]
    if a.against_mask:
        try:
            ref = fileio.load_table(a.against_mask)
        except OSError as e:
            raise IOFailure(str(e)) from None
        hits = []
        for name, t in polys:
            if a.compare_up_to_scalar:
                r = V.scalar_ratio(t, ref)
                if r is not None:
                    hits.append({"mask": name, "scalar": V.format_scalar(*r)})
            elif t == ref:
                hits.append({"mask": name, "scalar": "1"})
        rep.add(V.PropertyRecord("matches_reference", bool(hits), witness=hits or None))
    out = rep.to_dict()
    print(json.dumps(out, indent=2, default=str))
    print(rep.summary(), file=sys.stderr)
    return EXIT_OK if rep.ok else EXIT_VERIFY


def _read_input_grid(path: str, d: int):
    try:
        arr = fileio.read_grid(path)
    except OSError as e:
        raise IOFailure(str(e)) from None
    except ValueError as e:
        raise IOFailure(f"{path}: {e}") from None
    if d == 1:
        arr = arr.reshape(-1)
    return arr


def _write_grid(path: Path, g, level: Optional[int] = None):
    try:
        with open(path, "w") as fh:
            fh.write(f"# origin: {','.join(map(str, g.origin))}\n")
            if g.tag != 1:
                fh.write(f"# sqrt_factor: {g.tag}\n")
            if level is not None:
                fh.write(f"# level: {level}\n")
        with open(path, "a") as fh:
            a = np.atleast_2d(g.data)
            for row in a:
                fh.write(",".join(fileio._fmt(x) for x in row) + "\n")
    except OSError as e:
        raise IOFailure(str(e)) from None


def _read_tagged_grid(path: Path, d: int):
    meta = {}
    try:
        for line in path.read_text().splitlines():
            if line.startswith("#") and ":" in line:
                k, v = line[1:].split(":", 1)
                meta[k.strip()] = v.strip()
    except OSError as e:
        raise IOFailure(str(e)) from None
    arr = _read_input_grid(str(path), d)
    origin = tuple(int(x) for x in meta.get("origin", ",".join(["0"] * d)).split(","))
    return Grid(arr, origin, int(meta.get("sqrt_factor", 1)))


def _crop(g: Grid, exact: bool) -> Grid:
    """Drop the zero padding around a reconstruction (float: below 1e-12 of the peak)."""
    if exact or g.data.size == 0:
        return g.trimmed()
    mask = np.abs(g.data) > 1e-12 * np.abs(g.data).max()
    nz = np.argwhere(mask)
    if nz.size == 0:
        return g.trimmed()
    lo, hi = nz.min(axis=0), nz.max(axis=0)
    a = tuple(o + int(x) for o, x in zip(g.origin, lo))
    b = tuple(o + int(x) for o, x in zip(g.origin, hi))
    return Grid(g.on_box(a, b), a, g.tag)


def cmd_transform(a) -> int:
    if a.mode == "bench-approx":
        return cmd_bench(a)
    bank = load_bank(a.bank)
    d = bank.dim
    exact = not a.float
    if a.mode == "synthesize":
        root = Path(a.input)
        info = _read_json(root / "pyramid.json")
        approx = _read_tagged_grid(root / "approx.csv", d)
        details = [[_read_tagged_grid(root / f"level{j}_band{nu}.csv", d) for nu in range(1, bank.m + 1)]
                   for j in range(info["levels"])]
        if not info["exact"]:
            approx.data = approx.data.astype(float)
            for row in details:
                for g in row:
                    g.data = g.data.astype(float)
        pyr = CoefficientPyramid(info["levels"], approx, details, info["exact"], info["fingerprint"])
        y = synthesize(pyr, bank)
        _write_grid(Path(a.out or "reconstruction.csv"), _crop(y, info["exact"]))
        return EXIT_OK
    arr = _read_input_grid(a.input, d)
    x = Grid.from_array(arr)
    if not exact:
        x = Grid(np.array(arr, dtype=float), x.origin)
    t0 = time.perf_counter()
    pyr = analyze(x, bank, a.levels, exact)
    if a.mode == "analyze":
        root = Path(a.out or "pyramid")
        try:
            root.mkdir(parents=True, exist_ok=True)
            (root / "pyramid.json").write_text(json.dumps(
                {"levels": a.levels, "exact": exact, "fingerprint": pyr.fingerprint, "m": bank.m}) + "\n")
        except OSError as e:
            raise IOFailure(str(e)) from None
        _write_grid(root / "approx.csv", pyr.approx)
        for j, row in enumerate(pyr.details):
            for nu, g in enumerate(row, start=1):
                _write_grid(root / f"level{j}_band{nu}.csv", g)
        return EXIT_OK
    y = synthesize(pyr, bank)
    dt = time.perf_counter() - t0
    if exact:
        ref = Grid(np.array(x.data, dtype=object), x.origin)
        ok = y.tag == 1 and grids_equal(ref, y)
        err = 0.0 if ok else max_abs_diff(ref, Grid(y.data, y.origin))
    else:
        err = max_abs_diff(x, y) / max(1e-300, float(np.max(np.abs(x.data), initial=0.0)))
        ok = err <= 1e-12
    print(json.dumps({"mode": "roundtrip", "exact": exact, "levels": a.levels, "max_error": err,
                      "ok": ok, "seconds": round(dt, 4)}))
    if a.out:
        _write_grid(Path(a.out), y)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_cascade(a) -> int:
    bank = load_bank(a.bank)
    cg = cascade(bank.masks[0], bank.ctx, a.levels, exact=a.exact)
    mass = cg.mass()
    _write_grid(Path(a.out) if a.out else Path("cascade.csv"), cg.grid, a.levels)
    print(json.dumps({"level": a.levels, "mass": str(mass), "shape": list(cg.grid.data.shape),
                      "origin": list(cg.grid.origin)}))
    ok = mass == 1 if a.exact else abs(float(mass) - 1) < 1e-9
    return EXIT_OK if ok else EXIT_VERIFY


_FUNCS = {
    "sin": lambda x: np.prod(np.sin(2 * np.pi * x), axis=-1),
    "gauss": lambda x: np.exp(-np.sum(x ** 2, axis=-1)),
}


def cmd_bench(a) -> int:
    bank = load_bank(a.bank)
    n = a.order if a.order is not None else int(bank.provenance.get("order", 2))
    levels = list(range(1, a.levels + 1))
    res = approx_order_experiment(bank, _FUNCS[a.function], levels, n)
    lines = ["level,error,ratio"]
    ratios = [float("nan")] + res.ratios
    for j, e, r in zip(res.levels, res.errors, ratios):
        lines.append(f"{j},{e:.6e},{r:.6f}")
    lines.append(f"# slope,{res.slope:.6f}")
    lines.append(f"# expected,{res.expected:.6f}")
    lines.append(f"# relative_deviation,{res.rel_error():.4f}")
    _emit("\n".join(lines), a.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symwave", description="Symmetric wavelet filter banks")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("design", help="construct and verify a filter bank")
    d.add_argument("--matrix", required=True, help='dilation matrix, e.g. "1,-2;2,-1"')
    d.add_argument("--center", help='symmetry center, e.g. "1/2,1/2"')
    d.add_argument("--order", type=int, required=True)
    d.add_argument("--symmetry", required=True, choices=["point-a", "point-b", "axial", "group"])
    d.add_argument("--group-file")
    d.add_argument("--digits", help='digit override, e.g. "0,0;0,-1;0,1"')
    d.add_argument("--lambda", dest="lambda_", default="delta")
    d.add_argument("--generators", choices=["default", "minimal"], default="default")
    d.add_argument("--mask", help="refinable mask table (CSV) to extend instead of designing one")
    d.add_argument("--dual-mask", help="dual refinable mask table (CSV); derived when omitted")
    d.add_argument("--out")
    d.set_defaults(func=cmd_design)

    v = sub.add_parser("verify", help="verify a bank file or a coefficient table")
    v.add_argument("input")
    v.add_argument("--against-mask")
    v.add_argument("--compare-up-to-scalar", action="store_true")
    v.add_argument("--matrix")
    v.add_argument("--order", type=int)
    v.add_argument("--symmetry", choices=["point-a", "point-b", "axial", "group"])
    v.add_argument("--center")
    v.add_argument("--group-file")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("transform", help="analysis, synthesis or round trip")
    t.add_argument("bank")
    t.add_argument("input", nargs="?")
    t.add_argument("--levels", type=int, default=1)
    t.add_argument("--mode", choices=["analyze", "synthesize", "roundtrip", "bench-approx"],
                   default="roundtrip")
    g = t.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=True)
    g.add_argument("--float", action="store_true")
    t.add_argument("--function", choices=sorted(_FUNCS), default="sin")
    t.add_argument("--order", type=int)
    t.add_argument("--out")
    t.set_defaults(func=cmd_transform)

    c = sub.add_parser("cascade", help="refinable function values by subdivision")
    c.add_argument("bank")
    c.add_argument("--levels", type=int, default=4)
    c.add_argument("--exact", action="store_true")
    c.add_argument("--out")
    c.set_defaults(func=cmd_cascade)

    b = sub.add_parser("bench", help="approximation-order experiment")
    b.add_argument("bank")
    b.add_argument("--levels", type=int, default=5)
    b.add_argument("--function", choices=sorted(_FUNCS), default="sin")
    b.add_argument("--order", type=int)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    p = build_parser()
    args = p.parse_args(argv)
    if getattr(args, "levels", 1) is not None and getattr(args, "levels", 1) < 1:
        p.error("--levels must be positive")
    if getattr(args, "order", None) is not None and args.order < 1:
        p.error("--order must be positive")
    if args.command == "transform" and args.mode != "bench-approx" and not args.input:
        p.error("transform needs an input grid")
    try:
        return args.func(args)
    except FlagError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FLAGS
    except (IOFailure, BankInvalid) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (VerificationFailed, NonFiniteSamples, ContextMismatch) as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except SymwaveError as e:
        # parameter errors (non-expanding matrix, incompatible group, ...)
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
