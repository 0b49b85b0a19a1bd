"""Command-line front end: ``reslab verify|resolvent|continue|spherical|residues|scan``.

Exit codes: 0 when every assertion passes, 1 on an assertion failure, 2 on usage or
input errors.  Complex numbers are written as ``[re, im]`` pairs; CSV columns split them.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .algebra_a2 import RHO_X, SpectralParam
from .contour_engine import ContourError, ResolventEngine
from .resonance import CSV_HEADER, DEFAULT_ORDER, DEFAULT_RADIUS, NORMALIZATION_NOTE, residue_record, resonance_scan, sheets_with
from .spectral_symbols import PoleProximityError, SpectralSymbol, symbol_from_config
from .spherical_eval import BasePoint, spherical_phi
from .suites import SUITES, run_suite
from .surface import (
    FmCache,
    SheetSignature,
    SurfaceError,
    SurfacePoint,
    build_atlas,
    continue_along_path,
    lift_R,
    zeta_plus,
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing

def parse_complex(text: str) -> complex:
    """``a,b`` -> a + bi.  A single number is read as real."""
    parts = [p.strip() for p in str(text).split(",")]
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"malformed complex literal {text!r}; expected 're,im'") from None
    if len(vals) == 1:
        return complex(vals[0], 0.0)
    if len(vals) != 2:
        raise UsageError(f"malformed complex literal {text!r}; expected 're,im'")
    return complex(vals[0], vals[1])


def parse_floats(text: str, count: tuple[int, ...], what: str) -> list[float]:
    try:
        vals = [float(p) for p in str(text).split(",")]
    except ValueError:
        raise UsageError(f"malformed {what} {text!r}") from None
    if len(vals) not in count:
        raise UsageError(f"{what} needs {' or '.join(map(str, count))} comma-separated numbers")
    return vals


def cjson(v: complex) -> list[float]:
    v = complex(v)
    return [v.real, v.imag]


@dataclass
class RunConfig:
    """Settings merged from ``--config`` JSON and command-line flags (flags win)."""

    symbol: dict = field(default_factory=lambda: {"family": "gaussian", "beta": 1.0, "prefactor": [[1.0, 0, 0], [0.5, 1, 0]]})
    N: int = 2
    order: int = DEFAULT_ORDER
    radius: float = DEFAULT_RADIUS
    tol: float = 1e-8
    seed: int = 0
    out: str | None = None
    fmt: str = "json"

    def build_symbol(self) -> SpectralSymbol:
        try:
            return symbol_from_config(self.symbol)
        except (ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"bad symbol configuration: {exc}") from None


def _load_json(path: str, what: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path!r} is not valid JSON: {exc}") from None


def make_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        raw = _load_json(args.config, "config file")
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in raw.items():
            if key == "format":
                key = "fmt"
            if not hasattr(cfg, key):
                raise UsageError(f"unknown config key {key!r}")
            setattr(cfg, key, val)
    if getattr(args, "symbol", None):
        sym = _load_json(args.symbol, "symbol file")
        if not isinstance(sym, dict):
            raise UsageError("symbol file must hold a JSON object")
        cfg.symbol = sym
    fam = getattr(args, "family", None)
    if fam:
        cfg.symbol = dict(cfg.symbol)
        cfg.symbol["family"] = {"A": "gaussian", "B": "spherical"}.get(fam, fam)
    if getattr(args, "y", None):
        cfg.symbol = dict(cfg.symbol)
        cfg.symbol["y"] = parse_floats(args.y, (2, 3), "base point")
    for key in ("N", "order", "tol", "seed", "out", "radius"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    if getattr(args, "format", None):
        cfg.fmt = args.format
    if cfg.order < 2:
        raise UsageError("--order must be at least 2")
    if cfg.N < 0:
        raise UsageError("--N must be non-negative")
    return cfg


# ---------------------------------------------------------------- output

def atomic_write(path: str, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file in the same directory."""
    d = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".reslab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit(cfg: RunConfig, filename: str, json_obj, csv_table=None) -> None:
    """JSON (or CSV when requested and available) to ``--out`` or stdout."""
    if cfg.fmt == "csv":
        if csv_table is None:
            raise UsageError("this command has no CSV form; use --format json")
        text = dump_csv(*csv_table)
        filename = os.path.splitext(filename)[0] + ".csv"
    else:
        text = dump_json(json_obj)
    if cfg.out:
        target = cfg.out
        if os.path.isdir(target) or target.endswith(os.sep):
            target = os.path.join(target, filename)
        atomic_write(target, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def cmd_verify(args) -> int:
    cfg = make_config(args)
    sym = cfg.build_symbol() if (args.symbol or args.config) else None
    if args.suite not in SUITES + ("all",):
        raise UsageError(f"unknown suite {args.suite!r}")
    report = run_suite(args.suite, cfg.seed, sym)
    table = (["suite", "check", "residual", "tol", "passed", "informational", "description"],
             [[c["suite"], c["name"], repr(c["residual"]), repr(c["tol"]), c["passed"], c["informational"], c["anchor"]]
              for c in report["checks"]])
    emit(cfg, f"verify_{args.suite}.json", report, table)
    for c in report["checks"]:
        tag = "info" if c["informational"] else ("PASS" if c["passed"] else "FAIL")
        print(f"[{tag}] {c['suite']}/{c['name']}: residual {c['residual']:.3e} (tol {c['tol']:.0e})", file=sys.stderr)
    return 0 if report["passed"] else 1


def _resolvent_value(eng: ResolventEngine, z: complex) -> complex:
    if z.imag > 0:
        return eng.R_upper(z)
    return eng.R_below(z)


def cmd_resolvent(args) -> int:
    cfg = make_config(args)
    sym = cfg.build_symbol()
    eng = ResolventEngine.for_symbol(sym, order=cfg.order) if args.order else ResolventEngine.for_symbol(sym)
    check = ResolventEngine.for_symbol(sym, order=max(8, eng.order * 3 // 4))
    if args.z_grid:
        g = parse_floats(args.z_grid, (6,), "z grid")
        xs = np.linspace(g[0], g[1], int(g[2]))
        ys = np.linspace(g[3], g[4], int(g[5]))
        rows = []
        for yv in ys:
            for xv in xs:
                z = complex(xv, yv)
                v = _resolvent_value(eng, z)
                rows.append([repr(z.real), repr(z.imag), repr(v.real), repr(v.imag)])
        cfg.fmt = "csv"
        emit(cfg, "resolvent_grid.csv", None, (["re_z", "im_z", "re_R", "im_R"], rows))
        return 0
    if not args.z:
        raise UsageError("resolvent needs --z re,im or --z-grid")
    z = parse_complex(args.z)
    v = _resolvent_value(eng, z)
    err = abs(v - _resolvent_value(check, z))
    branch = "upper half-plane" if z.imag > 0 else "continuation across the real axis"
    emit(cfg, "resolvent.json", {"z": cjson(z), "value": cjson(v), "err_estimate": err, "branch": branch,
                                 "normalization": NORMALIZATION_NOTE},
         (["re_z", "im_z", "re_R", "im_R", "err_estimate"], [[repr(z.real), repr(z.imag), repr(v.real), repr(v.imag), repr(err)]]))
    return 0


def _read_path(path: str) -> list[complex]:
    raw = _load_json(path, "path file")
    if isinstance(raw, dict):
        raw = raw.get("points")
    if not isinstance(raw, list) or len(raw) < 2:
        raise UsageError("path file must hold a list of at least two [re, im] points")
    out = []
    for p in raw:
        if isinstance(p, str):
            out.append(parse_complex(p))
        elif isinstance(p, (list, tuple)) and len(p) == 2:
            out.append(complex(float(p[0]), float(p[1])))
        else:
            raise UsageError(f"path entry {p!r} is not a [re, im] pair")
    return out


def cmd_continue(args) -> int:
    cfg = make_config(args)
    pts = _read_path(args.path)
    tokens = [t.strip() for t in args.start_sheet.split(",")]
    if not tokens or any(t not in ("+", "-", "+1", "-1", "1") for t in tokens):
        raise UsageError(f"bad sheet signature {args.start_sheet!r}; expected signs like +,+,-")
    sheet = SheetSignature.parse(args.start_sheet)
    N = sheet.N
    z0 = pts[0]
    start = SurfacePoint(z0, tuple(e * zeta_plus(k, z0, "right") for k, e in enumerate(sheet.eps)))
    end, trace = continue_along_path(start, pts, return_trace=True)
    with_R = args.with_resolvent
    atlas = build_atlas(N) if with_R else None
    eng = ResolventEngine.for_symbol(cfg.build_symbol()) if with_R else None
    cache = FmCache()
    rows = []
    objs = []
    for st in trace:
        p = SurfacePoint(st.z, st.zeta)
        sig = str(SheetSignature(st.eps))
        rec = {"z": cjson(p.z), "zeta": [cjson(v) for v in p.zeta], "sheet": sig}
        row = [repr(p.z.real), repr(p.z.imag), sig] + [repr(x) for v in p.zeta for x in (v.real, v.imag)]
        if with_R:
            try:
                val = lift_R(atlas, eng, p.to_scaled(), cache=cache)
                rec["R"] = cjson(val)
                row += [repr(val.real), repr(val.imag)]
            except SurfaceError as exc:
                rec["R"] = None
                rec["note"] = str(exc)
                row += ["", ""]
        objs.append(rec)
        rows.append(row)
    header = ["re_z", "im_z", "sheet"] + [f"{part}_zeta{k}" for k in range(N + 1) for part in ("re", "im")]
    if with_R:
        header += ["re_R", "im_R"]
    emit(cfg, "continue.json", {"start_sheet": str(sheet), "end_sheet": str(end.signature()), "N": N, "trace": objs},
         (header, rows))
    return 0


def cmd_spherical(args) -> int:
    cfg = make_config(args)
    lv = parse_floats(args.lam, (2, 4), "--lambda")
    if len(lv) == 2:
        lv += [0.0, 0.0]
    lam = SpectralParam(complex(lv[0], lv[2]), complex(lv[1], lv[3]))
    pv = parse_floats(args.point, (2, 3), "--point")
    try:
        y = BasePoint.from_pair(*pv) if len(pv) == 2 else BasePoint(tuple(pv))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    val = spherical_phi(lam, y, cfg.order)
    emit(cfg, "spherical.json", {"lambda": [cjson(lam.x1), cjson(lam.x2)], "point": list(y.h), "order": val.order,
                                 "value": cjson(val.value), "err_estimate": val.error_estimate},
         (["re_x1", "im_x1", "re_x2", "im_x2", "re_phi", "im_phi", "err_estimate"],
          [[repr(v) for v in (lam.x1.real, lam.x1.imag, lam.x2.real, lam.x2.imag, val.value.real, val.value.imag,
                              val.error_estimate)]]))
    return 0


def cmd_residues(args) -> int:
    cfg = make_config(args)
    sym = cfg.build_symbol()
    atlas = build_atlas(cfg.N)
    eng = ResolventEngine.for_symbol(sym)
    ns = [args.n] if args.n is not None else list(range(cfg.N + 1))
    for n in ns:
        if not 0 <= n <= cfg.N:
            raise UsageError(f"--n {n} outside 0..{cfg.N}")
    cache = FmCache()
    recs = []
    for n in ns:
        eps_list = sheets_with(n, cfg.N) if args.all_sheets else [SheetSignature.physical(cfg.N)]
        for e in eps_list:
            recs.append(residue_record(atlas, eng, n, e, cfg.radius, cfg.order, cache))
    emit(cfg, "residues.json", {"records": [r.to_dict() for r in recs], "normalization": NORMALIZATION_NOTE},
         (CSV_HEADER, [r.csv_row() for r in recs]))
    return 0


def cmd_scan(args) -> int:
    cfg = make_config(args)
    atlas = build_atlas(cfg.N)
    eng = ResolventEngine.for_symbol(cfg.build_symbol())
    rep = resonance_scan(atlas, eng, v_max=args.v_max, order=cfg.order, radius=cfg.radius, tol=cfg.tol)
    d = rep.to_dict()
    rows = [[p["n"], repr(p["z"][0]), repr(p["z"][1]), p["detected"], repr(p["pole_ratio"])] for p in d["poles"]]
    emit(cfg, "scan.json", d, (["n", "re_z", "im_z", "detected", "pole_ratio"], rows))
    return 0 if rep.clean and all(p["detected"] for p in rep.poles) else 1


# ---------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser, symbol: bool = True) -> None:
    p.add_argument("--config", help="JSON run configuration")
    if symbol:
        p.add_argument("--symbol", help="JSON symbol file")
        p.add_argument("--family", choices=["A", "B", "gaussian", "spherical"], help="symbol family override")
        p.add_argument("--y", help="base point y for family B as h1,h2")
    p.add_argument("--order", type=int, help="quadrature order")
    p.add_argument("--tol", type=float, help="assertion tolerance")
    p.add_argument("--seed", type=int, help="seed for sampled grids")
    p.add_argument("--out", help="output file or directory (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], help="output format")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reslab", description="Resolvent continuation toolkit for the rank-two symmetric space SL(3,R)/SO(3).")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=list(SUITES) + ["all"])
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("resolvent", help="evaluate the continued resolvent at z")
    p.add_argument("--z", help="point as re,im")
    p.add_argument("--z-grid", help="x0,x1,nx,y0,y1,ny; writes CSV")
    _common(p)
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("continue", help="track a point on the Riemann surface along a path")
    p.add_argument("--path", required=True, help="JSON list of [re, im] points in F units")
    p.add_argument("--start-sheet", required=True, help="sheet signature such as +,+,-")
    p.add_argument("--with-resolvent", action="store_true", help="also evaluate the lifted resolvent")
    _common(p)
    p.set_defaults(func=cmd_continue)

    p = sub.add_parser("spherical", help="evaluate a spherical function")
    p.add_argument("--lambda", dest="lam", required=True, help="x1,x2 or x1,x2,im_x1,im_x2")
    p.add_argument("--point", required=True, help="base point as h1,h2 or h1,h2,h3")
    _common(p, symbol=False)
    p.set_defaults(func=cmd_spherical)

    p = sub.add_parser("residues", help="extract residues at the branch points")
    p.add_argument("--n", type=int, help="single branch index (default: all up to N)")
    p.add_argument("--N", type=int, help="number of branch levels minus one")
    p.add_argument("--radius", type=float, help="chart circle radius")
    p.add_argument("--all-sheets", action="store_true", help="every sheet with eps_n = +1")
    _common(p)
    p.set_defaults(func=cmd_residues)

    p = sub.add_parser("scan", help="locate resonances along -i(0, v_max) rho_X")
    p.add_argument("--N", type=int)
    p.add_argument("--v-max", type=float, default=2.5)
    p.add_argument("--radius", type=float)
    _common(p)
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"reslab: error: {exc}", file=sys.stderr)
        return 2
    except PoleProximityError as exc:
        loc = getattr(exc, "location", None)
        where = f" at {loc}" if loc is not None else ""
        print(f"reslab: error: too close to a pole{where}: {exc}", file=sys.stderr)
        return 2
    except (ContourError, SurfaceError, ValueError) as exc:
        print(f"reslab: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
