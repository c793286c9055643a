"""Command-line front end: run the pipelines, verify certificates, export.

Integers in all JSON files are serialized as decimal strings so that no
consumer's fixed-width integer type silently truncates the dilated
coordinates; rationals (possible only in dicing output) are "p/q"."""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction

from .classic import Hyperplane, PointConfig, dicing, pulling_triangulation
from .errors import FuelExhaustedError, UnitriError
from .geometry import Polytope, hull, normalized_volume
from .kmw import kmw_pipeline
from .mixed import main_pipeline, semigroup_threshold
from .verify import verify_triangulation, verify_unimodular

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FUEL = 3
EXIT_VERIFY = 4


def _num_to_str(x) -> str:
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def _str_to_num(s):
    if isinstance(s, int):
        return s
    text = str(s)
    if "/" in text:
        num, den = text.split("/")
        f = Fraction(int(num), int(den))
        return int(f) if f.denominator == 1 else f
    return int(text)


def load_polytope(path: str) -> Polytope:
    with open(path) as fh:
        data = json.load(fh)
    verts = [tuple(_str_to_num(x) for x in v) for v in data["vertices"]]
    dim = int(data.get("dim", len(verts[0]) if verts else 0))
    for v in verts:
        if len(v) != dim:
            raise UnitriError("vertex length does not match dim")
    return hull(verts)


def triangulation_payload(dim: int, cells, meta=None) -> dict:
    """Canonical triangulation JSON: sorted vertex table, sorted cells."""
    cell_tuples = []
    for cell in cells:
        if hasattr(cell, "vertices"):
            cell_tuples.append(tuple(cell.vertices))
        else:
            cell_tuples.append(tuple(tuple(v) for v in cell))
    vertex_table = sorted({v for cell in cell_tuples for v in cell})
    vindex = {v: i for i, v in enumerate(vertex_table)}
    index_cells = sorted(
        sorted(vindex[v] for v in cell) for cell in cell_tuples
    )
    return {
        "dim": dim,
        "vertices": [[_num_to_str(x) for x in v] for v in vertex_table],
        "cells": index_cells,
        "meta": meta or {},
    }


def load_triangulation(path: str):
    with open(path) as fh:
        data = json.load(fh)
    verts = [tuple(_str_to_num(x) for x in v) for v in data["vertices"]]
    cells = [tuple(verts[i] for i in cell) for cell in data["cells"]]
    return int(data["dim"]), cells, data.get("meta", {})


def _write_json(payload, path):
    text = json.dumps(payload, indent=1, sort_keys=True)
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w") as fh:
            fh.write(text + "\n")


def _cmd_triangulate(args) -> int:
    poly = load_polytope(args.input)
    rng = random.Random(args.seed) if args.seed is not None else None
    if args.method == "pulling":
        cfg = PointConfig(tuple(sorted(poly.vertices)))
        if rng is None:
            sub = pulling_triangulation(cfg, fuel=args.fuel)
        else:
            from .classic import pulling_family
            from .rewrite import normalize

            term = normalize(cfg, pulling_family(), fuel=args.fuel, rng=rng)
            sub = None
            cells = [c.points for c in term.values()]
            payload = triangulation_payload(
                poly.ambient_dim, cells, {"method": "pulling",
                                          "seed": args.seed})
            _write_json(payload, args.output)
            return EXIT_OK
        cells = [c.points for c in sub.max_cells]
        meta = {"method": "pulling"}
    else:
        if not args.hyperplanes:
            print("dicing needs --hyperplanes", file=sys.stderr)
            return EXIT_PARSE
        with open(args.hyperplanes) as fh:
            hdata = json.load(fh)
        planes = [
            Hyperplane(tuple(_str_to_num(x) for x in h["normal"]),
                       _str_to_num(h["offset"]))
            for h in hdata
        ]
        sub = dicing(poly, planes, fuel=args.fuel)
        cells = [c.vertices for c in sub.max_cells]
        meta = {"method": "dicing", "hyperplanes": len(planes)}
    payload = triangulation_payload(poly.ambient_dim, cells, meta)
    _write_json(payload, args.output)
    return EXIT_OK


def _cmd_kmw(args) -> int:
    poly = load_polytope(args.input)
    try:
        res = kmw_pipeline(poly, fuel=args.fuel, dim_cap=args.dim_cap)
    except FuelExhaustedError as exc:
        print(f"fuel exhausted: {exc}", file=sys.stderr)
        return EXIT_FUEL
    cells = [s.vertices for s in res.simplices]
    target = poly.dilate(res.dilation)
    rep = verify_triangulation(target, cells)
    rep_u = verify_unimodular(cells)
    if not (rep.ok and rep_u.ok):
        print(rep.summary(), file=sys.stderr)
        print(rep_u.summary(), file=sys.stderr)
        return EXIT_VERIFY
    payload = {
        "N": res.rounds,
        "dilation": _num_to_str(res.dilation),
        "lattice_trace": [[_num_to_str(i) for i in row]
                          for row in res.lattice_trace],
        "triangulation": triangulation_payload(
            poly.ambient_dim, cells,
            {"pipeline": "kmw", "N": res.rounds,
             "dilation": _num_to_str(res.dilation)},
        ),
    }
    _write_json(payload, args.output)
    return EXIT_OK


def _parse_pairs(text: str):
    out = []
    for chunk in text.replace("(", "").replace(")", "").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        r, s = chunk.split(",")
        out.append((int(r), int(s)))
    if not out:
        raise UnitriError("no (r, s) pairs given")
    return out


def _cmd_dilate_family(args) -> int:
    poly = load_polytope(args.input)
    pairs = _parse_pairs(args.pairs)
    try:
        fam = main_pipeline(poly, c=args.c, fuel=args.fuel,
                            dim_cap=args.dim_cap,
                            fine_start=args.fine_start)
    except FuelExhaustedError as exc:
        print(f"fuel exhausted: {exc}", file=sys.stderr)
        return EXIT_FUEL
    c_n, d_n = fam.pair
    summary = {
        "N": fam.rounds,
        "c": _num_to_str(fam.c),
        "pair": [_num_to_str(c_n), _num_to_str(d_n)],
        "lattice_trace": [[_num_to_str(i) for i in row]
                          for row in fam.lattice_trace],
        "triangulations": {},
    }
    from math import gcd

    if gcd(c_n, d_n) == 1:
        summary["semigroup_threshold"] = _num_to_str(
            semigroup_threshold(c_n, d_n))
    for r, s in pairs:
        cells = [t.vertices for t in fam.triangulation(r, s)]
        m = r * c_n + s * d_n
        target = fam.polytope.dilate(m)
        rep = verify_triangulation(target, cells)
        rep_u = verify_unimodular(cells)
        if not (rep.ok and rep_u.ok):
            print(rep.summary(), file=sys.stderr)
            print(rep_u.summary(), file=sys.stderr)
            return EXIT_VERIFY
        path = f"{args.out_prefix}_{r}_{s}.json"
        _write_json(
            triangulation_payload(
                poly.ambient_dim, cells,
                {"pipeline": "dilate-family", "r": r, "s": s,
                 "m": _num_to_str(m)},
            ),
            path,
        )
        summary["triangulations"][f"{r},{s}"] = path
    _write_json(summary, args.output)
    return EXIT_OK


def _cmd_verify(args) -> int:
    dim, cells, meta = load_triangulation(args.input)
    reports = {}
    ok = True
    if args.against:
        poly = load_polytope(args.against)
        rep = verify_triangulation(poly, cells)
        reports["triangulation"] = {
            "ok": rep.ok,
            "checked": rep.checked,
            "violations": [list(v) for v in rep.violations],
        }
        ok = ok and rep.ok
    if args.unimodular or not args.against:
        rep_u = verify_unimodular(cells)
        reports["unimodular"] = {
            "ok": rep_u.ok,
            "checked": rep_u.checked,
            "violations": [list(v) for v in rep_u.violations],
        }
        ok = ok and rep_u.ok
    _write_json({"ok": ok, "reports": reports}, args.output)
    return EXIT_OK if ok else EXIT_VERIFY


def _cmd_export(args) -> int:
    dim, cells, meta = load_triangulation(args.input)
    if args.format == "json":
        _write_json(triangulation_payload(dim, cells, meta), args.output)
        return EXIT_OK
    if dim not in (2, 3):
        print("OFF export supports dim 2 and 3", file=sys.stderr)
        return EXIT_PARSE
    vertex_table = sorted({v for cell in cells for v in cell})
    vindex = {v: i for i, v in enumerate(vertex_table)}
    faces = set()
    for cell in cells:
        if dim == 2:
            faces.add(tuple(sorted(vindex[v] for v in cell)))
        else:
            for i in range(len(cell)):
                tri = tuple(sorted(
                    vindex[v] for j, v in enumerate(cell) if j != i
                ))
                faces.add(tri)
    lines = ["OFF", f"{len(vertex_table)} {len(faces)} 0"]
    for v in vertex_table:
        coords = [str(float(Fraction(x))) for x in v]
        while len(coords) < 3:
            coords.append("0.0")
        lines.append(" ".join(coords))
    for f in sorted(faces):
        lines.append(f"{len(f)} " + " ".join(str(i) for i in f))
    text = "\n".join(lines) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="unitri",
        description="Exact unimodular triangulations of dilated lattice"
                    " polytopes",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--fuel", type=int, default=10 ** 6)
        p.add_argument("--dim-cap", type=int, default=3)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--deterministic", action="store_true", default=True)
        p.add_argument("--verbose-trace", action="store_true")
        p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("triangulate", help="pulling or dicing subdivision")
    p.add_argument("input")
    p.add_argument("--method", choices=["pulling", "dicing"],
                   default="pulling")
    p.add_argument("--hyperplanes", default=None)
    common(p)
    p.set_defaults(func=_cmd_triangulate)

    p = sub.add_parser("kmw", help="factorial-dilation pipeline")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=_cmd_kmw)

    p = sub.add_parser("dilate-family",
                       help="two-constant dilation family pipeline")
    p.add_argument("input")
    p.add_argument("--c", type=int, default=None)
    p.add_argument("--pairs", default="(1,0);(0,1);(1,1)")
    p.add_argument("--fine-start", action="store_true")
    p.add_argument("--out-prefix", default="triangulation")
    common(p)
    p.set_defaults(func=_cmd_dilate_family)

    p = sub.add_parser("verify", help="check a triangulation certificate")
    p.add_argument("input")
    p.add_argument("--against", default=None)
    p.add_argument("--unimodular", action="store_true")
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("export", help="convert a certificate for viewing")
    p.add_argument("input")
    p.add_argument("--format", choices=["off", "json"], default="off")
    common(p)
    p.set_defaults(func=_cmd_export)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (UnitriError, OSError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
