"""`gvd` command line: compute diagrams, render them, check them against the oracle."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle
from .affine_md import (MinimizationDiagram, QuadraticFunction, affine_box,
                        minimization_diagram)
from .dataset import (DataSet, ExteriorSphere, HalfSpace, PointInside, PointOutside,
                      PowerSphere)
from .errors import GVDError, InfeasibleSystemError, InvalidInputError, ParseError, UnsupportedError
from .hull import EPS_FEAS
from .lie_geometry import EPS_PRED, EuclideanPoint, OrientedPlane
from .quadric import GeneralizedDiagram, compute_diagram, locate

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2
SITE_KINDS = ("point_outside", "point_inside", "halfspace", "sphere_power", "sphere_exterior")


@dataclass(frozen=True)
class JobConfig:
    mode: str
    dimension: int
    input: Path
    output: Path | None = None
    svg: Path | None = None
    order_k: int = 1
    margin: float = 4.0
    eps: float = EPS_FEAS
    seed: int = 0
    backend: str | None = None

    def __post_init__(self):
        if self.mode not in ("extremal", "affine"):
            raise InvalidInputError(f"unknown mode {self.mode!r}")
        if self.dimension < 2:
            raise InvalidInputError("dimension must be at least 2")
        if self.svg is not None and self.dimension != 2:
            raise UnsupportedError("SVG output needs dimension 2")


# -- input -------------------------------------------------------------------

def _field(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    return obj[key]


def _vector(obj, key, where, d):
    v = _field(obj, key, where)
    if (not isinstance(v, list) or len(v) != d
            or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        raise ParseError(f"{where}: field {key!r} must be a list of {d} numbers")
    return [float(t) for t in v]


def _number(obj, key, where):
    v = _field(obj, key, where)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ParseError(f"{where}: field {key!r} must be a number")
    return float(v)


def _site(obj, i, d):
    where = f"sites[{i}]"
    kind = _field(obj, "type", where)
    sid = i + 1
    try:
        if kind == "point_outside":
            return PointOutside(EuclideanPoint(_vector(obj, "coords", where, d)), sid)
        if kind == "point_inside":
            return PointInside(EuclideanPoint(_vector(obj, "coords", where, d)), sid)
        if kind == "halfspace":
            return HalfSpace(OrientedPlane(_vector(obj, "normal", where, d),
                                           _number(obj, "height", where)), sid)
        if kind in ("sphere_power", "sphere_exterior"):
            cls = PowerSphere if kind == "sphere_power" else ExteriorSphere
            return cls(EuclideanPoint(_vector(obj, "center", where, d)),
                       _number(obj, "radius", where), sid)
    except ParseError:
        raise
    except InvalidInputError as exc:
        raise InvalidInputError(f"{where}: {exc}") from None
    raise ParseError(f"{where}: field 'type' must be one of {', '.join(SITE_KINDS)}")


def _function(obj, i, d):
    where = f"functions[{i}]"
    return QuadraticFunction(_number(obj, "a", where), _vector(obj, "q", where, d),
                             _vector(obj, "b", where, d), _number(obj, "c", where))


def parse_document(doc):
    """(mode, dimension, DataSet | function list, order_k) from parsed JSON."""
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    d = _field(doc, "dimension", "input")
    if not isinstance(d, int) or isinstance(d, bool) or d < 2:
        raise ParseError("input: field 'dimension' must be an integer >= 2")
    mode = doc.get("mode", "extremal")
    if mode == "extremal":
        sites = _field(doc, "sites", "input")
        if not isinstance(sites, list):
            raise ParseError("input: field 'sites' must be a list")
        return mode, d, DataSet(tuple(_site(s, i, d) for i, s in enumerate(sites)), d), 1
    if mode == "affine":
        fs = _field(doc, "functions", "input")
        if not isinstance(fs, list):
            raise ParseError("input: field 'functions' must be a list")
        k = doc.get("order_k", 1)
        if not isinstance(k, int) or isinstance(k, bool):
            raise ParseError("input: field 'order_k' must be an integer")
        return mode, d, [_function(f, i, d) for i, f in enumerate(fs)], k
    raise ParseError("input: field 'mode' must be 'extremal' or 'affine'")


def parse_input(path):
    """DataSet or list of QuadraticFunction read from a JSON file."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return parse_document(doc)[2]


# -- output ------------------------------------------------------------------

def _num(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize {x}")
    if x == 0.0:
        return "0.0"
    s = format(x, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def dumps(obj, indent: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {dumps(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + "  " + dumps(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    return json.dumps(obj)


def _ids(s):
    return sorted(list(t) if isinstance(t, tuple) else t for t in s)


def _end(e):
    return e if isinstance(e, str) else int(e)


def diagram_to_dict(diagram, *, seed=0, eps=EPS_FEAS) -> dict:
    if isinstance(diagram, GeneralizedDiagram):
        vertices = [{"id": i, "center": [float(t) for t in v.center], "radius": float(v.radius),
                     "tight_sites": _ids(v.tight_sites)} for i, v in enumerate(diagram.vertices)]
        edges = [{"v0": _end(e.endpoints[0]), "v1": _end(e.endpoints[1]),
                  "sites": _ids(e.defining_sites),
                  "polyline": [[float(t) for t in p] for p in e.sample_polyline]}
                 for e in diagram.edges]
        cells = _ids(diagram.cells)
        mode = "extremal"
    elif isinstance(diagram, MinimizationDiagram):
        vertices = [{"id": i, "center": [float(t) for t in v.point], "radius": 0.0,
                     "tight_sites": _ids(v.indices)} for i, v in enumerate(diagram.vertices)]
        edges = [{"v0": _end(e.endpoints[0]), "v1": _end(e.endpoints[1]),
                  "sites": _ids(e.indices), "polyline": [[float(t) for t in p] for p in e.polyline]}
                 for e in diagram.edges]
        cells = _ids(diagram.cells)
        mode = "affine"
    else:
        raise InvalidInputError("not a diagram")
    meta = {"mode": mode, "seed": int(seed),
            "epsilons": {"feas": float(eps), "pred": EPS_PRED}, "box": float(diagram.box)}
    if mode == "affine":
        meta["order_k"] = diagram.order_k
    return {"vertices": vertices, "edges": edges, "cells": cells, "meta": meta}


def emit(diagram, path=None, **meta) -> str:
    text = dumps(diagram_to_dict(diagram, **meta)) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_diagram(path) -> dict:
    """Diagram JSON back into the plain structure that `emit` wrote."""
    return json.loads(Path(path).read_text())


# -- svg ---------------------------------------------------------------------

def _clip_line(n, h, B):
    """Segment of {x : n.x = h} inside [-B, B]^2."""
    n = np.asarray(n, dtype=float)
    p0 = n * h
    t = np.array([-n[1], n[0]])
    lo, hi = -np.inf, np.inf
    for i in range(2):
        if abs(t[i]) < 1e-15:
            if abs(p0[i]) > B:
                return None
            continue
        a, b = (-B - p0[i]) / t[i], (B - p0[i]) / t[i]
        lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
    if lo > hi:
        return None
    return p0 + lo * t, p0 + hi * t


def _sites_svg(diagram, stroke):
    out = []
    if isinstance(diagram, MinimizationDiagram):
        for f in diagram.functions if diagram.order_k == 1 else ():
            out.append(f'<circle class="site point" cx="{f.q[0]:.6g}" cy="{f.q[1]:.6g}" '
                       f'r="{3 * stroke:.6g}" fill="black"/>')
        return out
    for s in diagram.site_table:
        if isinstance(s, (PointOutside, PointInside)):
            p = s.point.coords
            fill = "black" if isinstance(s, PointOutside) else "white"
            out.append(f'<circle class="site point" cx="{p[0]:.6g}" cy="{p[1]:.6g}" '
                       f'r="{3 * stroke:.6g}" fill="{fill}" stroke="black" '
                       f'stroke-width="{stroke:.6g}"/>')
        elif isinstance(s, HalfSpace):
            seg = _clip_line(s.plane.normal, s.plane.height, diagram.box)
            if seg is not None:
                (x0, y0), (x1, y1) = seg
                out.append(f'<line class="site plane" x1="{x0:.6g}" y1="{y0:.6g}" '
                           f'x2="{x1:.6g}" y2="{y1:.6g}" stroke="green" '
                           f'stroke-width="{stroke:.6g}"/>')
        else:
            q = s.center.coords
            color = "blue" if isinstance(s, PowerSphere) else "red"
            out.append(f'<circle class="site sphere" cx="{q[0]:.6g}" cy="{q[1]:.6g}" '
                       f'r="{s.radius:.6g}" fill="none" stroke="{color}" '
                       f'stroke-width="{stroke:.6g}"/>')
    return out


def render_svg(diagram, path=None) -> str:
    """Plot a planar diagram; the viewBox is the bounding box."""
    d = diagram.dimension if isinstance(diagram, GeneralizedDiagram) else diagram.functions[0].dim
    if d != 2:
        raise UnsupportedError("SVG rendering needs dimension 2")
    B = float(diagram.box)
    stroke = B / 400.0
    body = _sites_svg(diagram, stroke)
    edges = diagram.edges
    for e in edges:
        poly = e.sample_polyline if isinstance(diagram, GeneralizedDiagram) else e.polyline
        pts = " ".join(f"{x:.6g},{y:.6g}" for x, y in poly)
        body.append(f'<polyline class="edge" points="{pts}" fill="none" stroke="black" '
                    f'stroke-width="{stroke:.6g}"/>')
    for v in diagram.vertices:
        c = v.center if isinstance(diagram, GeneralizedDiagram) else v.point
        body.append(f'<circle class="vertex" cx="{c[0]:.6g}" cy="{c[1]:.6g}" '
                    f'r="{4 * stroke:.6g}" fill="orange"/>')
    text = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{-B:.6g} {-B:.6g} '
            f'{2 * B:.6g} {2 * B:.6g}">\n<g transform="scale(1,-1)">\n'
            + "\n".join(body) + "\n</g>\n</svg>\n")
    if path is not None:
        Path(path).write_text(text)
    return text


# -- commands ----------------------------------------------------------------

def compute(job: JobConfig, payload=None):
    """Diagram for a job; `payload` skips re-reading the input file."""
    if payload is None:
        payload = parse_input(job.input)
    if job.mode == "extremal":
        return compute_diagram(payload, margin=job.margin, seed=job.seed,
                               backend=job.backend, eps=job.eps)
    return minimization_diagram(payload, affine_box(payload, job.margin), order_k=job.order_k,
                                seed=job.seed, backend=job.backend, eps=job.eps)


def run(job: JobConfig, payload=None) -> int:
    try:
        diagram = compute(job, payload)
        if job.output is not None:
            emit(diagram, job.output, seed=job.seed, eps=job.eps)
        if job.svg is not None:
            render_svg(diagram, job.svg)
    except InfeasibleSystemError:
        print("gvd: empty sphere family", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GVDError, OSError) as exc:
        print(f"gvd: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _site_window(payload, mode):
    if mode == "extremal":
        pts = []
        for s in payload.sites:
            if isinstance(s, (PointOutside, PointInside)):
                pts.append(s.point.coords)
            elif isinstance(s, (PowerSphere, ExteriorSphere)):
                pts += [s.center.coords - s.radius, s.center.coords + s.radius]
            else:
                pts.append(s.plane.normal * s.plane.height)
    else:
        pts = [f.q for f in payload]
    P = np.array(pts)
    lo, hi = P.min(axis=0), P.max(axis=0)
    pad = 0.1 * max(1e-3, float(np.max(hi - lo)))
    return lo - pad, hi + pad


def verify(job: JobConfig, grid: int, payload=None) -> tuple:
    """(mismatches, compared) between engine and oracle labels on a grid."""
    if payload is None:
        payload = parse_input(job.input)
    diagram = compute(job, payload)
    lo, hi = _site_window(payload, job.mode)
    pts = oracle.GridSpec(grid, tuple(lo), tuple(hi)).points()
    bad = compared = 0
    if job.mode == "extremal":
        p = diagram.polytope
        B = diagram.box
        for x in pts:
            interval, _ = oracle.radius_interval(x, payload)
            if interval is None or interval[1] > B or interval[0] > B:
                continue
            if oracle.margin(x, payload) <= 10 * EPS_PRED:
                continue
            compared += 1
            bad += locate(x, payload, p) != oracle.label(x, payload)
    else:
        fs = list(payload)
        k = job.order_k
        for x in pts:
            v = np.sort(oracle.evaluate(fs, x))
            if len(v) > k and v[k] - v[k - 1] <= 10 * EPS_PRED * max(1.0, abs(v[k])):
                continue
            compared += 1
            want = oracle.k_smallest(x, fs, k)
            want = tuple(sorted(want)) if k > 1 else next(iter(want))
            bad += diagram.label(x) != {want}
    return bad, compared


def _job(args, mode, d, k):
    return JobConfig(mode=mode, dimension=d, input=Path(args.input),
                     output=Path(args.output) if getattr(args, "output", None) else None,
                     svg=Path(args.svg) if getattr(args, "svg", None) else None,
                     order_k=args.order_k if args.order_k is not None else k,
                     margin=args.margin, eps=args.eps, seed=args.seed, backend=args.backend)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gvd", description="Generalized Voronoi diagrams.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True)
        p.add_argument("--margin", type=float, default=4.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--eps", type=float, default=EPS_FEAS)
        p.add_argument("--order-k", type=int, default=None)
        p.add_argument("--backend", choices=("cython", "python"), default=None)

    c = sub.add_parser("compute", help="compute a diagram and write JSON (and SVG)")
    common(c)
    c.add_argument("--output", required=True)
    c.add_argument("--svg")
    v = sub.add_parser("verify", help="compare engine and oracle labels on a grid")
    common(v)
    v.add_argument("--grid", type=int, default=200)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = json.loads(Path(args.input).read_text())
        mode, d, payload, k = parse_document(doc)
        job = _job(args, mode, d, k)
    except json.JSONDecodeError as exc:
        print(f"gvd: {args.input}: not valid JSON ({exc.msg})", file=sys.stderr)
        return EXIT_INPUT
    except (GVDError, OSError) as exc:
        print(f"gvd: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "compute":
        return run(job, payload)
    try:
        bad, compared = verify(job, args.grid, payload)
    except InfeasibleSystemError:
        print("gvd: empty sphere family", file=sys.stderr)
        return EXIT_INFEASIBLE
    except GVDError as exc:
        print(f"gvd: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"mismatches: {bad} of {compared} grid points")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
