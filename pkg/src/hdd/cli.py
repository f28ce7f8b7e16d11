"""Command-line interface.

Every command writes one JSON document (or an SVG for ``heatmap``) to stdout
or ``--out`` and a one-line human summary to stderr.

Exit codes: 0 success, 2 input error, 3 numeric or degeneracy error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .approx2d import ConsistencyError, median_approx
from .depth import depth_direct, depth_direct_many
from .errors import (
    DegenerateError,
    DimensionMismatch,
    HDDError,
    InvalidPointSet,
    NoCandidatesError,
    NoIntersectionsError,
    ParseError,
    SingularError,
    UnboundedError,
)
from .geometry import PointSet, bounding_square, enumerate_family
from .location2d import build_index, query_depth
from .median import median_bruteforce, median_exact

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

NUMERIC_ERRORS = (
    NoCandidatesError,
    NoIntersectionsError,
    UnboundedError,
    SingularError,
    DegenerateError,
    ConsistencyError,
)


class InputError(HDDError):
    pass


class VerificationError(HDDError):
    pass


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    format: Optional[str] = None
    dim: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None
    query: Optional[str] = None
    method: Optional[str] = None
    steps: int = 8
    resolution: int = 64
    n: int = 25
    d: int = 2
    dist: str = "uniform"
    queries: int = 10000
    verify: bool = False
    timing: bool = False


# -- input -------------------------------------------------------------------


def parse_points(text, format: str = "csv", dim: Optional[int] = None) -> PointSet:
    """Parse a CSV (one point per line) or JSON (``{"d": .., "points": [..]}``) file."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"input is not UTF-8: {e}") from None
    if format == "json":
        return _parse_json(text, dim)
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise ParseError(f"malformed number in {line!r}", lineno) from None
        if not all(math.isfinite(v) for v in row):
            raise ParseError("coordinates must be finite", lineno)
        expected = dim if dim is not None else (len(rows[0]) if rows else None)
        if expected is not None and len(row) != expected:
            raise DimensionMismatch(f"expected {expected} coordinates, got {len(row)}", lineno)
        rows.append(row)
    if not rows:
        raise InvalidPointSet("empty point set")
    return PointSet(np.array(rows), dim=len(rows[0]))


def _parse_json(text: str, dim: Optional[int]) -> PointSet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno) from None
    if not isinstance(doc, dict) or "points" not in doc:
        raise ParseError('expected an object with "d" and "points"')
    d = doc.get("d", dim)
    if dim is not None and d != dim:
        raise DimensionMismatch(f"file declares d={d}, expected {dim}")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ParseError(f'"d" must be a positive integer, got {d!r}')
    pts = doc["points"]
    if not isinstance(pts, list) or not pts:
        raise InvalidPointSet("empty point set")
    for k, row in enumerate(pts, start=1):
        if not isinstance(row, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in row
        ):
            raise ParseError(f"point {k} is not an array of numbers")
        if len(row) != d:
            raise DimensionMismatch(f"point {k} has {len(row)} coordinates, expected {d}")
    return PointSet(np.array(pts, dtype=float), dim=d)


def _load(cfg: RunConfig) -> PointSet:
    if not cfg.input:
        raise InputError("--input is required")
    path = Path(cfg.input)
    fmt = cfg.format or ("json" if path.suffix.lower() == ".json" else "csv")
    try:
        data = path.read_bytes()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    return parse_points(data, fmt, cfg.dim)


def _parse_query(text: Optional[str], d: int) -> np.ndarray:
    if not text:
        raise InputError("--query is required")
    try:
        q = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise InputError(f"malformed query {text!r}") from None
    if q.size != d or not np.all(np.isfinite(q)):
        raise InputError(f"query must have {d} finite coordinates")
    return q


def _floats(a) -> list:
    return [float(v) for v in np.asarray(a).ravel()]


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-9 * (1.0 + abs(b))


# -- commands ----------------------------------------------------------------


def run_depth(cfg: RunConfig) -> dict:
    P = _load(cfg)
    q = _parse_query(cfg.query, P.dim)
    t0 = time.perf_counter()
    H = enumerate_family(P)
    want_indexed = cfg.method == "indexed" and P.dim == 2
    report = {"n": P.n, "d": P.dim, "family_size": len(H), "query": _floats(q)}
    if want_indexed or (cfg.verify and P.dim == 2):
        idx = build_index(H)
        indexed = query_depth(idx, q)
    if want_indexed:
        value, method = indexed, "indexed"
    else:
        value, method = depth_direct(q, H), "direct"
    if cfg.verify:
        direct = depth_direct(q, H)
        report["verified"] = True
        report["direct_depth"] = direct
        if P.dim == 2:
            report["indexed_depth"] = indexed
            if not _close(indexed, direct):
                raise VerificationError(f"indexed {indexed!r} != direct {direct!r}")
    report.update(depth=value, method=method, elapsed=_elapsed(cfg, t0))
    return report


def run_median(cfg: RunConfig) -> dict:
    P = _load(cfg)
    method = cfg.method or "exact"
    t0 = time.perf_counter()
    res = median_bruteforce(P) if method == "brute" else median_exact(P)
    return {
        "point": _floats(res.point),
        "depth": res.depth,
        "method": method,
        "candidates_examined": res.candidates_examined,
        "generators": list(res.generators),
        "ties": [_floats(p) for p in res.ties],
        "error_bound": 0.0,
        "exact": True,
        "n": P.n,
        "d": P.dim,
        "elapsed": _elapsed(cfg, t0),
    }


def run_median_approx(cfg: RunConfig) -> dict:
    P = _load(cfg)
    if P.dim != 2:
        raise InputError("median-approx needs 2-d input")
    if cfg.steps < 0:
        raise InputError("--steps must be non-negative")
    t0 = time.perf_counter()
    res = median_approx(P, cfg.steps)
    return {
        "point": _floats(res.point),
        "depth": res.depth,
        "method": "approx",
        "steps": res.steps,
        "error_bound": res.error_bound,
        "exact": res.exact,
        "n": P.n,
        "d": P.dim,
        "elapsed": _elapsed(cfg, t0),
    }


def heatmap_grid(P: PointSet, resolution: int):
    """Depth at the centers of an ``R x R`` grid over the bounding square.

    Returns (cell centers x, cell centers y, depth[row, col], (origin, side));
    row 0 is the lowest y.
    """
    center, side = bounding_square(P)
    if side == 0.0:
        side = 1.0
    origin = center - side / 2.0
    step = side / resolution
    cs = (np.arange(resolution) + 0.5) * step
    xs, ys = origin[0] + cs, origin[1] + cs
    gx, gy = np.meshgrid(xs, ys)
    H = enumerate_family(P)
    depth = depth_direct_many(np.column_stack((gx.ravel(), gy.ravel())), H)
    return xs, ys, depth.reshape(resolution, resolution), (origin, side)


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def run_heatmap(cfg: RunConfig, size: int = 512) -> str:
    P = _load(cfg)
    if P.dim != 2:
        raise InputError("heatmap needs 2-d input")
    R = cfg.resolution
    if R < 2:
        raise InputError("--resolution must be at least 2")
    _, _, depth, (origin, side) = heatmap_grid(P, R)
    med = median_exact(P)
    lo, hi = float(depth.min()), float(depth.max())
    span = hi - lo
    norm = (depth - lo) / span if span > 0 else np.zeros_like(depth)
    cell = size / R

    def px(p):
        return ((p[0] - origin[0]) / side * size, size - (p[1] - origin[1]) / side * size)

    meta = {
        "resolution": R,
        "origin": _floats(origin),
        "side": side,
        "depth_min": lo,
        "depth_max": hi,
        "normalization": "affine [depth_min, depth_max] -> [0, 1], dark = low",
        "median": _floats(med.point),
        "median_depth": med.depth,
    }
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<metadata>{json.dumps(meta, sort_keys=True)}</metadata>",
        '<g id="depth" shape-rendering="crispEdges">',
    ]
    for r in range(R):
        y = size - (r + 1) * cell
        for c in range(R):
            g = int(round(255 * float(norm[r, c])))
            out.append(
                f'<rect x="{_fmt(c * cell)}" y="{_fmt(y)}" width="{_fmt(cell)}" '
                f'height="{_fmt(cell)}" fill="rgb({g},{g},{g})" data-row="{r}" data-col="{c}"/>'
            )
    out.append("</g>")
    out.append('<g id="points" fill="#d62728" stroke="white" stroke-width="1">')
    for p in P.points:
        x, y = px(p)
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="4"/>')
    out.append("</g>")
    mx, my = px(med.point)
    out.append(
        f'<g id="median" stroke="#1f77b4" stroke-width="3">'
        f'<line x1="{_fmt(mx - 8)}" y1="{_fmt(my)}" x2="{_fmt(mx + 8)}" y2="{_fmt(my)}"/>'
        f'<line x1="{_fmt(mx)}" y1="{_fmt(my - 8)}" x2="{_fmt(mx)}" y2="{_fmt(my + 8)}"/></g>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def generate_points(n: int, d: int, dist: str, seed: int) -> np.ndarray:
    if n < 1:
        raise InputError("cannot generate an empty point set (--n must be >= 1)")
    if d < 1:
        raise InputError("--d must be >= 1")
    rng = np.random.default_rng(seed)
    if dist == "uniform":
        return rng.uniform(0.0, 1.0, size=(n, d))
    if dist == "gauss":
        return rng.standard_normal(size=(n, d))
    raise InputError(f"unknown distribution {dist!r}")


def to_csv(points: np.ndarray) -> str:
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in points)


def run_gen(cfg: RunConfig) -> str:
    return to_csv(generate_points(cfg.n, cfg.d, cfg.dist, cfg.seed))


def _latency_stats(ns: np.ndarray) -> dict:
    us = ns / 1000.0
    return {
        "median_us": float(np.median(us)),
        "p95_us": float(np.percentile(us, 95)),
        "mean_us": float(np.mean(us)),
    }


def benchmark_queries(P: PointSet, queries: np.ndarray) -> dict:
    """Time index build plus per-query direct and indexed depth evaluation."""
    H = enumerate_family(P)
    t0 = time.perf_counter()
    idx = build_index(H)
    build = time.perf_counter() - t0
    clock = time.perf_counter_ns
    qs = [(float(x), float(y)) for x, y in queries]
    direct_ns = np.empty(len(qs))
    indexed_ns = np.empty(len(qs))
    direct = np.empty(len(qs))
    indexed = np.empty(len(qs))
    for k, q in enumerate(qs):
        t = clock()
        direct[k] = depth_direct(q, H)
        direct_ns[k] = clock() - t
    for k, q in enumerate(qs):
        t = clock()
        indexed[k] = query_depth(idx, q)
        indexed_ns[k] = clock() - t
    rel = np.abs(indexed - direct) / np.maximum(1.0, np.abs(direct))
    d_stats, i_stats = _latency_stats(direct_ns), _latency_stats(indexed_ns)
    return {
        "n": P.n,
        "d": P.dim,
        "lines": len(H),
        "slabs": idx.n_slabs,
        "face_count": idx.face_count,
        "queries": len(qs),
        "build_seconds": build,
        "direct": d_stats,
        "indexed": i_stats,
        "speedup_median": d_stats["median_us"] / i_stats["median_us"],
        "speedup_mean": d_stats["mean_us"] / i_stats["mean_us"],
        "max_rel_error": float(rel.max()) if rel.size else 0.0,
    }


def run_bench(cfg: RunConfig) -> dict:
    if cfg.d != 2:
        raise InputError("bench compares the planar index; --d must be 2")
    if cfg.queries < 1:
        raise InputError("--queries must be >= 1")
    P = PointSet(generate_points(cfg.n, 2, cfg.dist, cfg.seed))
    center, side = bounding_square(P)
    rng = np.random.default_rng([cfg.seed, 1])
    queries = center + (rng.uniform(-0.5, 0.5, size=(cfg.queries, 2)) * side)
    return benchmark_queries(P, queries)


def _elapsed(cfg: RunConfig, t0: float) -> Optional[float]:
    # wall time is opt-in so that reports are reproducible byte for byte
    return time.perf_counter() - t0 if cfg.timing else None


# -- argument parsing ---------------------------------------------------------


def _input_args(p: argparse.ArgumentParser):
    p.add_argument("--input", "-i", required=True, metavar="PATH", help="point file")
    p.add_argument("--format", choices=("csv", "json"), help="default: from file extension")
    p.add_argument("--dim", type=int, help="expected dimension")


def _output_args(p: argparse.ArgumentParser, timing: bool = True):
    p.add_argument("--out", "-o", metavar="PATH", help="write result here instead of stdout")
    if timing:
        p.add_argument("--timing", action="store_true", help="fill in the elapsed field")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hdd", description="Hyperplane distance depth tools")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("depth", help="depth of one query point")
    _input_args(p)
    p.add_argument("--query", "-q", required=True, help='comma separated, e.g. "0.5,0.5"')
    p.add_argument("--method", choices=("direct", "indexed"), default="direct")
    p.add_argument("--verify", action="store_true", help="cross-check direct and indexed")
    _output_args(p)

    p = sub.add_parser("median", help="exact depth median")
    _input_args(p)
    p.add_argument("--method", choices=("exact", "brute"), default="exact")
    _output_args(p)

    p = sub.add_parser("median-approx", help="approximate planar median")
    _input_args(p)
    p.add_argument("--steps", "-m", type=int, default=8, help="bisection rounds")
    _output_args(p)

    p = sub.add_parser("heatmap", help="SVG depth map over the bounding square")
    _input_args(p)
    p.add_argument("--resolution", "-r", type=int, default=64)
    _output_args(p, timing=False)

    p = sub.add_parser("gen", help="random point file")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--dist", choices=("uniform", "gauss"), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    _output_args(p, timing=False)

    p = sub.add_parser("bench", help="direct vs indexed query latency")
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--dist", choices=("uniform", "gauss"), default="uniform")
    p.add_argument("--queries", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    _output_args(p, timing=False)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fields = RunConfig.__dataclass_fields__
    return RunConfig(**{k: v for k, v in vars(ns).items() if k in fields and v is not None})


def _summary(cmd: str, result) -> str:
    if cmd == "depth":
        return f"depth = {result['depth']:.12g} ({result['method']})"
    if cmd in ("median", "median-approx"):
        pt = ", ".join(f"{v:.6g}" for v in result["point"])
        extra = "" if result["exact"] else f", error <= {result['error_bound']:.3g}"
        return f"median ({pt}) depth {result['depth']:.12g} [{result['method']}{extra}]"
    if cmd == "bench":
        rows = [
            f"{'method':<8} {'median us':>10} {'p95 us':>10}",
            f"{'direct':<8} {result['direct']['median_us']:>10.2f} {result['direct']['p95_us']:>10.2f}",
            f"{'indexed':<8} {result['indexed']['median_us']:>10.2f} {result['indexed']['p95_us']:>10.2f}",
            f"build {result['build_seconds']:.3f} s, {result['slabs']} slabs, "
            f"speedup x{result['speedup_median']:.2f}",
        ]
        return "\n".join(rows)
    return f"{cmd}: done"


COMMANDS = {
    "depth": run_depth,
    "median": run_median,
    "median-approx": run_median_approx,
    "heatmap": run_heatmap,
    "gen": run_gen,
    "bench": run_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        result = COMMANDS[cfg.command](cfg)
    except (ParseError, InvalidPointSet, InputError) as e:
        print(f"hdd {cfg.command}: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NUMERIC_ERRORS + (VerificationError,) as e:
        print(f"hdd {cfg.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    if isinstance(result, str):
        text = result
    else:
        text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if cfg.command not in ("gen", "heatmap") or cfg.out:
        print(_summary(cfg.command, result), file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
