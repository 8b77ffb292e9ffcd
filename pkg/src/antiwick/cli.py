"""Command-line runner: ``antiwick identities|heat|bench``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 on a
configuration error. Reports are JSON (sorted keys, no timestamps) or CSV.
"""
import argparse
import csv
from dataclasses import asdict, dataclass
from fractions import Fraction
import io
import json
import math
import sys
import time

import numpy as np

from . import _kernels
from . import chaos as C
from . import suites
from .basis import make_uniform_grid, indicator, unit, zero
from .heat import (
    McConfig,
    Poly1D,
    entire_data,
    example41_check,
    heat_solution_poly,
    heat_solution_quadrature,
    mc_pairing_check,
    theorem42_check,
    theorem43_check,
    TAYLOR_DEGREE,
)
from .malliavin import iterated_pairing
from .products import anti_wick_gamma, anti_wick_series


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    m: int = 8
    N: int = 12
    T: float = 1.0
    seed: int = 42
    samples: int = 100_000
    tolerance: float = 1e-9
    output: str = None
    format: str = "json"

    def __post_init__(self):
        if not 1 <= self.m <= C.MAX_MODES:
            raise ConfigError(f"grid size must be in [1, {C.MAX_MODES}], got {self.m}")
        if not 0 <= self.N <= C.MAX_ORDER:
            raise ConfigError(f"order must be in [0, {C.MAX_ORDER}], got {self.N}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigError(f"horizon must be positive, got {self.T}")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not self.tolerance >= 0:
            raise ConfigError("tolerance must be >= 0")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format}")

    def to_dict(self):
        d = asdict(self)
        d.pop("output")
        return d


# -- output -----------------------------------------------------------------

def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return _finite(obj.item())
    return obj


def render_report(command, cfg, results, extra=None):
    records = sorted((r.to_dict() for r in results), key=lambda d: d["check"])
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "params", "lhs", "rhs", "residual", "sigma", "pass"])
        for d in records:
            w.writerow([
                d["check"],
                json.dumps(_finite(d["params"]), sort_keys=True),
                repr(d["lhs"]),
                repr(d["rhs"]),
                repr(d["residual"]),
                "" if d["sigma"] is None else repr(d["sigma"]),
                "true" if d["pass"] else "false",
            ])
        return buf.getvalue()
    report = {
        "command": command,
        "config": cfg.to_dict(),
        "results": records,
        "all_pass": all(d["pass"] for d in records),
    }
    if extra:
        report.update(extra)
    return json.dumps(_finite(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


# -- subcommands ------------------------------------------------------------

def cmd_identities(cfg):
    if cfg.m < 2:
        raise ConfigError("identities need at least two grid cells")
    results = suites.identities(cfg.m, cfg.N, cfg.T, cfg.seed, cfg.samples, cfg.tolerance)
    _write(render_report("identities", cfg, results), cfg.output)
    return 0 if all(r.passed for r in results) else 1


def parse_function(spec):
    """``monomial:k``, ``poly:c0,c1,...``, ``cos``, ``sin`` or ``exp``."""
    spec = spec.strip()
    if spec.startswith("monomial:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad monomial degree in {spec!r}") from None
        if k < 0:
            raise ConfigError("monomial degree must be >= 0")
        return Poly1D.monomial(k)
    if spec.startswith("poly:"):
        try:
            return Poly1D([float(c) for c in spec.split(":", 1)[1].split(",")])
        except ValueError:
            raise ConfigError(f"bad polynomial coefficients in {spec!r}") from None
    if spec in ("cos", "sin", "exp"):
        return entire_data(spec)
    raise ConfigError(f"unknown function spec {spec!r}")


def grid_for_times(T, times, m=None, minimum=1):
    """``m`` if every time is a node of it, else the smallest grid that makes them nodes."""
    for t in times:
        if not 0 <= t <= T:
            raise ConfigError(f"t={t} outside [0, {T}]")
    if m is not None and m >= minimum:
        grid = make_uniform_grid(T, m)
        if all(grid.is_node(t) for t in times):
            return grid
    fracs = [Fraction(t / T).limit_denominator(10**6) for t in times]
    need = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    size = need * -(-minimum // need)
    if size > C.MAX_MODES:
        raise ConfigError(f"times {times} need a grid of {size} cells (max {C.MAX_MODES})")
    grid = make_uniform_grid(T, size)
    if not all(grid.is_node(t) for t in times):
        raise ConfigError(f"no uniform grid with at most {C.MAX_MODES} cells has {times} as nodes")
    return grid


def emit_curve(path, f, times, xs):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x", "u"])
    for t in times:
        if isinstance(f, Poly1D):
            u = heat_solution_poly(f, t)(xs)
        elif t == 0:
            u = f.func(xs)
        else:
            u = heat_solution_quadrature(f.func, t, xs)
        for x, v in zip(xs, np.atleast_1d(u)):
            w.writerow([repr(float(t)), repr(float(x)), repr(float(v))])
    _write(buf.getvalue(), path)


def cmd_heat(cfg, f_spec, t_list, g_spec="monomial:1", curve=None):
    f = parse_function(f_spec)
    results = []
    if isinstance(f, Poly1D):
        g = parse_function(g_spec)
        if not isinstance(g, Poly1D):
            raise ConfigError("the second datum must be polynomial")
        grid = grid_for_times(cfg.T, t_list, cfg.m)
        for t in t_list:
            results.append(theorem42_check(f, grid, t, cfg.N, cfg.tolerance))
            results.append(theorem43_check(f, g, grid, t, cfg.N, cfg.tolerance))
            r = example41_check(indicator(grid, t), cfg.N)
            r.params["t"] = t
            results.append(r)
    else:
        # degree-16 compositions stay small only on the coarsest admissible grid
        grid = grid_for_times(cfg.T, t_list, None, minimum=2)
        mc = McConfig(samples=cfg.samples, seed=cfg.seed)
        hs = [("0", zero(grid)), ("e0", unit(grid, 0)), ("e0+e1", unit(grid, 0) + unit(grid, 1))]
        for t in t_list:
            for label, h in hs:
                r = mc_pairing_check(f, grid, t, h, mc, N=TAYLOR_DEGREE)
                r.params["h_label"] = label
                results.append(r)
    results.sort(key=lambda r: (r.check, r.params["t"], r.params.get("h_label", "")))
    _write(render_report("heat", cfg, results, {"f": f_spec, "times": list(t_list)}), cfg.output)
    if curve:
        emit_curve(curve, f, t_list, np.linspace(-3.0, 3.0, 61))
    return 0 if all(r.passed for r in results) else 1


BENCH_OPS = {
    "pointwise": C.pointwise_product,
    "wick": C.wick_product,
    "anti_wick_gamma": anti_wick_gamma,
    "anti_wick_series": anti_wick_series,
    "pairing_1": lambda X, Y: iterated_pairing(X, Y, 1),
    "pairing_2": lambda X, Y: iterated_pairing(X, Y, 2),
}


def bench_rows(cfg, repeats=3, terms=16):
    """Timing rows ``(m, N, op, nanos, nnz)``; nanos is the best of ``repeats``."""
    ms = sorted({m for m in (2, 4, cfg.m) if m <= cfg.m})
    Ns = sorted({n for n in (4, 8, cfg.N) if n <= cfg.N})
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for m in ms:
        for N in Ns:
            X = C.random_chaos(rng, m, N, N // 2, terms=terms)
            Y = C.random_chaos(rng, m, N, N // 2, terms=terms)
            for op, fn in BENCH_OPS.items():
                best = None
                for _ in range(repeats):
                    t0 = time.perf_counter_ns()
                    out = fn(X, Y)
                    dt = time.perf_counter_ns() - t0
                    best = dt if best is None else min(best, dt)
                rows.append((m, N, op, best, out.nnz))
    return rows


def cmd_bench(cfg):
    rows = bench_rows(cfg)
    if cfg.format == "json":
        text = json.dumps(
            {"backend": _kernels.BACKEND,
             "rows": [dict(zip(("m", "N", "op", "nanos", "nnz"), r)) for r in rows]},
            indent=2, sort_keys=True,
        ) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "N", "op", "nanos", "nnz"])
        w.writerows(rows)
        text = buf.getvalue()
    _write(text, cfg.output)
    return 0


# -- argument parsing -------------------------------------------------------

def _times(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad time list {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", "--grid-size", type=int, default=8)
    common.add_argument("-N", "--order", type=int, default=12)
    common.add_argument("-T", "--horizon", type=float, default=1.0)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("-o", "--output", default=None, help="report path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    parser = argparse.ArgumentParser(prog="antiwick", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("identities", parents=[common], help="product identities on random chaos vectors")
    heat = sub.add_parser("heat", parents=[common], help="heat-equation representation checks")
    heat.add_argument("--f", dest="f_spec", default="monomial:2",
                      help="monomial:k, poly:c0,c1,..., cos, sin or exp")
    heat.add_argument("--g", dest="g_spec", default="monomial:1", help="second polynomial datum")
    heat.add_argument("-t", "--times", type=_times, default=[0.5], help="comma-separated grid nodes")
    heat.add_argument("--emit-curve", metavar="PATH", default=None,
                      help="write sampled (t, x, u) rows as CSV ('-' for stdout)")
    sub.add_parser("bench", parents=[common], help="time the product kernels")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    fmt = args.format or ("csv" if args.command == "bench" else "json")
    try:
        cfg = RunConfig(
            m=args.grid_size,
            N=args.order,
            T=args.horizon,
            seed=args.seed,
            samples=args.samples,
            tolerance=args.tolerance,
            output=args.output,
            format=fmt,
        )
        if args.command == "identities":
            return cmd_identities(cfg)
        if args.command == "heat":
            return cmd_heat(cfg, args.f_spec, args.times, args.g_spec, args.emit_curve)
        return cmd_bench(cfg)
    except ConfigError as exc:
        print(f"antiwick: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
