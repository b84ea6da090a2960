"""Command-line interface: one subcommand per verification, plus ``verify-all``.

Every table starts with a ``schema=`` header carrying the metadata (seed,
samples, sizes) needed to re-derive its rows. Output is a deterministic function
of the arguments; the only wall-clock fields are the ``wall_time``/``seconds``
columns, which ``--no-timing`` blanks for byte-identical reruns.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

SCHEMA_VERSION = 1

GLOBAL_DEFAULTS = {"seed": 1, "threads": 1, "format": None, "out": None, "no_timing": False}


@dataclass
class Table:
    kind: str
    columns: list[str]
    rows: list[list]
    meta: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)   # JSON-only payload (fits, diagnostics)

    @property
    def schema(self) -> str:
        return f"bpreduce.{self.kind}/{SCHEMA_VERSION}"


def _fmt(x) -> str:
    if isinstance(x, np.generic):
        x = x.item()
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _header_line(schema: str, meta: dict) -> str:
    parts = [f"schema={schema}", f"version={__version__}"]
    parts += [f"{k}={_fmt(v)}" for k, v in meta.items()]
    return "# " + " ".join(parts)


def render(table: Table, fmt: str) -> str:
    from .acceptance import to_jsonable

    if fmt == "csv":
        buf = io.StringIO()
        buf.write(_header_line(table.schema, table.meta) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(x) for x in row])
        return buf.getvalue()
    if fmt == "json":
        doc = {"schema": table.schema, "version": __version__, "meta": table.meta,
               "columns": table.columns, "rows": table.rows}
        doc.update(table.extra)
        return json.dumps(to_jsonable(doc), indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


PLOT_SCHEMAS = {
    "crossover": ["s", "numeric", "airy", "rel_err"],
    "ratio": ["inv_N", "r_N", "fit"],
    "lattice": ["N", "c_N"],
}


def emit_plot_data(rows, kind: str, path, meta: dict | None = None) -> Path:
    """Write plotting data as CSV with a schema header; no rendering is done here."""
    if kind not in PLOT_SCHEMAS:
        raise ValueError(f"unknown plot kind {kind!r}; known: {sorted(PLOT_SCHEMAS)}")
    table = Table(f"plot.{kind}", PLOT_SCHEMAS[kind], [list(r) for r in rows], dict(meta or {}))
    path = Path(path)
    path.write_text(render(table, "csv"))
    return path


# -- argument helpers --------------------------------------------------------

def parse_range(text: str) -> tuple[float, float, int]:
    try:
        a, b, n = text.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    if n < 1 or (n > 1 and not b > a):
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return a, b, n


def grid_points(rng: tuple[float, float, int]) -> list[float]:
    a, b, n = rng
    if n == 1:
        return [a]
    return [a + (b - a) * k / (n - 1) for k in range(n)]


def parse_float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def read_config(path) -> dict:
    """``key=value`` lines; ``#`` starts a comment; keys may use dashes or underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


# -- subcommands ---------------------------------------------------------------

def cmd_enumerate_lattice(a) -> Table:
    from .lattice_enum import count_series

    t0 = time.perf_counter()
    counts, trees = count_series(a.dim, a.nmax, threads=a.threads, backend=a.backend)
    wall = None if a.no_timing else round(time.perf_counter() - t0, 3)
    from . import kernels

    backend = a.backend or kernels.BACKEND
    rows = [[n, counts[n - 1], trees[n - 1], wall] for n in range(1, a.nmax + 1)]
    t = Table("lattice", ["N", "animal_count", "c_N", "wall_time"], rows,
              {"dim": a.dim, "nmax": a.nmax, "backend": backend})
    if a.plot_data:
        emit_plot_data([[n, trees[n - 1]] for n in range(1, a.nmax + 1)], "lattice", a.plot_data, t.meta)
    return t


def cmd_continuum_coeffs(a) -> Table:
    from .continuum_mc import (PotentialSpec, continuum_coefficient, d0_gas_coefficients,
                               exact_continuum_coefficient, soft_coefficient)

    if a.soft:
        pot = PotentialSpec.soft(a.soft, a.beta)
        targets = d0_gas_coefficients(pot.q, a.nmax) if a.dim == 2 else [None] * a.nmax
    else:
        pot = PotentialSpec.hard()
        targets = [exact_continuum_coefficient(a.dim, n) for n in range(1, a.nmax + 1)]
    rows = []
    for n in range(1, a.nmax + 1):
        if a.soft:
            est = soft_coefficient(a.dim, n, pot, a.samples, a.seed, a.threads)
        else:
            est = continuum_coefficient(a.dim, n, a.samples, a.seed, a.threads)
        target = targets[n - 1]
        rows.append([n, est.mean, est.standard_error, target, None if target is None else est.pull(target)])
    meta = {"dim": a.dim, "nmax": a.nmax, "samples_per_tree": a.samples, "seed": a.seed,
            "potential": pot.name}
    if a.soft:
        meta["beta"] = a.beta
    return Table("continuum", ["N", "estimate", "stderr", "exact_target", "pull"], rows, meta)


def cmd_hardrod_pressure(a) -> Table:
    from .hardcore_exact import hardrod_logZ, hardrod_pressure, richardson_pressure

    target = hardrod_pressure(a.z)
    rows = []
    for L in a.L:
        val = hardrod_logZ(a.z, L) / L
        rows.append([_fmt(L), val, target, abs(val - target)])
    if len(a.L) >= 2:
        r = richardson_pressure(a.z, a.L)
        rows.append(["richardson", r, target, abs(r - target)])
    return Table("hardrod", ["L", "logZ_over_L", "target", "gap"], rows, {"z": a.z})


def cmd_d0_check(a) -> Table:
    if a.soft:
        from .continuum_mc import PotentialSpec, dimensional_reduction_check_d0

        pot = PotentialSpec.soft(a.soft, a.beta)
        res = dimensional_reduction_check_d0(pot, a.nmax, a.samples, a.seed, a.threads)
        rows = [[r["N"], r["estimate"], r["stderr"], r["target"], r["pull"]] for r in res]
        return Table("d0-soft", ["N", "estimate", "stderr", "target", "pull"], rows,
                     {"potential": a.soft, "beta": a.beta, "q": pot.q, "samples_per_tree": a.samples,
                      "seed": a.seed})
    from .hardcore_exact import d0_identity_check

    rows = []
    for z in grid_points(a.z_grid):
        r = d0_identity_check(z)
        rows.append([z, r["lhs"], r["rhs"], r["rel_error"]])
    return Table("d0", ["z", "log1p_z", "minus_2pi_zbp", "rel_error"], rows,
                 {"grid": ":".join(_fmt(x) for x in a.z_grid)})


def cmd_check_tables(a) -> Table:
    from .hardcore_exact import exponent_table_check

    res = exponent_table_check()
    rows = [[r["relation"], r["row"], r["status"], r.get("lhs"), r.get("rhs"), r.get("defect")]
            for r in res["relations"]]
    return Table("tables", ["relation", "row", "status", "lhs", "rhs", "defect"], rows,
                 {"checked": res["checked"], "skipped": res["skipped"], "passed": res["passed"]})


def cmd_k_functions(a) -> Table:
    from .scaling_functions import K_HC_D1, k_bp_d3, k_transform

    rows = []
    for x in grid_points(a.grid):
        tr = k_transform(K_HC_D1, 1, -1, x, a.mode)
        ex = k_bp_d3(x)
        rows.append([x, K_HC_D1(x), tr, ex, abs(tr - ex)])
    return Table("k-functions", ["x", "K_HC", "K_BP_transform", "K_BP_exact", "error"], rows,
                 {"mode": a.mode, "D": 1, "eta": -1})


def cmd_verify_forest_root(a) -> Table:
    import random

    from .forest_root import DualCoefficients, matrix_forest_identity

    rng = random.Random(a.seed)
    rows = []
    for k in range(a.trials):
        lhs, rhs, eq = matrix_forest_identity(DualCoefficients.random_rational(a.n, rng))
        rows.append([k, a.n, str(lhs), str(rhs), eq])
    passed = sum(r[4] for r in rows)
    return Table("forest-root", ["trial", "n", "det_A", "forest_sum", "equal"], rows,
                 {"n": a.n, "trials": a.trials, "seed": a.seed, "passed": passed,
                  "all_equal": passed == a.trials})


def cmd_crossover_scan(a) -> Table:
    from . import crossover as cx

    s_vals = grid_points(a.s_range)
    numeric = cx.singular_scan(a.v, s_vals)
    b0, b1 = cx.B0_THEORY, cx.B1_THEORY
    extra = {}
    if a.fit_constants:
        fit = cx.fit_constants(a.v, s_vals, numeric)
        b0, b1 = fit["b0"], fit["b1"]
        extra["fit"] = {"b0": b0, "b1": b1, "max_rel_residual": fit["max_rel_residual"]}
    rows = []
    for s, num in zip(s_vals, numeric):
        try:
            model = a.v ** (1.0 / 3.0) * cx.airy_scaling_F(s, b0, b1)
            rel = abs(model / num - 1.0) if num else None
        except ValueError:          # at or beyond the pole
            model, rel = None, None
        rows.append([s, float(num), model, rel])
    t = Table("crossover", ["s", "numeric", "airy_form", "rel_error"], rows,
              {"v": a.v, "b0": b0, "b1": b1, "fitted": bool(a.fit_constants)}, extra)
    if a.plot_data:
        emit_plot_data(rows, "crossover", a.plot_data, t.meta)
    return t


def _read_series_file(path) -> list:
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.replace(",", " ").split()[-1]
        vals.append(int(tok) if tok.lstrip("-").isdigit() else float(tok))
    return vals


def cmd_series_analyze(a) -> Table:
    from .series_analysis import (SeriesCoefficients, exact_continuum_series, lattice_theta_estimate,
                                  ratio_estimate)

    if a.source == "lattice":
        rep = lattice_theta_estimate(a.dim, a.nmax, threads=a.threads)
        mu, theta, diag = rep["mu"], rep["theta"], rep["diagnostics"]
        extra = {k: rep[k] for k in ("theta_band", "mu_band", "mu_stability", "sensitivity",
                                     "sensitivity_theta_band", "theta_table", "gate", "passed")}
    else:
        if a.source == "continuum":
            series = exact_continuum_series(a.dim, a.nmax)
        else:
            if not a.file:
                raise SystemExit("--source file needs --file PATH")
            series = SeriesCoefficients.from_values(_read_series_file(a.file)[: a.nmax])
        mu, theta, diag = ratio_estimate(series, order=a.order)
        extra = {"theta_band": diag["theta_band"], "mu_band": diag["mu_band"],
                 "mu_stability": diag.get("mu_stability")}
    extra.update({"mu": mu, "theta": theta, "windows": diag["windows"], "residuals": diag["residuals"]})
    plot = diag["plot"]
    rows = [list(r) for r in zip(plot["inv_N"], plot["r_N"], plot["fit"])]
    t = Table("series", ["inv_N", "r_N", "fit"], rows,
              {"source": a.source, "dim": a.dim, "nmax": a.nmax, "order": diag["order"]}, extra)
    if a.plot_data:
        emit_plot_data(rows, "ratio", a.plot_data, t.meta)
    return t


def cmd_verify_all(a) -> dict:
    from .acceptance import verify_all

    def progress(e):
        if not a.quiet:
            print(f"[{e['status']:>5}] criterion {e['id']:>2}: {e['name']}", file=sys.stderr)

    return verify_all(a.budget, seed=a.seed, threads=a.threads, timing=not a.no_timing,
                      only=a.only, progress=progress)


# -- parser ------------------------------------------------------------------

def _global_options(p: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d, help="global RNG seed (default 1)")
    p.add_argument("--threads", type=int, default=d, help="worker threads; affects wall time only")
    p.add_argument("--format", choices=("csv", "json"), default=d, help="output format")
    p.add_argument("--out", default=d, help="write output here instead of stdout")
    p.add_argument("--config", default=d, help="key=value file mirroring the flags (flags win)")
    p.add_argument("--no-timing", action="store_const", const=True, default=d,
                   help="blank wall-time fields so reruns are byte-identical")


SUBCOMMANDS = {}


def _sub(subs, name, func, help_, default_format="csv"):
    p = subs.add_parser(name, help=help_, description=help_)
    _global_options(p, suppress=True)
    p.set_defaults(func=func, default_format=default_format)
    SUBCOMMANDS[name] = p
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpreduce", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bpreduce {__version__}")
    _global_options(parser, suppress=False)
    subs = parser.add_subparsers(dest="command", required=True)

    p = _sub(subs, "enumerate-lattice", cmd_enumerate_lattice, "exact lattice branched-polymer counts c_N")
    p.add_argument("--dim", type=int, choices=(2, 3), default=None)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--backend", choices=("cython", "python"), default=None)
    p.add_argument("--plot-data", default=None, help="also write (N, c_N) plot data here")

    p = _sub(subs, "continuum-coeffs", cmd_continuum_coeffs, "Monte-Carlo continuum polymer coefficients a_N")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--samples", type=int, default=None, help="samples per labeled tree")
    p.add_argument("--soft", default=None, help="soft potential name (exp, inv2, gauss2)")
    p.add_argument("--beta", type=float, default=None)

    p = _sub(subs, "hardrod-pressure", cmd_hardrod_pressure, "hard-rod logZ/L against -T(-z)")
    p.add_argument("--z", type=float, default=None)
    p.add_argument("--L", type=parse_float_list, default=None, help="comma-separated lengths")

    p = _sub(subs, "d0-check", cmd_d0_check, "zero-dimensional identities (exact, or MC with --soft)")
    p.add_argument("--z-grid", type=parse_range, default=None, help="a:b:n grid for log(1+z); use --z-grid=-0.5:2:4 for negative a")
    p.add_argument("--soft", default=None, help="run the soft-polymer reduction with this potential")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)

    _sub(subs, "check-tables", cmd_check_tables, "exact exponent-relation check of both tables")

    p = _sub(subs, "k-functions", cmd_k_functions, "gas-to-polymer scaling-function transform")
    p.add_argument("--grid", type=parse_range, default=None)
    p.add_argument("--mode", choices=("analytic", "fd"), default=None)

    p = _sub(subs, "verify-forest-root", cmd_verify_forest_root, "matrix-forest identity on random rationals")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)

    p = _sub(subs, "crossover-scan", cmd_crossover_scan, "Airy crossover scan of the Yukawa integral")
    p.add_argument("--v", type=float, default=None)
    p.add_argument("--s-range", type=parse_range, default=None,
                   help="a:b:n; write --s-range=-1.5:3:19 when a is negative")
    p.add_argument("--fit-constants", action="store_const", const=True, default=None)
    p.add_argument("--plot-data", default=None)

    p = _sub(subs, "series-analyze", cmd_series_analyze, "ratio-method estimate of mu and theta",
             default_format="json")
    p.add_argument("--source", choices=("lattice", "continuum", "file"), default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--file", default=None, help="one coefficient per line (last column used)")
    p.add_argument("--plot-data", default=None)

    p = _sub(subs, "verify-all", cmd_verify_all, "run every acceptance criterion", default_format="json")
    p.add_argument("--budget", choices=("quick", "full"), default=None)
    p.add_argument("--only", type=parse_int_list, default=None, help="comma-separated criterion ids")
    p.add_argument("--quiet", action="store_const", const=True, default=None)
    return parser


COMMAND_DEFAULTS = {
    "enumerate-lattice": {"dim": 2, "nmax": 8, "backend": None, "plot_data": None},
    "continuum-coeffs": {"dim": 2, "nmax": 4, "samples": 100_000, "soft": None, "beta": 1.0},
    "hardrod-pressure": {"z": 0.2, "L": [100.0, 200.0, 400.0]},
    "d0-check": {"z_grid": (-0.9 + 1e-9, 10.0, 21), "soft": None, "beta": 1.0, "nmax": 3, "samples": 100_000},
    "check-tables": {},
    "k-functions": {"grid": (0.1, 10.0, 100), "mode": "analytic"},
    "verify-forest-root": {"n": 4, "trials": 20},
    "crossover-scan": {"v": 1e-6, "s_range": (-1.5, 3.0, 19), "fit_constants": False, "plot_data": None},
    "series-analyze": {"source": "continuum", "dim": 2, "nmax": 40, "order": 2, "file": None, "plot_data": None},
    "verify-all": {"budget": "quick", "only": None, "quiet": False},
}

_CONFIG_TYPES = {
    "seed": int, "threads": int, "dim": int, "nmax": int, "samples": int, "n": int, "trials": int, "order": int,
    "beta": float, "z": float, "v": float, "L": parse_float_list, "s_range": parse_range, "grid": parse_range,
    "z_grid": parse_range, "only": parse_int_list,
    "no_timing": lambda s: s.lower() in ("1", "true", "yes"),
    "fit_constants": lambda s: s.lower() in ("1", "true", "yes"),
    "quiet": lambda s: s.lower() in ("1", "true", "yes"),
}


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Flags, then config file, then defaults: the first one that sets a key wins."""
    config = read_config(args.config) if getattr(args, "config", None) else {}
    defaults = dict(GLOBAL_DEFAULTS)
    defaults.update(COMMAND_DEFAULTS[args.command])
    for key, default in defaults.items():
        if getattr(args, key, None) is not None:
            continue
        if key in config:
            conv = _CONFIG_TYPES.get(key, str)
            setattr(args, key, conv(config.pop(key)))
        else:
            setattr(args, key, default)
    unknown = set(config) - set(defaults) - {"config"}
    if unknown:
        raise SystemExit(f"unknown config keys: {', '.join(sorted(unknown))}")
    if args.format is None:
        args.format = args.default_format
    if args.threads < 1:
        raise SystemExit("--threads must be at least 1")
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = resolve(parser.parse_args(argv))
    result = args.func(args)
    status = 0
    if isinstance(result, Table):
        text = render(result, args.format)
    else:                                   # verify-all report
        from .acceptance import to_jsonable

        text = json.dumps(to_jsonable(result), indent=2) + "\n"
        status = 0 if result["passed"] else 1
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
