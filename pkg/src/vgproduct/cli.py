"""Command-line front end.

Subcommands
-----------
``eval CONFIG``
    Evaluate a quantity on a grid and write a CSV or JSON table.
``sample CONFIG``
    Draw Monte Carlo variates from the configured law.
``validate SUITE``
    Run one of the acceptance suites and print a pass/fail report.

Exit status is 0 on success, 1 on configuration or validation errors and 2
when at least one row did not reach the requested tolerance (the rows are
still written, flagged ``converged=false``).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from . import oracle, product, special_cases, validation
from .meijer import EvalResult
from .product import ProductSpec
from .vg import SampleBatch, SingularityError, VgParams

__all__ = ["ConfigError", "GridSpec", "JobConfig", "load_config", "run_job", "run_validation", "main"]

TOL_ENV = "VGPRODUCT_TOL"
DEFAULT_TOL = 1e-10
QUANTITIES = ("pdf", "cdf", "cf", "tail", "quantile", "prob-nonpositive", "sample")
FAMILIES = ("product", "laplace", "normal-laplace", "correlated-normal")
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    """An invalid job configuration; the CLI exits with status 1."""


@dataclass(frozen=True)
class GridSpec:
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("grid count must be >= 1")
        if self.spacing not in ("linear", "log"):
            raise ConfigError("grid spacing must be 'linear' or 'log'")
        if self.spacing == "log" and not (self.start * self.stop > 0):
            raise ConfigError("log spacing needs start and stop nonzero and of the same sign")

    def points(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.start)])
        if self.spacing == "linear":
            return np.linspace(self.start, self.stop, self.count)
        sign = 1.0 if self.start > 0 else -1.0
        return sign * np.geomspace(abs(self.start), abs(self.stop), self.count)


@dataclass(frozen=True)
class JobConfig:
    family: str
    law: Any                      # ProductSpec or a special-case spec
    quantity: str
    grid: GridSpec | None
    tol: float = DEFAULT_TOL
    seed: int | None = None
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ConfigError(f"quantity must be one of {', '.join(QUANTITIES)}")
        if not (1e-14 <= self.tol <= 1e-2):
            raise ConfigError("tol must lie in [1e-14, 1e-2]")
        if self.fmt not in FORMATS:
            raise ConfigError("format must be 'csv' or 'json'")
        if self.quantity not in ("prob-nonpositive", "sample") and self.grid is None:
            raise ConfigError(f"quantity {self.quantity!r} needs a [grid] section")
        if self.quantity == "sample" and self.seed is None:
            raise ConfigError("sampling needs an integer seed")

    @property
    def product_spec(self) -> ProductSpec:
        return self.law if isinstance(self.law, ProductSpec) else self.law.to_product_spec()


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _parse_law(sec: dict):
    family = sec.get("family", "product")
    if family not in FAMILIES:
        raise ConfigError(f"spec.family must be one of {', '.join(FAMILIES)}")
    try:
        if family == "product":
            factors = sec["factors"]
            if not factors or len(factors) > product.MAX_FACTORS:
                raise ConfigError(f"spec.factors needs 1..{product.MAX_FACTORS} entries of [m, alpha, beta]")
            return family, ProductSpec(tuple(VgParams(*map(float, f)) for f in factors))
        if family == "laplace":
            return family, special_cases.LaplaceProductSpec(tuple(tuple(p) for p in sec["pairs"]))
        if family == "normal-laplace":
            return family, special_cases.MixedNormalLaplaceSpec(tuple(sec.get("sigmas", ())),
                                                                tuple(sec.get("alphas", ())))
        return family, special_cases.CorrelatedNormalSpec(tuple(tuple(b) for b in sec["blocks"]))
    except KeyError as exc:
        raise ConfigError(f"spec section for family {family!r} is missing key {exc.args[0]!r}") from None
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _env_tol() -> float | None:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{TOL_ENV}={raw!r} is not a number") from None


def load_config(path: str | None = None, data: dict | None = None, *, tol: float | None = None,
                seed: int | None = None, out: str | None = None, fmt: str | None = None,
                quantity: str | None = None) -> JobConfig:
    """Build a :class:`JobConfig` from a TOML file (or a parsed dict) plus overrides.

    Keyword overrides win over the file, which wins over ``VGPRODUCT_TOL``.
    """
    if data is None:
        if path is None:
            raise ConfigError("no configuration given")
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config {path!r} is not valid TOML: {exc}") from None
    if "spec" not in data:
        raise ConfigError("config needs a [spec] section")
    family, law = _parse_law(data["spec"])
    g = data.get("grid")
    grid = None
    if g is not None:
        try:
            grid = GridSpec(float(g["start"]), float(g.get("stop", g["start"])), int(g.get("count", 1)),
                            str(g.get("spacing", "linear")))
        except KeyError as exc:
            raise ConfigError(f"grid section is missing key {exc.args[0]!r}") from None
    outsec = data.get("output", {})
    t = tol if tol is not None else data.get("tol")
    if t is None:
        t = _env_tol()
    s = seed if seed is not None else data.get("seed")
    return JobConfig(
        family=family,
        law=law,
        quantity=quantity or data.get("quantity", "pdf"),
        grid=grid,
        tol=float(t if t is not None else DEFAULT_TOL),
        seed=None if s is None else int(s),
        out=out if out is not None else outsec.get("path"),
        fmt=fmt or outsec.get("format", "csv"),
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]

    @property
    def converged(self) -> bool:
        if "converged" not in self.columns:
            return True
        k = self.columns.index("converged")
        return all(r[k] for r in self.rows)


def _rows(x: np.ndarray, r: EvalResult) -> list[tuple]:
    v = np.atleast_1d(r.value)
    e = np.atleast_1d(r.abs_err)
    c = np.broadcast_to(np.atleast_1d(r.converged), v.shape)
    return [(float(a), float(b), float(d), bool(k)) for a, b, d, k in zip(x, v, e, c)]


def _pdf(cfg: JobConfig, x):
    law, tol = cfg.law, cfg.tol
    if np.any(x == 0):
        raise ConfigError("the product density is singular at z = 0; remove 0 from the grid")
    if cfg.family == "laplace":
        return special_cases.al_product_pdf(law, x, tol)
    if cfg.family == "normal-laplace":
        return special_cases.mixed_product_pdf(law, x, tol)
    if cfg.family == "correlated-normal":
        return special_cases.correlated_normal_product_pdf(law, x, tol)
    return product.product_pdf(law, x, tol)


def _cdf(cfg: JobConfig, x):
    law, tol = cfg.law, cfg.tol
    if cfg.family == "laplace":
        return special_cases.al_product_cdf(law, x, tol)
    if cfg.family == "normal-laplace":
        return special_cases.mixed_product_cdf(law, x, tol)
    spec = cfg.product_spec
    if spec.is_symmetric:
        return product.product_cdf_symmetric(spec, x, tol)
    return product.product_cdf_numeric(spec, x, tol)


def _cf(cfg: JobConfig, t):
    law, tol = cfg.law, cfg.tol
    if cfg.family == "laplace":
        return special_cases.al_product_cf(law, t, tol)
    if cfg.family == "normal-laplace":
        return special_cases.mixed_product_cf(law, t, tol)
    spec = cfg.product_spec
    if spec.is_symmetric:
        return product.product_cf_symmetric(spec, t, tol)
    if spec.is_halfint:
        return product.product_cf_halfint(spec, t, tol)
    # no closed form: Fourier quadrature of the density, error unknown
    vals = np.array([oracle.cf_fourier(spec, float(v), tol, pdf="product") for v in t])
    return EvalResult(vals, np.full(t.size, np.nan), np.ones(t.size, dtype=bool))


def _tail(spec: ProductSpec, x):
    vals = np.array([product.tail_asymptotic_cdf(spec, v, "upper" if v > 0 else "lower") for v in x])
    return EvalResult(vals, np.full(x.size, np.nan), np.ones(x.size, dtype=bool))


def sample_law(cfg: JobConfig, n: int) -> SampleBatch:
    if cfg.seed is None:
        raise ConfigError("sampling needs an integer seed")
    if n < 1:
        raise ConfigError("sample count must be >= 1")
    if cfg.family == "product":
        return oracle.mc_product_sample(cfg.law, n, cfg.seed)
    return cfg.law.sample(n, cfg.seed)


def evaluate_job(cfg: JobConfig) -> Table:
    """Compute the table for ``cfg`` without writing it."""
    q = cfg.quantity
    if q == "prob-nonpositive":
        p = product.prob_nonpositive(cfg.product_spec)
        return Table(["value"], [(p,)])
    if cfg.grid is None:
        raise ConfigError(f"quantity {q!r} needs a [grid] section")
    x = cfg.grid.points()
    if q == "sample":
        b = sample_law(cfg, cfg.grid.count)
        return Table(["index", "value"], [(i, float(v)) for i, v in enumerate(b.values)])
    if q == "quantile":
        if np.any((x <= 0) | (x >= 1)):
            raise ConfigError("quantile grid points must lie in (0, 1)")
        spec = cfg.product_spec
        return Table(["p", "value"], [(float(p), product.quantile_numeric(spec, float(p), cfg.tol)) for p in x])
    if q == "cf":
        r = _cf(cfg, x)
        v = np.atleast_1d(r.value).astype(complex)
        e = np.atleast_1d(r.abs_err)
        c = np.broadcast_to(np.atleast_1d(r.converged), v.shape)
        return Table(["t", "value_re", "value_im", "abs_err", "converged"],
                     [(float(a), float(b.real), float(b.imag), float(d), bool(k))
                      for a, b, d, k in zip(x, v, e, c)])
    if q == "tail":
        if np.any(x == 0):
            raise ConfigError("tail asymptotics need z ≠ 0")
        return Table(["z", "value", "abs_err", "converged"], _rows(x, _tail(cfg.product_spec, x)))
    fn = _pdf if q == "pdf" else _cdf
    return Table(["z", "value", "abs_err", "converged"], _rows(x, fn(cfg, x)))


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % v


def write_table(table: Table, stream, fmt: str = "csv") -> None:
    """Write ``table`` as CSV (17 significant digits) or as a JSON array of objects."""
    if fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(table.columns)
        for r in table.rows:
            w.writerow([_fmt(v) for v in r])
        return
    objs = []
    for r in table.rows:
        objs.append({c: (None if isinstance(v, float) and math.isnan(v) else v)
                     for c, v in zip(table.columns, r)})
    json.dump(objs, stream, indent=1, allow_nan=True)
    stream.write("\n")


def read_csv(stream) -> Table:
    """Parse a table written by :func:`write_table`; floats round-trip exactly."""
    rd = csv.reader(stream)
    cols = next(rd)
    rows = []
    for rec in rd:
        row = []
        for c, s in zip(cols, rec):
            if c == "converged":
                row.append(s == "true")
            elif c == "index":
                row.append(int(s))
            else:
                row.append(float(s))
        rows.append(tuple(row))
    return Table(cols, rows)


def _emit(table: Table, cfg_out: str | None, fmt: str) -> None:
    if cfg_out in (None, "-"):
        write_table(table, sys.stdout, fmt)
    else:
        with open(cfg_out, "w", newline="") as fh:
            write_table(table, fh, fmt)


def run_job(cfg: JobConfig) -> int:
    """Evaluate and write ``cfg``; returns the process exit status."""
    table = evaluate_job(cfg)
    _emit(table, cfg.out, cfg.fmt)
    return 0 if table.converged else 2


def run_validation(suite: str, stream=None) -> int:
    """Run ``suite`` and print one line per criterion; nonzero status on failure."""
    stream = stream or sys.stdout
    results = validation.run_suite(suite)
    for r in results:
        print(r.line(), file=stream)
        for d in r.details:
            print("    " + d, file=stream)
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vgproduct", description="Products of variance-gamma variables.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config", help="TOML job file")
        sp.add_argument("--tol", type=float, help=f"tolerance (default: file, then ${TOL_ENV}, then 1e-10)")
        sp.add_argument("--seed", type=int, help="random seed")
        sp.add_argument("--out", help="output path ('-' for stdout)")
        sp.add_argument("--format", choices=FORMATS, help="output format (default csv)")

    common(sub.add_parser("eval", help="evaluate a quantity on a grid"))
    sp = sub.add_parser("sample", help="draw Monte Carlo variates")
    common(sp)
    sp.add_argument("--n", type=int, help="number of draws (default: grid count)")
    v = sub.add_parser("validate", help="run an acceptance suite")
    v.add_argument("suite", choices=sorted(validation.SUITES))
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "validate":
            return run_validation(args.suite)
        kw = dict(tol=args.tol, seed=args.seed, out=args.out, fmt=args.format)
        if args.command == "sample":
            cfg = load_config(args.config, quantity="sample", **kw)
            n = args.n if args.n is not None else (cfg.grid.count if cfg.grid else None)
            if n is None:
                raise ConfigError("give --n or a [grid] count for the number of draws")
            b = sample_law(cfg, n)
            _emit(Table(["index", "value"], [(i, float(x)) for i, x in enumerate(b.values)]), cfg.out, cfg.fmt)
            return 0
        return run_job(load_config(args.config, **kw))
    except (ConfigError, SingularityError) as exc:
        print(f"vgproduct: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
