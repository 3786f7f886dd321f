"""Command-line harness: seeded replication studies and CSV screening.

Two modes::

    condscreen --mode simulate --scenario ex1case1 --reps 100 --nu 1,2,3 --out run.json
    condscreen --mode screen --data genes.csv --response y --exposure age --out screen.csv

Options may also come from a flat ``key = value`` config file (``--config``);
command-line flags win. ``CONDSCREEN_THREADS`` is read when ``--threads`` is
not given anywhere.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy

from . import __version__
from ._backend import BACKEND
from .baselines import ccsis_utility_all, dcsis_utility_all, sirs_utility_all
from .errors import (
    CondScreenError,
    ConfigError,
    MissingColumn,
    NonFiniteValue,
    ParseError,
)
from .evalmetrics import QUANTILE_LEVELS, aggregate
from .screening import (
    DEFAULT_EPS,
    DataSet,
    KernelSpec,
    Method,
    UtilityVector,
    build_moment_table,
    csirs_all,
    rank_and_select,
    submodel_size,
)
from .simgen import Scenario, ScenarioSpec, generate, replication_rng

DEFAULT_NU = (1, 2, 3)
CONFIG_KEYS = {
    "mode", "scenario", "n", "p", "rho", "reps", "methods", "d", "nu", "bandwidth",
    "seed", "threads", "out", "format", "data", "response", "exposure", "quiet",
    "exposure_column",
}


@dataclass
class RunConfig:
    mode: str = "simulate"
    scenario: Optional[ScenarioSpec] = None
    replications: int = 100
    methods: tuple[Method, ...] = tuple(Method)
    cutoffs: Optional[tuple[int, ...]] = None
    nu: Optional[tuple[int, ...]] = None
    bandwidth: Optional[float] = None
    seed: int = 1
    threads: int = 1
    output_path: Path = Path("report.json")
    output_format: str = "json"
    quiet: bool = False
    data: Optional[Path] = None
    response: Optional[str] = None
    exposure: Optional[str] = None
    eps: float = DEFAULT_EPS

    def resolved_cutoffs(self, n: int, p: int) -> list[int]:
        """Explicit ``d`` values, or ``nu`` multipliers turned into sizes.

        Sizes derived from ``nu`` are capped at ``p``; explicit ones are
        validated against ``p`` instead.
        """
        if self.cutoffs is not None:
            bad = [d for d in self.cutoffs if not 1 <= d <= p]
            if bad:
                raise ConfigError(f"d: cutoffs {bad} outside [1, {p}]")
            return sorted(set(self.cutoffs))
        nus = self.nu if self.nu is not None else DEFAULT_NU
        return sorted({min(submodel_size(n, v), p) for v in nus})


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="condscreen",
        description="Conditional feature screening (C-SIRS) and baseline screeners.",
    )
    ap.add_argument("--config", help="flat key = value file; flags override it")
    ap.add_argument("--mode", choices=["simulate", "screen"])
    ap.add_argument("--scenario", help="ex1case1 ex1case2 ex2case1 ex2case2 ex2case3 ex2case4")
    ap.add_argument("--n", help="sample size (simulate)")
    ap.add_argument("--p", help="number of predictors (simulate)")
    ap.add_argument("--rho", help="AR correlation (simulate)")
    ap.add_argument("--exposure-column", dest="exposure_column",
                    help="position of the latent exposure in the Gaussian block: first, last or index")
    ap.add_argument("--reps", help="number of replications")
    ap.add_argument("--methods", help="comma list from csirs,sirs,dcsis,ccsis")
    cut = ap.add_mutually_exclusive_group()
    cut.add_argument("--d", help="explicit cutoffs, e.g. 16,32,48")
    cut.add_argument("--nu", help="multipliers of n^(4/5)/log(n^(4/5)), e.g. 1,2,3")
    ap.add_argument("--bandwidth", help="fixed kernel bandwidth h")
    ap.add_argument("--seed", help="master seed")
    ap.add_argument("--threads", help="worker threads or 'auto'")
    ap.add_argument("--out", help="output path")
    ap.add_argument("--format", choices=["csv", "json"])
    ap.add_argument("--data", help="input CSV (screen)")
    ap.add_argument("--response", help="response column name (screen)")
    ap.add_argument("--exposure", help="exposure column name (screen)")
    ap.add_argument("--quiet", action="store_const", const="true", default=None)
    return ap


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"config line {lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in CONFIG_KEYS:
                raise ConfigError(f"config line {lineno}: unknown key {key!r}")
            values[key] = val
    return values


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split(",") if t.strip())


def _truthy(text: str) -> bool:
    return text.strip().lower() in {"1", "true", "yes", "on"}


def build_config(argv: Sequence[str] | None = None) -> RunConfig:
    """Merge defaults, config file, environment and flags into a RunConfig.

    Every invalid field is reported; a :class:`ConfigError` carrying one line
    per problem is raised if there are any.
    """
    args = _build_parser().parse_args(argv)
    raw: dict[str, str] = {}
    errors: list[str] = []
    if args.config:
        try:
            raw.update(read_config_file(args.config))
        except (OSError, ConfigError) as exc:
            raise ConfigError(f"config: {exc}") from None
    for key, val in vars(args).items():
        if key != "config" and val is not None:
            raw[key] = val
    if "threads" not in raw and os.environ.get("CONDSCREEN_THREADS"):
        raw["threads"] = os.environ["CONDSCREEN_THREADS"]
    if "d" in raw and "nu" in raw:
        errors.append("d/nu: give either explicit cutoffs or nu multipliers, not both")

    cfg = RunConfig()

    def take(key, conv, check=None, msg=""):
        if key not in raw:
            return None
        try:
            val = conv(raw[key])
        except (ValueError, TypeError, CondScreenError) as exc:
            errors.append(f"{key}: cannot parse {raw[key]!r} ({exc})")
            return None
        if check is not None and not check(val):
            errors.append(f"{key}: {msg} (got {raw[key]!r})")
            return None
        return val

    mode = raw.get("mode", "simulate")
    if mode not in {"simulate", "screen"}:
        errors.append(f"mode: must be simulate or screen (got {mode!r})")
    cfg.mode = mode

    methods = take("methods", lambda s: tuple(dict.fromkeys(Method.parse(t) for t in s.split(",") if t.strip())),
                   lambda m: len(m) > 0, "at least one method required")
    if methods:
        cfg.methods = methods
    cfg.cutoffs = take("d", _int_list, lambda v: len(v) > 0 and min(v) >= 1, "cutoffs must be >= 1")
    cfg.nu = take("nu", _int_list, lambda v: len(v) > 0 and min(v) >= 1, "nu values must be >= 1")
    bw = take("bandwidth", float, lambda h: math.isfinite(h) and h > 0, "must be a positive number")
    cfg.bandwidth = bw
    seed = take("seed", int, lambda s: s >= 0, "must be a non-negative integer")
    cfg.seed = 1 if seed is None else seed

    threads_raw = raw.get("threads", "1")
    if threads_raw.strip().lower() == "auto":
        cfg.threads = os.cpu_count() or 1
    else:
        t = take("threads", int, lambda v: v >= 1, "must be >= 1 or 'auto'")
        cfg.threads = t or 1
    fmt = raw.get("format")
    if fmt is not None and fmt not in {"csv", "json"}:
        errors.append(f"format: must be csv or json (got {fmt!r})")
    out = raw.get("out")
    if fmt is None:
        fmt = "csv" if out and out.lower().endswith(".csv") else "json"
    cfg.output_format = fmt
    cfg.output_path = Path(out) if out else Path(f"report.{fmt}")
    cfg.quiet = _truthy(raw.get("quiet", "false"))

    if mode == "simulate":
        reps = take("reps", int, lambda r: r >= 1, "must be >= 1")
        cfg.replications = 100 if reps is None else reps
        scen = take("scenario", Scenario.parse)
        n = take("n", int, lambda v: v >= 2, "must be >= 2")
        p = take("p", int, lambda v: v >= 5, "must be >= 5 (five active predictors)")
        rho = take("rho", float, lambda r: 0 <= r < 1, "must lie in [0, 1)")
        col_raw = raw.get("exposure_column", "first").strip().lower()
        ucol = None
        if col_raw == "first":
            ucol = 0
        elif col_raw != "last":
            ucol = take("exposure_column", int, lambda c: c >= 0, "must be first, last or an index")
        if not any(e.split(":")[0] in {"scenario", "n", "p", "rho", "exposure_column"} for e in errors):
            try:
                cfg.scenario = ScenarioSpec(
                    scen or Scenario.EX1_CASE1, n=n or 200, p=p or 1000,
                    rho=0.5 if rho is None else rho, seed=cfg.seed, exposure_column=ucol)
            except (ValueError, CondScreenError) as exc:
                errors.append(f"scenario: {exc}")
        if cfg.scenario is not None and cfg.cutoffs is not None:
            bad = [d for d in cfg.cutoffs if d > cfg.scenario.p]
            if bad:
                errors.append(f"d: cutoffs {bad} exceed p={cfg.scenario.p}")
    else:
        for key in ("data", "response", "exposure"):
            if not raw.get(key):
                errors.append(f"{key}: required in screen mode")
        if raw.get("data"):
            cfg.data = Path(raw["data"])
            if not cfg.data.is_file():
                errors.append(f"data: file not found: {cfg.data}")
        cfg.response = raw.get("response")
        cfg.exposure = raw.get("exposure")
        if cfg.response and cfg.response == cfg.exposure:
            errors.append("exposure: must differ from the response column")

    if errors:
        raise ConfigError("\n".join(errors))
    return cfg


# ---------------------------------------------------------------------------
# computation


def compute_utilities(data: DataSet, methods: Sequence[Method], bandwidth: float | None,
                      eps: float = DEFAULT_EPS) -> tuple[dict[Method, UtilityVector], float | None]:
    """Run each method on one dataset; returns utilities and the bandwidth used."""
    needs_kernel = any(m in (Method.CSIRS, Method.CCSIS) for m in methods)
    table = None
    if needs_kernel:
        spec = KernelSpec() if bandwidth is None else KernelSpec.fixed(bandwidth)
        table = build_moment_table(data, spec)
    out = {}
    for m in methods:
        if m is Method.CSIRS:
            out[m] = csirs_all(data, eps=eps, table=table)
        elif m is Method.SIRS:
            out[m] = sirs_utility_all(data)
        elif m is Method.DCSIS:
            out[m] = dcsis_utility_all(data, eps=eps)
        else:
            out[m] = ccsis_utility_all(data, eps=eps, table=table)
    return out, (table.h if table is not None else None)


def _versions() -> dict[str, str]:
    return {
        "condscreen": __version__,
        "backend": BACKEND,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


class _Progress:
    def __init__(self, total: int, quiet: bool):
        self.total = total
        self.quiet = quiet
        self.next_mark = 1

    def update(self, done: int):
        if self.quiet:
            return
        mark = done * 10 // self.total
        if mark >= self.next_mark:
            print(f"condscreen: {done}/{self.total} replications ({mark * 10}%)", file=sys.stderr)
            self.next_mark = mark + 1


def simulate(config: RunConfig) -> dict:
    """Run the replication study and return the report document (no I/O)."""
    spec = config.scenario
    cutoffs = config.resolved_cutoffs(spec.n, spec.p)

    def one(r: int):
        rep = generate(spec, replication_rng(config.seed, r))
        utils, h = compute_utilities(rep.data, config.methods, config.bandwidth, config.eps)
        results = {m: rank_and_select(uv, cutoffs) for m, uv in utils.items()}
        return results, h, rep.eta_clamped

    progress = _Progress(config.replications, config.quiet)
    outcomes = []
    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        for i, res in enumerate(pool.map(one, range(config.replications)), 1):
            outcomes.append(res)
            progress.update(i)

    bandwidths = [h for _, h, _ in outcomes]
    methods = {}
    for m in config.methods:
        metrics = aggregate([(res[m], spec.active_set) for res, _, _ in outcomes],
                            cutoffs, QUANTILE_LEVELS)
        methods[m.value] = {"metrics": metrics.to_dict()}

    manifest = {
        "mode": "simulate",
        "scenario": {
            "name": spec.name.value,
            "n": spec.n,
            "p": spec.p,
            "rho": spec.rho,
            "exposure_column": spec.exposure_column,
            "active_set": list(spec.active_labels),
        },
        "replications": config.replications,
        "methods": [m.value for m in config.methods],
        "cutoffs": cutoffs,
        "nu": list(config.nu) if config.nu is not None and config.cutoffs is None else None,
        "seed": config.seed,
        "kernel": "epanechnikov",
        "eps": config.eps,
        "bandwidth": {
            "rule": "fixed" if config.bandwidth is not None else "1.06*sd(u)*n^(-1/5)",
            "values": bandwidths if bandwidths[0] is not None else None,
        },
        "poisson_eta_clamped": sum(c for _, _, c in outcomes),
        "quantile_method": "linear",
        "versions": _versions(),
    }
    return {"manifest": manifest, "methods": methods}


def load_screen_csv(path: Path, response: str, exposure: str) -> tuple[DataSet, list[str]]:
    """Read a comma-separated file with a header row into a DataSet."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path}: empty file", row=1) from None
        for col in (response, exposure):
            if col not in header:
                raise MissingColumn(f"{path}: column {col!r} not in header")
        rows = []
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: row {rowno} has {len(row)} fields, header has {len(header)}",
                    row=rowno)
            vals = []
            for name, cell in zip(header, row):
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {rowno}, column {name!r}: cannot parse {cell!r} as a number",
                        row=rowno, column=name) from None
                if not math.isfinite(v):
                    raise NonFiniteValue(
                        f"{path}: row {rowno}, column {name!r}: non-finite value {cell!r}",
                        row=rowno, column=name)
                vals.append(v)
            rows.append(vals)
    predictors = [h for h in header if h not in (response, exposure)]
    if not predictors:
        raise ParseError(f"{path}: no predictor columns besides response and exposure")
    if len(rows) < 2:
        raise ParseError(f"{path}: need at least 2 data rows, found {len(rows)}")
    arr = np.array(rows, dtype=np.float64)
    idx = {h: i for i, h in enumerate(header)}
    x = arr[:, [idx[h] for h in predictors]]
    return DataSet(x, arr[:, idx[response]], arr[:, idx[exposure]]), predictors


def screen(config: RunConfig) -> dict:
    data, names = load_screen_csv(config.data, config.response, config.exposure)
    cutoffs = config.resolved_cutoffs(data.n, data.p)
    utils, h = compute_utilities(data, config.methods, config.bandwidth, config.eps)
    methods = {}
    for m, uv in utils.items():
        res = rank_and_select(uv, cutoffs)
        methods[m.value] = {
            "utilities": [float(v) for v in uv.omega],
            "ranks": [int(r) for r in res.ranks],
            "selected": {str(d): [names[k] for k in sel] for d, sel in res.selected.items()},
        }
    manifest = {
        "mode": "screen",
        "data": str(config.data),
        "response": config.response,
        "exposure": config.exposure,
        "n": data.n,
        "p": data.p,
        "predictors": names,
        "methods": [m.value for m in config.methods],
        "cutoffs": cutoffs,
        "kernel": "epanechnikov",
        "eps": config.eps,
        "bandwidth": {
            "rule": "fixed" if config.bandwidth is not None else "1.06*sd(u)*n^(-1/5)",
            "value": h,
        },
        "versions": _versions(),
    }
    return {"manifest": manifest, "methods": methods}


# ---------------------------------------------------------------------------
# output


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _stem(path: Path) -> Path:
    return path.with_suffix("") if path.suffix.lower() in {".csv", ".json"} else path


def _metrics_rows(metrics: dict) -> list[list]:
    rows = [["criterion", "key", "predictor", "value"]]
    for k, v in metrics["R"].items():
        rows.append(["R", "", k, v])
    for q, v in metrics["S_quantiles"].items():
        rows.append(["S_quantile", q, "", v])
    for d, v in metrics["P_a"].items():
        rows.append(["P_a", d, "", v])
    for d, per in metrics["P_k"].items():
        for k, v in per.items():
            rows.append(["P_k", d, k, v])
    return rows


def _screen_rows(report: dict) -> list[list]:
    names = report["manifest"]["predictors"]
    methods = report["methods"]
    primary = "csirs" if "csirs" in methods else next(iter(methods))
    header = ["predictor"]
    for m in methods:
        header += [f"{m}_utility", f"{m}_rank"]
    order = sorted(range(len(names)), key=lambda k: methods[primary]["ranks"][k])
    rows = [header]
    for k in order:
        row = [names[k]]
        for m in methods.values():
            row += [repr(m["utilities"][k]), m["ranks"][k]]
        rows.append(row)
    return rows


def _csv_text(rows: list[list]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def render_outputs(report: dict, config: RunConfig) -> dict[Path, str]:
    """Map each output file to its full text; nothing is written here."""
    out = config.output_path
    if config.output_format == "json":
        return {out: _dump_json(report)}
    stem = _stem(out)
    files = {Path(f"{stem}.manifest.json"): _dump_json(report["manifest"])}
    if report["manifest"]["mode"] == "simulate":
        for m, body in report["methods"].items():
            files[Path(f"{stem}.{m}.csv")] = _csv_text(_metrics_rows(body["metrics"]))
    else:
        files[out if out.suffix else Path(f"{stem}.csv")] = _csv_text(_screen_rows(report))
    return files


def write_outputs(files: dict[Path, str]) -> None:
    for path, text in files.items():
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        tmp.replace(path)


def run(config: RunConfig) -> dict:
    start = time.perf_counter()
    report = simulate(config) if config.mode == "simulate" else screen(config)
    files = render_outputs(report, config)
    # wall time and thread count live apart from the report so it stays
    # byte-identical across thread counts
    timing = {"wall_time_s": round(time.perf_counter() - start, 3), "threads": config.threads}
    files[Path(f"{_stem(config.output_path)}.timing.json")] = _dump_json(timing)
    write_outputs(files)
    return report


def main(argv: Sequence[str] | None = None) -> int:
    try:
        config = build_config(argv)
    except ConfigError as exc:
        for line in str(exc).splitlines():
            print(f"condscreen: config error: {line}", file=sys.stderr)
        return 2
    try:
        run(config)
    except (CondScreenError, OSError) as exc:
        print(f"condscreen: error: {exc}", file=sys.stderr)
        return 1
    if not config.quiet:
        print(f"condscreen: wrote {config.output_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
