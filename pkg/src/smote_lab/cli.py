"""``smote-lab`` command line interface.

Every subcommand reads its parameters from flags and/or a JSON run-config
(``--config``); flags win.  A run writes its tables, SVG plots and a
``provenance.json`` under ``--out-dir``.  Feeding that provenance file back
through ``--config`` reproduces the run byte for byte.

Exit codes: 0 success, 1 invalid arguments or configuration, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, experiments
from .core_sampling import SmoteConfig, Variant, generate_batch
from .data_io import (
    DatasetRef,
    PlotSpec,
    Series,
    render_line_plot,
    write_json,
    write_sweep_csv,
    write_table_csv,
)
from .distributions import DistributionSpec, Kind, sample_iid
from .errors import ConfigError, SmoteLabError
from .streams import THREADS_ENV, check_seed, resolve_threads

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2
DEFAULT_SEED = 0
DEFAULT_OUT_DIR = "smote-lab-out"
_BASE_SAMPLE_TAG = 101

_DEFAULT_PARAMS = {"uniform": [0.0, 1.0], "gaussian": [0.0, 1.0], "exponential": [1.0]}


@dataclass(frozen=True)
class Field:
    name: str
    kind: str  # int, float, str, bool, ints, floats, opt_float, opt_str, opt_floats
    default: object
    help: str
    choices: tuple = ()


def _source_fields(default_dist="uniform"):
    return [
        Field("dist", "str", default_dist, "reference distribution", tuple(k.value for k in Kind)),
        Field("dist_params", "opt_floats", None,
              "distribution parameters: a b | mu sigma | rate (null = standard)"),
    ]


def _dataset_fields(normalize):
    return [
        Field("dataset", "opt_str", None, "delimited text file used as the population instead of --dist"),
        Field("column", "opt_str", None, "column name (or 0-based index) in --dataset"),
        Field("sentinel", "opt_float", None, "value marking a missing reading, e.g. -200"),
        Field("delimiter", "str", ",", "field delimiter of --dataset"),
        Field("decimal", "str", ".", "decimal mark of --dataset", (".", ",")),
        Field("normalize", "bool", normalize, "min-max scale the dataset to [0, 1]"),
    ]


def _sweep_fields(metric, metrics, normalize, n_grid=(8, 20, 70, 200)):
    return [
        *_source_fields(),
        *_dataset_fields(normalize),
        Field("n_grid", "ints", list(n_grid), "base sample sizes"),
        Field("k_values", "ints", [1, 5], "neighbour ranks"),
        Field("variant", "str", "fixed", "fixed = SMOTE-k, pool = SMOTE-K", ("fixed", "pool")),
        Field("trials", "int", 50, "trials per (n, k)"),
        Field("draws", "int", 2000, "synthetic draws per trial"),
        Field("metric", "str", metric, "distance", metrics),
        Field("reference_size", "int", 100_000, "size of the fixed reference draw (distribution sources)"),
        Field("calibration", "bool", False, "measure the reference against itself (expects 0)"),
    ]


SCHEMAS = {
    "sample": [
        *_source_fields(),
        Field("n", "int", 20, "base sample size"),
        Field("k", "int", 1, "neighbour rank (pool size for --variant pool)"),
        Field("variant", "str", "fixed", "fixed = SMOTE-k, pool = SMOTE-K", ("fixed", "pool")),
        Field("count", "int", 10, "synthetic points to generate"),
    ],
    "ks-sweep": _sweep_fields("KS2", ("KS1", "KS2"), False),
    "w1-sweep": _sweep_fields("W1", ("W1",), True),
    "kl-sweep": [
        *_source_fields(),
        Field("n_grid", "ints", list(experiments.DEFAULT_KL_GRID), "base sample sizes"),
        Field("k_values", "ints", [1, 5], "neighbour ranks"),
        Field("variant", "str", "fixed", "fixed = SMOTE-k, pool = SMOTE-K", ("fixed", "pool")),
        Field("trials", "int", 50, "trials per (n, k)"),
        Field("draws", "int", 2000, "synthetic draws per trial (multiple of 10)"),
        Field("bins", "int", 50, "histogram bins"),
    ],
    "overlay": [
        *_source_fields(),
        Field("n_values", "ints", [8, 20, 70], "base sample sizes"),
        Field("k", "int", 1, "neighbour rank"),
        Field("draws", "int", 20000, "synthetic draws per curve"),
        Field("grid_points", "int", 201, "points of the evaluation grid"),
    ],
    "spacing-check": [
        Field("n", "ints", [9], "uniform sample sizes"),
        Field("trials", "int", 100_000, "Monte Carlo trials (>= 1000)"),
    ],
    "tailprob-check": [
        *_source_fields(),
        Field("n", "int", 50, "sample size"),
        Field("k_values", "ints", list(range(1, 11)), "neighbour ranks"),
        Field("epsilon", "float", 0.05, "distance threshold"),
        Field("trials", "int", 10_000, "Monte Carlo trials"),
    ],
}


_DESCRIPTIONS = {
    "sample": "draw synthetic points from one seeded base sample",
    "ks-sweep": "mean KS distance of SMOTE output over a grid of n and k",
    "w1-sweep": "mean Wasserstein-1 distance over a grid of n and k",
    "kl-sweep": "mean histogram KL divergence of the law of Z over a grid of n and k",
    "overlay": "kernel density of SMOTE output against the true pdf",
    "spacing-check": "Monte Carlo mean of uniform order-statistic spacings vs 1/(n+1)",
    "tailprob-check": "P(distance to rank-k neighbour >= eps) for each k, on shared trials",
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    params: dict
    out_dir: str = DEFAULT_OUT_DIR
    threads: int | None = None

    def provenance(self):
        return {"command": self.command, "seed": self.seed, "params": self.params,
                "smote_lab_version": __version__}


def _coerce(field: Field, value, path):
    """Return ``(value, error_message_or_None)``."""
    kind = field.kind
    if kind.startswith("opt_") and value is None:
        return None, None
    base = kind.removeprefix("opt_")

    def is_int(v):
        return isinstance(v, int) and not isinstance(v, bool)

    if base == "int":
        if is_int(value):
            return value, None
        return value, "must be an integer"
    if base == "float":
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value), None
        return value, "must be a number"
    if base == "bool":
        return (value, None) if isinstance(value, bool) else (value, "must be true or false")
    if base == "str":
        if field.name == "column" and is_int(value):
            return value, None
        if not isinstance(value, str):
            return value, "must be a string"
        if field.choices and value not in field.choices:
            return value, f"must be one of {', '.join(field.choices)}"
        return value, None
    if base in ("ints", "floats"):
        if not isinstance(value, list) or not value:
            return value, "must be a non-empty list"
        check = is_int if base == "ints" else (lambda v: isinstance(v, (int, float)) and not isinstance(v, bool))
        if not all(check(v) for v in value):
            return value, f"must contain only {'integers' if base == 'ints' else 'numbers'}"
        return (list(value) if base == "ints" else [float(v) for v in value]), None
    raise AssertionError(kind)


def _spec(params, errors):
    try:
        values = params["dist_params"] or _DEFAULT_PARAMS[params["dist"]]
        return DistributionSpec(params["dist"], tuple(values))
    except (ValueError, KeyError) as exc:
        errors.append(("params.dist_params", str(exc)))
        return None


def _dataset_source(params, errors):
    if params.get("dataset") is None:
        return None
    if params.get("column") is None:
        errors.append(("params.column", "required when dataset is given"))
        return None
    column = params["column"]
    if isinstance(column, str) and column.isdigit():
        column = int(column)
    try:
        ref = DatasetRef(params["dataset"], column, params["sentinel"], params["delimiter"], params["decimal"])
    except ValueError as exc:
        errors.append(("params.dataset", str(exc)))
        return None
    return experiments.DatasetSource(ref, params["normalize"])


def _prefixed(exc: ConfigError):
    return [(f"params.{p}".replace("/", "/params."), m) for p, m in exc.errors]


def build_task(cfg: RunConfig):
    """Module-level config object for ``cfg``; raises ConfigError listing every problem."""
    p, errors = cfg.params, []
    c = cfg.command
    spec = _spec(p, errors) if "dist" in p else None
    task = None
    if c == "sample":
        for name in ("n", "count", "k"):
            if p[name] < 1:
                errors.append((f"params.{name}", "must be >= 1"))
        if p["n"] >= 2 and not 1 <= p["k"] <= p["n"] - 1:
            errors.append(("params.k/params.n", f"k must lie in [1, n-1], got k={p['k']}, n={p['n']}"))
        if p["n"] < 2:
            errors.append(("params.n", "need at least 2 base points"))
        task = spec
    elif c in ("ks-sweep", "w1-sweep", "kl-sweep"):
        source = spec
        if c != "kl-sweep":
            source = _dataset_source(p, errors) or spec
        metric = {"kl-sweep": "KL", "w1-sweep": "W1"}.get(c, p.get("metric"))
        if source is not None:
            try:
                task = experiments.SweepConfig(
                    source, p["n_grid"], p["k_values"], p["trials"], p["draws"], metric, cfg.seed,
                    p["variant"], p.get("reference_size", 100_000), p.get("bins", 50),
                    p.get("calibration", False))
            except ConfigError as exc:
                errors += _prefixed(exc)
            except ValueError as exc:
                errors.append(("params", str(exc)))
    elif c == "overlay":
        errors += [(f"params.{a}", m) for a, m in experiments.validate_grid(p["n_values"], (p["k"],), "n_values", "k")]
        if p["draws"] < 2:
            errors.append(("params.draws", "must be >= 2"))
        if p["grid_points"] < 2:
            errors.append(("params.grid_points", "must be >= 2"))
        task = spec
    elif c == "spacing-check":
        errors += [("params.n", f"need n >= 2 for a spacing, got {n}") for n in p["n"] if n < 2]
        if p["trials"] < 1000:
            errors.append(("params.trials", f"must be >= 1000, got {p['trials']}"))
    elif c == "tailprob-check" and spec is not None:
        try:
            task = experiments.TailProbConfig(spec, p["n"], p["k_values"], p["epsilon"], p["trials"], cfg.seed)
        except ConfigError as exc:
            errors += _prefixed(exc)
    if errors:
        raise ConfigError(errors)
    return task


def validate_config(raw: dict) -> RunConfig:
    """Normalise a raw run-config, filling defaults; reports every error at once."""
    errors = []
    if not isinstance(raw, dict):
        raise ConfigError([("", "run-config must be a JSON object")])
    command = raw.get("command")
    if command not in SCHEMAS:
        raise ConfigError([("command", f"must be one of {', '.join(SCHEMAS)}, got {command!r}")])
    for key in raw:
        if key not in ("command", "seed", "params", "out_dir", "threads", "smote_lab_version"):
            errors.append((key, "unknown field"))
    seed = raw.get("seed", DEFAULT_SEED)
    try:
        seed = check_seed(seed)
    except (TypeError, ValueError) as exc:
        errors.append(("seed", str(exc)))
    threads = raw.get("threads")
    if threads is not None and (not isinstance(threads, int) or isinstance(threads, bool) or threads < 1):
        errors.append(("threads", "must be a positive integer"))
        threads = None
    raw_params = raw.get("params", {})
    if not isinstance(raw_params, dict):
        errors.append(("params", "must be an object"))
        raw_params = {}
    schema = {f.name: f for f in SCHEMAS[command]}
    for key in raw_params:
        if key not in schema:
            errors.append((f"params.{key}", "unknown field"))
    params = {}
    for name, field in schema.items():
        value, err = _coerce(field, raw_params.get(name, field.default), f"params.{name}")
        if err:
            errors.append((f"params.{name}", err))
        params[name] = value
    if errors:
        raise ConfigError(errors)
    cfg = RunConfig(command, seed, params, str(raw.get("out_dir", DEFAULT_OUT_DIR)), threads)
    build_task(cfg)
    return cfg


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _flag(name):
    return "--" + name.replace("_", "-")


def _add_field(parser, field: Field):
    kw = {"dest": field.name, "default": argparse.SUPPRESS}
    shown = json.dumps(field.default)
    help_text = f"{field.help} (default: {shown})"
    base = field.kind.removeprefix("opt_")
    if base == "bool":
        kw["action"] = argparse.BooleanOptionalAction
    elif base in ("ints", "floats"):
        kw["nargs"] = "+"
        kw["type"] = int if base == "ints" else float
    else:
        kw["type"] = {"int": int, "float": float, "str": str}[base]
        if field.choices:
            kw["choices"] = field.choices
    parser.add_argument(_flag(field.name), help=help_text, **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="smote-lab", description="Seeded SMOTE-k / SMOTE-K samplers and convergence studies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for command, fields in SCHEMAS.items():
        p = sub.add_parser(command, help=_DESCRIPTIONS[command], description=_DESCRIPTIONS[command])
        p.add_argument("--config", default=argparse.SUPPRESS,
                       help="JSON run-config; flags override its values (default: none)")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                       help=f"64-bit unsigned RNG seed (default: {DEFAULT_SEED})")
        p.add_argument("--out-dir", dest="out_dir", default=argparse.SUPPRESS,
                       help=f"directory for all outputs (default: {DEFAULT_OUT_DIR})")
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                       help=f"worker threads; never changes results (default: ${THREADS_ENV} or CPU count)")
        p.add_argument("--png", action="store_true", default=False,
                       help="also render matplotlib PNG figures (default: false)")
        for field in fields:
            _add_field(p, field)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    raw = {}
    if hasattr(args, "config"):
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError([("config", f"file not found: {args.config}")]) from None
        except json.JSONDecodeError as exc:
            raise ConfigError([("config", f"invalid JSON: {exc}")]) from None
        if not isinstance(raw, dict):
            raise ConfigError([("config", "run-config must be a JSON object")])
        if raw.get("command", args.command) != args.command:
            raise ConfigError([("command", f"config is for {raw['command']!r}, not {args.command!r}")])
    raw = dict(raw)
    raw["command"] = args.command
    params = dict(raw.get("params") or {})
    for field in SCHEMAS[args.command]:
        if hasattr(args, field.name):
            params[field.name] = getattr(args, field.name)
    raw["params"] = params
    for key in ("seed", "out_dir", "threads"):
        if hasattr(args, key):
            raw[key] = getattr(args, key)
    return validate_config(raw)


# -- commands ---------------------------------------------------------------

def _fmt(v):
    return f"{v:.6g}"


def _figures(plot, out, stem, png):
    render_line_plot(plot, out / f"{stem}.svg")
    if png:
        from .figures import save_figure
        save_figure(plot, out / f"{stem}.png")


def _run_sample(cfg, spec, out, threads, png):
    p = cfg.params
    base = sample_iid(spec, p["n"], cfg.seed, _BASE_SAMPLE_TAG)
    smote = SmoteConfig(p["k"], Variant(p["variant"]), cfg.seed)
    z = generate_batch(base, smote, p["count"], threads=threads)
    write_table_csv(("index", "value"), list(enumerate(base)), out / "base.csv")
    write_table_csv(("index", "value"), list(enumerate(z)), out / "sample.csv")
    print(f"# base sample n={p['n']} min={_fmt(base.min())} max={_fmt(base.max())}")
    for v in z:
        print(_fmt(v))


def _sweep_plot(result, title, y_label):
    series = []
    for k in sorted({r.k for r in result.rows}):
        rows = sorted((r for r in result.rows if r.k == k), key=lambda r: r.n)
        series.append(Series(f"k = {k}", [r.n for r in rows], [r.mean for r in rows]))
    return PlotSpec(series, "sample size n", y_label, title)


def _run_sweep(cfg, task, out, threads, png):
    runner, label = {
        "ks-sweep": (experiments.run_ks_sweep, "KS distance"),
        "w1-sweep": (experiments.run_wasserstein_sweep, "Wasserstein-1 distance"),
        "kl-sweep": (experiments.run_kl_sweep, "KL divergence"),
    }[cfg.command]
    result = runner(task, threads=threads)
    write_sweep_csv(result, out / "sweep.csv")
    _figures(_sweep_plot(result, f"{cfg.command} ({task.metric.value})", label), out, "sweep", png)
    for r in sorted(result.rows, key=lambda r: (r.k, r.n)):
        print(f"n={r.n} k={r.k} mean={_fmt(r.mean)} std_error={_fmt(r.std_error)} trials={r.trials}")


def _run_overlay(cfg, spec, out, threads, png):
    p = cfg.params
    grid = experiments.default_grid(spec, p["grid_points"])
    res = experiments.run_density_overlay(spec, p["n_values"], p["k"], p["draws"], grid, cfg.seed, threads)
    ns = sorted(res.curves)
    rows = [(x, f, *(res.curves[n][i] for n in ns)) for i, (x, f) in enumerate(zip(res.grid, res.pdf))]
    write_table_csv(("x", "pdf", *(f"n={n}" for n in ns)), rows, out / "overlay.csv")
    series = [Series(f"n = {n}", res.grid, res.curves[n]) for n in ns]
    series.append(Series("true pdf", res.grid, res.pdf, dashed=True))
    _figures(PlotSpec(series, "x", "density", f"density of Z, k = {p['k']}"), out, "overlay", png)
    for n in ns:
        inner = (res.grid >= np.quantile(res.grid, 0.25)) & (res.grid <= np.quantile(res.grid, 0.75))
        dev = np.max(np.abs(res.curves[n] - res.pdf)[inner])
        print(f"n={n} k={p['k']} max_abs_dev_central={_fmt(dev)}")


def _run_spacing(cfg, out, threads, png):
    p = cfg.params
    rows = experiments.run_spacing_check(p["n"], p["trials"], cfg.seed, threads)
    write_table_csv(("n", "k", "mean", "std_error", "target", "abs_dev"),
                    [(r.n, r.k, r.mean, r.std_error, r.target, r.abs_dev) for r in rows], out / "spacing.csv")
    series = []
    for n in p["n"]:
        mine = [r for r in rows if r.n == n]
        series.append(Series(f"n = {n}", [r.k for r in mine], [r.mean for r in mine]))
        series.append(Series(f"1/(n+1), n = {n}", [r.k for r in mine], [r.target for r in mine], dashed=True))
    _figures(PlotSpec(series, "spacing index k", "mean spacing", "uniform spacings"), out, "spacing", png)
    for r in rows:
        print(f"n={r.n} k={r.k} mean={_fmt(r.mean)} std_error={_fmt(r.std_error)} "
              f"target={_fmt(r.target)} abs_dev={_fmt(r.abs_dev)}")


def _run_tailprob(cfg, task, out, threads, png):
    rows = experiments.run_tail_prob_check(task, threads)
    write_table_csv(("k", "probability", "std_error"), [(r.k, r.probability, r.std_error) for r in rows],
                    out / "tailprob.csv")
    plot = PlotSpec([Series(f"eps = {task.epsilon:g}", [r.k for r in rows], [r.probability for r in rows])],
                    "neighbour rank k", "P(D_(k) >= eps)", f"tail probabilities, n = {task.n}")
    _figures(plot, out, "tailprob", png)
    for r in rows:
        print(f"k={r.k} eps={task.epsilon:g} probability={_fmt(r.probability)} std_error={_fmt(r.std_error)}")


def execute(cfg: RunConfig, png: bool = False) -> Path:
    task = build_task(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    threads = resolve_threads(cfg.threads)
    write_json(cfg.provenance(), out / "provenance.json")
    c = cfg.command
    if c == "sample":
        _run_sample(cfg, task, out, threads, png)
    elif c.endswith("-sweep"):
        _run_sweep(cfg, task, out, threads, png)
    elif c == "overlay":
        _run_overlay(cfg, task, out, threads, png)
    elif c == "spacing-check":
        _run_spacing(cfg, out, threads, png)
    else:
        _run_tailprob(cfg, task, out, threads, png)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"smote-lab: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        execute(cfg, png=args.png)
    except ConfigError as exc:
        print(f"smote-lab: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SmoteLabError, OSError, ValueError) as exc:
        print(f"smote-lab: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
