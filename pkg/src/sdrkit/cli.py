"""Command-line front end.

Five subcommands: ``simulate`` (Monte Carlo benchmark tables), ``estimate``
(fit a basis on a CSV file), ``bootstrap`` (resampling stability report),
``gamma-sweep`` (bandwidth sensitivity curves) and ``bench`` (runtime
scaling).  Every option can also be supplied through a flat JSON config
file; explicit flags win over the file.

Outputs are CSV tables plus a JSON run manifest next to each output file.
Numeric cells use 17 significant digits so a written basis reloads exactly.
Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DataError,
    MissingColumn,
    NegativeUnderSqrt,
    NonNumericCell,
    SdrkitError,
)
from .estimators import DataSet, KERNEL_METHODS, MethodSpec, estimate_subspace
from .evaluate import ExperimentPlan, bootstrap_eval, run_monte_carlo, runtime_bench
from .kernels import KernelSpec
from .simgen import SimSpec

COMMANDS = ("estimate", "simulate", "bench", "bootstrap", "gamma-sweep")

# CLI method tokens -> (method, kernel family or None)
METHOD_TOKENS = {
    "im_pr": ("im_pr", None),
    "im_gauss": ("im_k", "gaussian"),
    "im_lap": ("im_k", "laplace"),
    "im_rq": ("im_k", "rational_quadratic"),
    "iv_pr": ("iv_pr", None),
    "iv_gauss": ("iv_k", "gaussian"),
    "iv_lap": ("iv_k", "laplace"),
    "iv_rq": ("iv_k", "rational_quadratic"),
    "icmi_id": ("icmi_id", None),
    "cume": ("cume", None),
    "mddm": ("mddm", None),
    "sir": ("sir", None),
    "save": ("save", None),
}

_FLOAT_FMT = "%.17g"


@dataclass
class RunConfig:
    """Fully merged configuration for one CLI invocation."""

    command: str
    input_path: Optional[str] = None
    x_columns: list[str] = field(default_factory=list)
    y_columns: list[str] = field(default_factory=list)
    transforms: dict[str, str] = field(default_factory=dict)
    methods: list[str] = field(default_factory=list)
    d: int = 1
    gamma: Optional[float] = None
    gammas: list[float] = field(default_factory=list)
    slices: int = 5
    example: Optional[str] = None
    error: str = "normal"
    n: Optional[int] = None
    sizes: list[int] = field(default_factory=list)
    replications: int = 500
    B: int = 200
    seed: int = 0
    output_path: str = "sdrkit_output.csv"
    strict: bool = False
    timing: bool = False
    mix_wide_variance: float = 10.0


def _fmt(x: float) -> str:
    return _FLOAT_FMT % x


def _parse_columns(raw: str) -> list[str]:
    return [c.strip() for c in raw.split(",") if c.strip()]


def _parse_transforms(raw) -> dict[str, str]:
    if isinstance(raw, dict):
        table = dict(raw)
    else:
        table = {}
        for item in str(raw).split(","):
            item = item.strip()
            if not item:
                continue
            if ":" not in item:
                raise ConfigError(f"transform {item!r} must look like column:sqrt")
            name, kind = item.split(":", 1)
            table[name.strip()] = kind.strip()
    for name, kind in table.items():
        if kind not in ("none", "sqrt"):
            raise ConfigError(f"unknown transform {kind!r} for column {name!r}")
    return table


def build_method_specs(config: RunConfig) -> list[MethodSpec]:
    """Turn CLI method tokens into :class:`MethodSpec` objects."""
    if not config.methods:
        raise ConfigError("at least one --method is required")
    specs = []
    for token in config.methods:
        token = token.strip().lower()
        if token not in METHOD_TOKENS:
            raise ConfigError(
                f"unknown method {token!r}; choose from {sorted(METHOD_TOKENS)}"
            )
        method, family = METHOD_TOKENS[token]
        if family is not None:
            if config.gamma is None:
                raise ConfigError(f"method {token!r} requires --gamma")
            specs.append(MethodSpec(method, kernel=KernelSpec(family, config.gamma)))
        elif method in ("sir", "save"):
            specs.append(MethodSpec(method, slices=config.slices))
        else:
            specs.append(MethodSpec(method))
    return specs


def load_csv(
    path: str,
    x_columns: Sequence[str],
    y_columns: Sequence[str],
    transforms: Optional[dict[str, str]] = None,
    strict: bool = False,
) -> tuple[DataSet, int]:
    """Read a headered CSV into a :class:`DataSet`.

    Rows with a missing or non-numeric value in any selected column are
    dropped (lenient default) or rejected (``strict=True``).  Returns the
    data set and the number of dropped rows.
    """
    transforms = transforms or {}
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}")
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} is empty")
        header = [h.strip() for h in header]
        positions = {}
        for name in list(x_columns) + list(y_columns):
            if name not in header:
                raise MissingColumn(f"column {name!r} not found in {path} header")
            positions[name] = header.index(name)
        for name in transforms:
            if name not in positions:
                raise ConfigError(
                    f"transform refers to {name!r}, which is not a selected column"
                )
        selected = list(x_columns) + list(y_columns)
        rows = []
        dropped = 0
        for lineno, record in enumerate(reader, start=2):
            values = []
            ok = True
            for name in selected:
                pos = positions[name]
                cell = record[pos].strip() if pos < len(record) else ""
                try:
                    value = float(cell)
                    if not np.isfinite(value):
                        raise ValueError
                except ValueError:
                    if strict:
                        raise NonNumericCell(
                            f"{path}:{lineno}: column {name!r} has non-numeric "
                            f"value {cell!r}"
                        )
                    ok = False
                    break
                if transforms.get(name) == "sqrt":
                    if value < 0:
                        raise NegativeUnderSqrt(
                            f"{path}:{lineno}: sqrt transform of negative value "
                            f"{value} in column {name!r}"
                        )
                    value = float(np.sqrt(value))
                values.append(value)
            if ok:
                rows.append(values)
            else:
                dropped += 1
    if not rows:
        raise DataError(f"no usable rows in {path}")
    table = np.asarray(rows, dtype=np.float64)
    nx = len(x_columns)
    return DataSet(table[:, :nx], table[:, nx:]), dropped


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(output_path: str, config: RunConfig, extra: dict) -> None:
    manifest = {
        "command": config.command,
        "version": __version__,
        "seed": config.seed,
        "config": {
            k: v for k, v in vars(config).items() if not k.startswith("_")
        },
    }
    manifest.update(extra)
    path = Path(output_path).with_suffix(Path(output_path).suffix + ".manifest.json")
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _gamma_cell(spec: MethodSpec) -> str:
    return _fmt(spec.kernel.gamma) if spec.method in KERNEL_METHODS else ""


def _cmd_simulate(config: RunConfig) -> int:
    if config.example is None or config.n is None:
        raise ConfigError("simulate requires --example and --n")
    specs = build_method_specs(config)
    sim = SimSpec(config.example, config.n, config.error, config.seed,
                  config.mix_wide_variance)
    plan = ExperimentPlan(sim, tuple(specs), config.replications, config.d)
    result = run_monte_carlo(plan)
    rows = []
    for spec in specs:
        outcome = result.outcomes[spec.label]
        runtime = outcome.mean_runtime if config.timing else 0.0
        rows.append(
            [
                config.example,
                config.error,
                spec.label,
                _gamma_cell(spec),
                str(config.n),
                str(result.p),
                _fmt(outcome.mean_dist),
                _fmt(outcome.sd_dist),
                _fmt(runtime),
                str(outcome.failures),
            ]
        )
    _write_csv(
        config.output_path,
        ["example", "error", "method", "gamma", "n", "p",
         "mean_dist", "sd_dist", "mean_runtime_s", "failed_reps"],
        rows,
    )
    _write_manifest(config.output_path, config, {"replications": config.replications})
    return 0


def _cmd_estimate(config: RunConfig) -> int:
    if config.input_path is None:
        raise ConfigError("estimate requires --input")
    specs = build_method_specs(config)
    if len(specs) != 1:
        raise ConfigError("estimate takes exactly one method")
    data, dropped = load_csv(
        config.input_path, config.x_columns, config.y_columns,
        config.transforms, config.strict,
    )
    if dropped:
        print(f"warning: dropped {dropped} row(s) with missing or non-numeric cells",
              file=sys.stderr)
    est = estimate_subspace(data, specs[0], config.d)
    if np.max(np.abs(est.eigenvalues)) <= 1e-12:
        print("warning: degenerate spectrum; the candidate matrix is numerically zero "
              "and the basis is arbitrary", file=sys.stderr)
    header = [f"dir_{k + 1}" for k in range(est.d)]
    _write_csv(config.output_path, header,
               [[_fmt(v) for v in row] for row in est.basis])
    eig_path = str(Path(config.output_path).with_suffix("")) + "_eigenvalues.csv"
    _write_csv(eig_path, ["eigenvalue"], [[_fmt(v)] for v in est.eigenvalues])
    _write_manifest(config.output_path, config,
                    {"n": data.n, "p": data.p, "q": data.q, "dropped_rows": dropped})
    return 0


def _cmd_bootstrap(config: RunConfig) -> int:
    if config.input_path is None:
        raise ConfigError("bootstrap requires --input")
    specs = build_method_specs(config)
    data, dropped = load_csv(
        config.input_path, config.x_columns, config.y_columns,
        config.transforms, config.strict,
    )
    if dropped:
        print(f"warning: dropped {dropped} row(s) with missing or non-numeric cells",
              file=sys.stderr)
    report = bootstrap_eval(data, specs, config.d, config.B, config.seed)
    rows = []
    for spec in specs:
        method_report = report.methods[spec.label]
        rows.append(
            [
                spec.label,
                _gamma_cell(spec),
                str(data.n),
                str(data.p),
                str(config.d),
                str(config.B),
                str(method_report.failures),
                _fmt(method_report.mean_dist),
                _fmt(method_report.sd_dist),
                _fmt(method_report.mse_dist),
                _fmt(method_report.median_one_minus_r),
                _fmt(method_report.sd_one_minus_r),
            ]
        )
    _write_csv(
        config.output_path,
        ["method", "gamma", "n", "p", "d", "B", "failed",
         "mean_dist", "sd_dist", "mse_dist",
         "median_one_minus_r", "sd_one_minus_r"],
        rows,
    )
    _write_manifest(config.output_path, config, {"dropped_rows": dropped})
    return 0


def _cmd_gamma_sweep(config: RunConfig) -> int:
    if config.example is None or config.n is None:
        raise ConfigError("gamma-sweep requires --example and --n")
    if not config.gammas:
        raise ConfigError("gamma-sweep requires --gammas")
    kernel_tokens = [t for t in config.methods if METHOD_TOKENS.get(t, (None, None))[1]]
    if len(kernel_tokens) != len(config.methods):
        raise ConfigError("gamma-sweep methods must all be kernel-weighted")
    rows = []
    for gamma in config.gammas:
        sweep = RunConfig(**{**vars(config), "gamma": gamma})
        specs = build_method_specs(sweep)
        sim = SimSpec(config.example, config.n, config.error, config.seed,
                      config.mix_wide_variance)
        plan = ExperimentPlan(sim, tuple(specs), config.replications, config.d)
        result = run_monte_carlo(plan)
        for spec in specs:
            dists = result.outcomes[spec.label].distances
            ok = dists[np.isfinite(dists)]
            mse = float(np.mean(ok**2)) if ok.size else float("nan")
            rows.append([_fmt(gamma), spec.label, _fmt(mse)])
    _write_csv(config.output_path, ["gamma", "method", "mse_dist"], rows)
    _write_manifest(config.output_path, config, {"replications": config.replications})
    return 0


def _cmd_bench(config: RunConfig) -> int:
    if config.example is None:
        raise ConfigError("bench requires --example")
    if not config.sizes:
        raise ConfigError("bench requires --sizes")
    specs = build_method_specs(config)
    sim = SimSpec(config.example, config.sizes[0], config.error, config.seed,
                  config.mix_wide_variance)
    plan = ExperimentPlan(sim, tuple(specs), config.replications, config.d)
    bench = runtime_bench(plan, config.sizes)
    rows = [
        [
            row.label,
            str(row.n),
            _fmt(row.seconds_estimator),
            _fmt(row.seconds_total),
            _fmt(bench.slopes[row.label]),
        ]
        for row in bench.rows
    ]
    _write_csv(
        config.output_path,
        ["method", "n", "mean_seconds_estimator", "mean_seconds_total", "loglog_slope"],
        rows,
    )
    _write_manifest(config.output_path, config, {})
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "bootstrap": _cmd_bootstrap,
    "gamma-sweep": _cmd_gamma_sweep,
    "bench": _cmd_bench,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sdrkit",
        description="Central-subspace estimation toolkit: inverse conditional "
        "moment independence estimators, classical baselines, Monte Carlo "
        "benchmarks and bootstrap stability reports.",
    )
    parser.add_argument("--version", action="version", version=f"sdrkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="flat JSON config file; flags override it")
        cmd.add_argument("--method", action="append", dest="methods",
                         help="repeatable; e.g. im_gauss, iv_pr, sir")
        cmd.add_argument("--d", type=int, help="subspace dimension (default 1)")
        cmd.add_argument("--gamma", type=float, help="kernel bandwidth")
        cmd.add_argument("--slices", type=int, help="slice count for sir/save")
        cmd.add_argument("--seed", type=int)
        cmd.add_argument("--output", dest="output_path")
        if name in ("simulate", "gamma-sweep", "bench"):
            cmd.add_argument("--example")
            cmd.add_argument("--error")
            cmd.add_argument("--reps", type=int, dest="replications")
            cmd.add_argument("--mix-wide-variance", type=float,
                             dest="mix_wide_variance",
                             help="variance of the wide mixture component "
                             "(default 10; use 100 for the SD-10 reading)")
        if name in ("simulate", "gamma-sweep"):
            cmd.add_argument("--n", type=int)
        if name == "simulate":
            cmd.add_argument("--timing", action="store_true", default=None,
                             help="record wall-clock runtimes in the output "
                             "(breaks byte-reproducibility)")
        if name == "gamma-sweep":
            cmd.add_argument("--gammas", help="comma-separated bandwidth list")
        if name == "bench":
            cmd.add_argument("--sizes", help="comma-separated ascending sample sizes")
        if name in ("estimate", "bootstrap"):
            cmd.add_argument("--input", dest="input_path")
            cmd.add_argument("--x-columns", dest="x_columns")
            cmd.add_argument("--y-columns", dest="y_columns")
            cmd.add_argument("--transforms",
                             help="per-column transforms, e.g. colA:sqrt,colB:sqrt")
            cmd.add_argument("--strict", action="store_true", default=None,
                             help="fail on missing/non-numeric cells instead of "
                             "dropping rows")
        if name == "bootstrap":
            cmd.add_argument("--B", type=int, dest="B")
    return parser


_DEFAULTS = {
    "d": 1,
    "error": "normal",
    "slices": 5,
    "replications": 500,
    "B": 200,
    "seed": 0,
    "output_path": "sdrkit_output.csv",
    "strict": False,
    "timing": False,
    "mix_wide_variance": 10.0,
}

_LIST_FIELDS = {"x_columns", "y_columns", "methods"}


def build_config(argv: Sequence[str]) -> RunConfig:
    """Parse argv, merge the optional config file, validate invariants."""
    namespace = _build_parser().parse_args(argv)
    values = {k: v for k, v in vars(namespace).items() if k != "config"}

    file_values: dict = {}
    if getattr(namespace, "config", None):
        try:
            file_values = json.loads(Path(namespace.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(file_values, dict):
            raise ConfigError("config file must contain a flat JSON object")

    merged: dict = {"command": values.pop("command")}
    known = set(RunConfig.__dataclass_fields__)
    for key, value in file_values.items():
        if key not in known or key == "command":
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = value
    for key, value in values.items():
        if value is not None:
            merged[key] = value
    for key, value in _DEFAULTS.items():
        merged.setdefault(key, value)

    for key in ("x_columns", "y_columns"):
        if isinstance(merged.get(key), str):
            merged[key] = _parse_columns(merged[key])
    if isinstance(merged.get("methods"), str):
        merged["methods"] = _parse_columns(merged["methods"])
    if "transforms" in merged:
        merged["transforms"] = _parse_transforms(merged["transforms"])
    if isinstance(merged.get("gammas"), str):
        merged["gammas"] = [float(g) for g in _parse_columns(merged["gammas"])]
    if isinstance(merged.get("sizes"), str):
        merged["sizes"] = [int(s) for s in _parse_columns(merged["sizes"])]

    merged.setdefault("methods", [])
    merged.setdefault("x_columns", [])
    merged.setdefault("y_columns", [])
    merged.setdefault("transforms", {})
    merged.setdefault("gammas", [])
    merged.setdefault("sizes", [])
    config = RunConfig(**merged)
    _validate_config(config)
    return config


def _validate_config(config: RunConfig) -> None:
    overlap = set(config.x_columns) & set(config.y_columns)
    if overlap:
        raise ConfigError(f"columns selected as both X and Y: {sorted(overlap)}")
    if config.d < 1:
        raise ConfigError("d must be at least 1")
    if config.replications < 1:
        raise ConfigError("replications must be at least 1")
    if config.B < 1:
        raise ConfigError("B must be at least 1")
    if config.seed < 0:
        raise ConfigError("seed must be nonnegative")
    if config.gamma is not None and config.gamma <= 0:
        raise ConfigError("gamma must be positive")
    if any(g <= 0 for g in config.gammas):
        raise ConfigError("all gammas must be positive")
    if config.command in ("estimate", "bootstrap"):
        if not config.x_columns or not config.y_columns:
            raise ConfigError(f"{config.command} requires --x-columns and --y-columns")


def run(config: RunConfig) -> int:
    """Execute a validated config; returns the process exit status."""
    return _DISPATCH[config.command](config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        config = build_config(argv)
    except SdrkitError as exc:
        print(f"sdrkit: error [config]: {exc}", file=sys.stderr)
        return exc.exit_code
    try:
        return run(config)
    except SdrkitError as exc:
        stage = {2: "config", 3: "data", 4: "numerical"}.get(exc.exit_code, "run")
        print(f"sdrkit: error [{stage}] in {config.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        print(f"sdrkit: error [internal] in {config.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
