"""Command-line entry point: ``synth``, ``run``, ``predict`` and ``heatmap-export``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 solver failure (non-convergence at the chosen optimum, no admissible grid
point, divergence).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import platform
import sys
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np

from . import synthdata
from .analysis import rejection_region, selection_frequency
from .data import CenteringTransform, Dataset, HyperParams, LinearModel, TaskKind, make_folds
from .pipeline import (
    DEFAULT_MU_SWEEP,
    GridSpec,
    NoAdmissibleParams,
    SweepMode,
    default_grid,
    fold_stability,
    stage1_grid_search,
    stage2_sweep,
)
from .solver import DivergenceError, IterationConfig
from .tabular import (
    DataError,
    dump_json,
    fmt,
    read_labels,
    read_matrix,
    split_label_column,
    write_labels,
    write_matrix,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_SOLVER = 0, 1, 2, 3
MODEL_FORMAT = "nested-enet-model/1"

logger = logging.getLogger("nested_enet")


class ConfigError(ValueError):
    pass


class SolverFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a ``run`` needs. Paths are resolved when loaded.

    ``mu_sweep`` entries are numbers or strings such as ``"1000tau"``, meaning
    a multiple of the tau selected in the first stage. ``folds`` is a count or
    ``"loo"``. Either ``labels`` (two-column file) or ``label_column`` (a
    column of the train matrix) supplies the responses.
    """

    train: str
    labels: str | None = None
    label_column: str | None = None
    test: str | None = None
    test_labels: str | None = None
    test_fraction: float | None = None
    task_kind: str = "classification"
    folds: int | str = 10
    stratify: bool = False
    seed: int = 0
    n_tau: int = 30
    tau_ratio: float = 1e-4
    tau_values: tuple[float, ...] | None = None
    n_lambda: int = 10
    lambda_range: tuple[float, float] = (1e-8, 1e2)
    lambda_values: tuple[float, ...] | None = None
    mu_stage1: float = 1e-6
    mu_sweep: tuple[float | str, ...] = DEFAULT_MU_SWEEP
    mode: str = "cascade"
    metric: str = "default"
    tolerance_numerator: float = 0.1
    max_iterations: int = 1_000_000
    kkt_tolerance: float = 1e-5
    sweep_stability: bool = False
    out: str = "results"
    workers: int | None = None

    def __post_init__(self):
        for name in ("tau_values", "lambda_values", "lambda_range", "mu_sweep"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, tuple(v))

    # fields that affect outputs; ``out`` and ``workers`` do not
    def manifest_fields(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out")
        d.pop("workers")
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}

    def validate(self) -> None:
        for name in ("train", "labels", "test", "test_labels"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{name}: file not found: {path}")
        if (self.labels is None) == (self.label_column is None):
            raise ConfigError("give exactly one of 'labels' and 'label_column'")
        if self.test is not None and self.test_fraction is not None:
            raise ConfigError("give at most one of 'test' and 'test_fraction'")
        if self.test_labels is not None and self.test is None:
            raise ConfigError("'test_labels' needs 'test'")
        if self.test_fraction is not None and not 0 < self.test_fraction < 1:
            raise ConfigError("test_fraction must lie in (0, 1)")
        if self.task_kind not in {k.value for k in TaskKind}:
            raise ConfigError(f"task_kind must be 'classification' or 'regression', got {self.task_kind!r}")
        if self.folds != "loo" and not (isinstance(self.folds, int) and self.folds >= 2):
            raise ConfigError(f"folds must be an integer >= 2 or 'loo', got {self.folds!r}")
        if self.mode not in {m.value for m in SweepMode}:
            raise ConfigError(f"mode must be 'cascade' or 'independent', got {self.mode!r}")
        if self.metric not in ("default", "mse"):
            raise ConfigError("metric must be 'default' or 'mse'")
        if self.n_tau < 1 or not 0 < self.tau_ratio < 1:
            raise ConfigError("n_tau must be >= 1 and tau_ratio in (0, 1)")
        if self.n_lambda < 1 or len(self.lambda_range) != 2 or not 0 < self.lambda_range[0] <= self.lambda_range[1]:
            raise ConfigError("n_lambda must be >= 1 and lambda_range a positive (low, high) pair")
        if self.mu_stage1 < 0:
            raise ConfigError("mu_stage1 must be nonnegative")
        if not self.mu_sweep:
            raise ConfigError("mu_sweep must not be empty")
        for m in self.mu_sweep:
            _mu_entry(m)
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            self.iteration_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def iteration_config(self) -> IterationConfig:
        return IterationConfig(
            tolerance_numerator=self.tolerance_numerator,
            max_iterations=self.max_iterations,
            kkt_tolerance=self.kkt_tolerance,
        )


def _mu_entry(m) -> tuple[float, bool]:
    """``(value, relative_to_tau)`` for one mu sweep entry."""
    if isinstance(m, str):
        s = m.strip()
        relative = s.endswith("tau")
        try:
            v = float(s[:-3] if relative else s)
        except ValueError:
            raise ConfigError(f"bad mu value {m!r}") from None
    elif isinstance(m, (int, float)) and not isinstance(m, bool):
        v, relative = float(m), False
    else:
        raise ConfigError(f"bad mu value {m!r}")
    if not np.isfinite(v) or v < 0:
        raise ConfigError(f"mu values must be finite and nonnegative, got {m!r}")
    return v, relative


def resolve_mu_sweep(entries, tau: float) -> tuple[float, ...]:
    values = []
    for m in entries:
        v, relative = _mu_entry(m)
        values.append(v * tau if relative else v)
    return tuple(values)


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    """Read a JSON config (or a run manifest) and apply flag overrides.

    Relative paths inside the file are taken relative to the file itself.
    """
    raw: dict = {}
    base = Path.cwd()
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"{path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        if "config" in raw and "versions" in raw:
            raw = raw["config"]
        base = Path(path).resolve().parent
    raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "train" not in raw:
        raise ConfigError("config needs 'train'")
    for name in ("train", "labels", "test", "test_labels"):
        if raw.get(name) is not None:
            # flag-supplied paths are relative to the working directory
            root = Path.cwd() if name in overrides and overrides[name] is not None else base
            raw[name] = str((root / raw[name]).resolve())
    try:
        cfg = ExperimentConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def _dataset(table, responses, kind: TaskKind, path) -> Dataset:
    try:
        return Dataset(table.values, responses, table.feature_ids, kind)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None


def load_data(cfg: ExperimentConfig):
    """``(train, test_or_None, train_sample_ids, test_sample_ids)``."""
    kind = TaskKind(cfg.task_kind)
    classification = kind is TaskKind.CLASSIFICATION
    table = read_matrix(cfg.train)
    if cfg.label_column is not None:
        table, y = split_label_column(table, cfg.label_column, cfg.train, classification)
    else:
        y = read_labels(cfg.labels, table.sample_ids, classification)
    train = _dataset(table, y, kind, cfg.train)
    train_ids, test_ids = table.sample_ids, ()
    test = None
    if cfg.test is not None:
        ttable = read_matrix(cfg.test)
        if cfg.label_column is not None and cfg.test_labels is None:
            ttable, ty = split_label_column(ttable, cfg.label_column, cfg.test, classification)
        elif cfg.test_labels is not None:
            ty = read_labels(cfg.test_labels, ttable.sample_ids, classification)
        else:
            raise DataError(f"{cfg.test}: no labels for the test matrix")
        ttable = _align(ttable, train.feature_ids, cfg.test)
        test = _dataset(ttable, ty, kind, cfg.test)
        test_ids = ttable.sample_ids
    elif cfg.test_fraction is not None:
        n_test = int(round(cfg.test_fraction * train.n))
        if not 0 < n_test < train.n:
            raise DataError("test_fraction leaves an empty train or test part")
        order = synthdata.rng_for(cfg.seed).permutation(train.n)
        te, tr = np.sort(order[:n_test]), np.sort(order[n_test:])
        test, train = train.rows(te), train.rows(tr)
        test_ids = tuple(table.sample_ids[i] for i in te)
        train_ids = tuple(table.sample_ids[i] for i in tr)
    return train, test, train_ids, test_ids


def _align(table, feature_ids, path):
    """Reorder the columns of ``table`` to ``feature_ids``; ids must match as sets."""
    have = set(table.feature_ids)
    want = set(feature_ids)
    missing = sorted(want - have)
    extra = sorted(have - want)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing feature ids: {', '.join(missing)}")
        if extra:
            parts.append(f"unexpected feature ids: {', '.join(extra)}")
        raise DataError(f"{path}: " + "; ".join(parts))
    col = {f: j for j, f in enumerate(table.feature_ids)}
    idx = [col[f] for f in feature_ids]
    return dataclasses.replace(table, feature_ids=tuple(feature_ids), values=table.values[:, idx])


def _finite_or_none(a):
    return [[float(v) if np.isfinite(v) else None for v in row] for row in np.asarray(a)]


def model_to_dict(model: LinearModel, task_kind: TaskKind) -> dict:
    return {
        "format": MODEL_FORMAT,
        "task_kind": task_kind.value,
        "feature_ids": list(model.feature_ids),
        "feature_means": model.centering.feature_means.tolist(),
        "response_mean": model.centering.response_mean,
        "support": [[model.feature_ids[j], float(model.weights[j])] for j in model.support],
        "hyperparams": {"tau": model.hyperparams.tau, "mu": model.hyperparams.mu, "lambda": model.hyperparams.lam},
        "converged": model.converged,
    }


def load_model(path) -> tuple[LinearModel, TaskKind]:
    try:
        d = json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(d, dict) or d.get("format") != MODEL_FORMAT:
        raise DataError(f"{path}: not a model file")
    ids = list(d["feature_ids"])
    index = {f: j for j, f in enumerate(ids)}
    weights = np.zeros(len(ids))
    for fid, w in d["support"]:
        if fid not in index:
            raise DataError(f"{path}: support feature {fid!r} not among feature ids")
        weights[index[fid]] = w
    hp = d["hyperparams"]
    model = LinearModel(
        weights,
        CenteringTransform(np.array(d["feature_means"], dtype=float), d["response_mean"]),
        HyperParams(hp["tau"], hp["mu"], hp["lambda"]),
        tuple(ids),
        bool(d.get("converged", True)),
    )
    return model, TaskKind(d["task_kind"])


def versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("nested-enet", "numpy", "scipy", "numba"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def run_experiment(cfg: ExperimentConfig, out: Path, workers: int) -> int:
    train, test, train_ids, test_ids = load_data(cfg)
    kind = train.task_kind
    k = train.n if cfg.folds == "loo" else int(cfg.folds)
    if k > train.n:
        raise DataError(f"{k} folds requested for {train.n} training samples")
    folds = make_folds(train.n, k, cfg.seed, train.responses, cfg.stratify)
    iteration = cfg.iteration_config()
    base = default_grid(train, cfg.n_tau, cfg.tau_ratio, cfg.n_lambda, tuple(cfg.lambda_range), cfg.mu_stage1, (cfg.mu_stage1,))
    grid = GridSpec(
        cfg.tau_values if cfg.tau_values is not None else base.tau_values,
        cfg.lambda_values if cfg.lambda_values is not None else base.lambda_values,
        cfg.mu_stage1,
        (cfg.mu_stage1,),
    )
    cv = stage1_grid_search(train, grid, folds, iteration, metric=cfg.metric, workers=workers)
    try:
        grid = dataclasses.replace(grid, mu_sweep=resolve_mu_sweep(cfg.mu_sweep, cv.tau_opt))
    except ValueError as exc:
        raise ConfigError(f"mu_sweep: {exc}") from None
    sweep = stage2_sweep(train, test, cv, grid, iteration, cfg.mode)

    out.mkdir(parents=True, exist_ok=True)
    (out / "models").mkdir(exist_ok=True)
    entries = []
    for i, (mu, model, err) in enumerate(zip(sweep.mu_values, sweep.models, sweep.test_errors)):
        name = f"models/model_{i:02d}.json"
        dump_json(out / name, model_to_dict(model, kind))
        entry = {
            "mu": mu,
            "cardinality": len(model.support),
            "support": [model.feature_ids[j] for j in model.support],
            "model": name,
            "converged": model.converged,
            "test_error": err.to_dict() if err is not None else None,
            "rejection": None,
        }
        if kind is TaskKind.CLASSIFICATION:
            scored = test if test is not None else train
            entry["rejection"] = rejection_region(model.scores(scored.samples), scored.responses).to_dict()
            entry["rejection"]["evaluated_on"] = "test" if test is not None else "train"
        entries.append(entry)

    stage1_stability = selection_frequency(cv.supports_at_optimum(), train.p)
    stability = {
        "stage1": {
            **stage1_stability.to_dict(train.feature_ids),
            "always_selected": stage1_stability.always_selected,
            "mean_support_size": stage1_stability.mean_support_size,
        }
    }
    if cfg.sweep_stability:
        reports = fold_stability(train, folds, cv.tau_opt, sweep.mu_values, iteration, cfg.mode, workers=workers)
        stability["sweep"] = [{"mu": mu, **r.to_dict(train.feature_ids)} for mu, r in zip(sweep.mu_values, reports)]

    report = {
        "task_kind": kind.value,
        "n_train": train.n,
        "n_test": test.n if test is not None else 0,
        "p": train.p,
        "train_samples": list(train_ids),
        "test_samples": list(test_ids),
        "stage1": {
            "folds": k,
            "mu": cv.mu,
            "tau_values": list(cv.tau_values),
            "lambda_values": list(cv.lambda_values),
            "error_surface": _finite_or_none(cv.error_surface),
            "error_se": _finite_or_none(cv.error_se),
            "tau_opt": cv.tau_opt,
            "lambda_opt": cv.lambda_opt,
            "min_error": cv.min_error,
        },
        "sweep": {
            "mode": sweep.mode.value,
            "entries": entries,
            "nesting": sweep.nesting.to_dict() if sweep.nesting is not None else None,
        },
        "stability": stability,
    }
    dump_json(out / "report.json", report)
    manifest = {
        "config": cfg.manifest_fields(),
        "seeds": {"folds": cfg.seed, "test_split": cfg.seed if cfg.test_fraction is not None else None, "power_iteration": 0},
        "versions": versions(),
    }
    dump_json(out / "manifest.json", manifest)

    failed = [mu for mu, m in zip(sweep.mu_values, sweep.models) if not m.converged]
    if failed:
        raise SolverFailure(
            f"selection did not converge at tau={cv.tau_opt:.6g} for mu in {failed}; "
            "raise max_iterations or kkt_tolerance (outputs were written)"
        )
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {
        "seed": args.seed,
        "folds": _parse_folds(args.folds) if args.folds is not None else None,
        "mode": args.mode,
        "mu_sweep": _parse_mu_list(args.mu_sweep) if args.mu_sweep is not None else None,
        "out": args.out,
        "workers": args.workers,
        "train": args.train,
        "labels": args.labels,
        "test": args.test,
        "test_labels": args.test_labels,
        "task_kind": args.task_kind,
    }
    cfg = load_config(args.config, overrides)
    workers = cfg.workers or os.cpu_count() or 1
    return run_experiment(cfg, Path(cfg.out), workers)


def _parse_folds(s: str):
    if s == "loo":
        return "loo"
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"--folds must be an integer or 'loo', got {s!r}") from None


def _parse_mu_list(s: str):
    items = []
    for part in s.split(","):
        part = part.strip()
        if not part:
            raise ConfigError(f"empty entry in --mu-sweep {s!r}")
        items.append(part if part.endswith("tau") else _mu_entry(part)[0])
    return items


def _spec_overrides(cls, config_path, sets, seed):
    raw = {}
    if config_path is not None:
        try:
            raw = json.loads(Path(config_path).read_text())
        except OSError as exc:
            raise ConfigError(f"{config_path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    for item in sets or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            raw[key] = json.loads(value)
        except json.JSONDecodeError:
            raw[key] = value
    if seed is not None:
        raw["seed"] = seed
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} fields: {', '.join(unknown)}")
    for key in ("true_weights", "input_range", "weight_range"):
        if isinstance(raw.get(key), list):
            raw[key] = tuple(raw[key])
    try:
        return cls(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def cmd_synth(args) -> int:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    if args.kind == "toy_regression":
        spec = _spec_overrides(synthdata.ToyRegressionSpec, args.config, args.set, args.seed)
        train, validation, truth = synthdata.generate_toy_regression(spec)
        for name, data, prefix in (("train", train, "s"), ("validation", validation, "v")):
            ids = [f"{prefix}{i + 1}" for i in range(data.n)]
            write_matrix(out / f"{name}.tsv", ids, data.feature_ids, data.samples)
            write_labels(out / f"{name}_labels.tsv", ids, data.responses)
        sidecar = {
            "kind": args.kind,
            "spec": _jsonable(dataclasses.asdict(spec)),
            "weights": {train.feature_ids[j]: float(truth[j]) for j in np.flatnonzero(truth)},
        }
    else:
        spec = _spec_overrides(synthdata.GroupedToySpec, args.config, args.set, args.seed)
        data, groups = synthdata.generate_grouped_toy(spec)
        if args.classification:
            data = synthdata.to_classification(data)
        ids = [f"s{i + 1}" for i in range(data.n)]
        write_matrix(out / "data.tsv", ids, data.feature_ids, data.samples)
        write_labels(out / "labels.tsv", ids, data.responses, "label" if args.classification else "response")
        sidecar = {
            "kind": args.kind,
            "task_kind": data.task_kind.value,
            "spec": _jsonable(dataclasses.asdict(spec)),
            "groups": [[data.feature_ids[j] for j in sorted(g)] for g in groups],
            "group_positions": [[j + 1 for j in sorted(g)] for g in groups],
        }
    dump_json(out / "truth.json", sidecar)
    return EXIT_OK


def _jsonable(d):
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def cmd_predict(args) -> int:
    model, kind = load_model(args.model)
    table = _align(read_matrix(args.matrix), model.feature_ids, args.matrix)
    scores = model.scores(table.values)
    rows = ["sample\tscore" + ("\tlabel" if kind is TaskKind.CLASSIFICATION else "")]
    for sid, s in zip(table.sample_ids, scores):
        line = f"{sid}\t{fmt(s)}"
        if kind is TaskKind.CLASSIFICATION:
            line += "\t1" if s >= 0 else "\t-1"
        rows.append(line)
    text = "\n".join(rows) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def heatmap_matrix(model: LinearModel, table):
    """Support rows (by decreasing |weight|) x samples, each row standardized."""
    if not model.support:
        raise DataError("model has an empty support")
    order = sorted(model.support, key=lambda j: (-abs(model.weights[j]), j))
    block = table.values[:, order].T
    sd = block.std(axis=1)
    flat = np.flatnonzero(sd == 0)
    if flat.size:
        raise DataError(f"zero variance feature: {model.feature_ids[order[flat[0]]]}")
    z = (block - block.mean(axis=1, keepdims=True)) / sd[:, None]
    return [model.feature_ids[j] for j in order], z


def cmd_heatmap_export(args) -> int:
    model, _ = load_model(args.model)
    table = _align(read_matrix(args.matrix), model.feature_ids, args.matrix)
    ids, z = heatmap_matrix(model, table)
    out = Path(args.out or "heatmap.tsv")
    write_matrix(out, ids, table.sample_ids, z, corner="feature")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nested-enet", description="Two-stage elastic-net feature selection.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("synth", help="write a synthetic dataset")
    common(p)
    p.add_argument("kind", choices=["toy_regression", "grouped_toy"])
    p.add_argument("--seed", type=int)
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="generator field override (JSON value)")
    p.add_argument("--classification", action="store_true", help="grouped_toy: write sign labels")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="grid search, then mu sweep")
    common(p)
    p.add_argument("--train")
    p.add_argument("--labels")
    p.add_argument("--test")
    p.add_argument("--test-labels")
    p.add_argument("--task-kind", choices=[k.value for k in TaskKind])
    p.add_argument("--seed", type=int)
    p.add_argument("--folds", help="fold count or 'loo'")
    p.add_argument("--mode", choices=[m.value for m in SweepMode])
    p.add_argument("--mu-sweep", help="comma list; entries like 1000tau scale with the selected tau")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("predict", help="score a matrix with a saved model")
    p.add_argument("model")
    p.add_argument("matrix")
    p.add_argument("--out", help="predictions file (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("heatmap-export", help="standardized support submatrix")
    p.add_argument("model")
    p.add_argument("matrix")
    p.add_argument("--out", help="output file (default: heatmap.tsv)")
    p.set_defaults(func=cmd_heatmap_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"I/O error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_DATA
    except (SolverFailure, NoAdmissibleParams, DivergenceError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
