"""Batch command-line front end.

Subcommands: spectrum, cluster, relevance, select, evaluate. Structured
results are JSON, plot data is two-column TSV. Exit codes: 0 success,
1 internal failure, 2 invalid input or flags.

Tolerance resolution: --tol flag, else `tol` in --config, else the
RANKMED_TOL environment variable, else the built-in default policy.
"""

import functools
import os
import sys

import click

from .data import DatasetError, load_csv
from .report import (
    TOOL,
    VERSION,
    cluster_report,
    evaluate_report,
    per_class_tsv,
    relevance_report,
    scores_tsv,
    select_report,
    spectrum_lines,
    to_json,
)
from .tree import evaluate_subset


def _fail(message, code):
    click.echo(f"{TOOL}: error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (FileNotFoundError, DatasetError, ValueError, IndexError, KeyError) as exc:
            _fail(str(exc), 2)
        except (click.ClickException, SystemExit, KeyboardInterrupt):
            raise
        except Exception as exc:  # pragma: no cover - defensive
            _fail(f"internal failure: {exc!r}", 1)

    return wrapper


def _read_config(path):
    if path is None:
        return {}
    config = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DatasetError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            config[key.strip().replace("-", "_")] = value.strip()
    return config


def _resolve(flag, config, key, cast, default, env=None):
    if flag is not None:
        return flag
    if key in config:
        try:
            return cast(config[key])
        except ValueError:
            raise DatasetError(f"config key {key}: cannot parse {config[key]!r}") from None
    if env is not None and os.environ.get(env):
        return cast(os.environ[env])
    return default


def _load(input_path, label_column, config):
    label_column = _resolve(label_column, config, "label_column", str, None)
    if label_column is None:
        raise DatasetError("--label-column is required (flag or config)")
    floor = _resolve(None, config, "variance_floor", float, 0.0)
    return load_csv(input_path, label_column, floor)


def _emit(text, output):
    if output in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_feature_refs(text, feature_names):
    indices = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token in feature_names:
            indices.append(feature_names.index(token) + 1)
        elif token.isdigit() and 1 <= int(token) <= len(feature_names):
            indices.append(int(token))
        else:
            raise DatasetError(f"unknown feature reference {token!r}")
    if not indices:
        raise DatasetError("empty feature list")
    return indices


_common = [
    click.argument("input_path", metavar="INPUT", type=click.Path()),
    click.option("--label-column", help="Name of the class label column."),
    click.option("--config", "config_path", type=click.Path(), help="Flat key=value defaults; flags win."),
    click.option("-o", "--output", default=None, help="Output file (default stdout)."),
]


def _with_common(fn):
    for deco in reversed(_common):
        fn = deco(fn)
    return fn


@click.group()
@click.version_option(VERSION, prog_name=TOOL)
def main():
    """Feature redundancy and relevance analysis over labeled CSV datasets."""


@main.command()
@_with_common
@click.option("--tol", type=float, default=None, help="Relative singular-value tolerance (0 = default policy).")
@_guarded
def spectrum(input_path, label_column, config_path, output, tol):
    """Eigen spectrum of the feature matrix as TSV plus effective rank."""
    config = _read_config(config_path)
    dataset = _load(input_path, label_column, config)
    tol = _resolve(tol, config, "tol", float, 0.0, env="RANKMED_TOL")
    lines, _ = spectrum_lines(dataset, tol)
    _emit("\n".join(lines) + "\n", output)


@main.command()
@_with_common
@click.option("--tol", type=float, default=None, help="Relative dependency tolerance (0 = default policy).")
@_guarded
def cluster(input_path, label_column, config_path, output, tol):
    """Rank-preserving clusters and medoids as a JSON report."""
    config = _read_config(config_path)
    dataset = _load(input_path, label_column, config)
    tol = _resolve(tol, config, "tol", float, 0.0, env="RANKMED_TOL")
    report, _ = cluster_report(dataset, tol)
    for note in report["warnings"]:
        click.echo(f"{TOOL}: warning: {note}", err=True)
    _emit(to_json(report), output)


@main.command()
@_with_common
@click.option("--gamma", type=float, default=None, help="Regularization strength (default 1.0).")
@click.option("--tol", type=float, default=None, help="Dependency tolerance for --medoids-only clustering.")
@click.option("--no-compensation", is_flag=True, help="Skip class-occurrence compensation (plain Z-score).")
@click.option("--medoids-only", is_flag=True, help="Restrict scoring to the medoid features.")
@click.option("--total-tsv", "total_path", type=click.Path(), default=None, help="Also write total scores as TSV.")
@click.option("--per-class-tsv", "per_class_path", type=click.Path(), default=None, help="Also write per-class scores as TSV.")
@_guarded
def relevance(input_path, label_column, config_path, output, gamma, tol,
              no_compensation, medoids_only, total_path, per_class_path):
    """Per-class and total feature relevance as a JSON report."""
    config = _read_config(config_path)
    dataset = _load(input_path, label_column, config)
    gamma = _resolve(gamma, config, "gamma", float, 1.0)
    tol = _resolve(tol, config, "tol", float, 0.0, env="RANKMED_TOL")
    report, _, _ = relevance_report(
        dataset, gamma=gamma, compensated=not no_compensation,
        medoids_only=medoids_only, tol=tol,
    )
    if total_path:
        _emit("\n".join(scores_tsv(report)) + "\n", total_path)
    if per_class_path:
        _emit("\n".join(per_class_tsv(report)) + "\n", per_class_path)
    _emit(to_json(report), output)


@main.command()
@_with_common
@click.option("--tol", type=float, default=None, help="Relative dependency tolerance (0 = default policy).")
@click.option("--gamma", type=float, default=None, help="Regularization strength (default 1.0).")
@click.option("--drop-bottom", type=int, default=None, help="Drop the N lowest-relevance medoids (default 0).")
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
@_guarded
def select(input_path, label_column, config_path, output, tol, gamma, drop_bottom, fmt):
    """Medoid features minus the N lowest-relevance ones, ascending."""
    config = _read_config(config_path)
    dataset = _load(input_path, label_column, config)
    tol = _resolve(tol, config, "tol", float, 0.0, env="RANKMED_TOL")
    gamma = _resolve(gamma, config, "gamma", float, 1.0)
    drop_bottom = _resolve(drop_bottom, config, "drop_bottom", int, 0)
    report, _ = select_report(dataset, drop_bottom=drop_bottom, gamma=gamma, tol=tol)
    if fmt == "text":
        lines = [f"{e['index']}\t{e['name']}\t{e['score']:.12g}" for e in report["selected"]]
        _emit("\n".join(lines) + "\n", output)
    else:
        _emit(to_json(report), output)


@main.command()
@_with_common
@click.option("--features", default=None, help="Comma-separated names or 1-based indices.")
@click.option("--auto", "auto_n", type=int, default=None,
              help="Select medoids, drop the N lowest-relevance ones, then evaluate.")
@click.option("--folds", type=int, default=None, help="Cross-validation folds (default 10).")
@click.option("--tol", type=float, default=None, help="Dependency tolerance for --auto clustering.")
@click.option("--gamma", type=float, default=None, help="Regularization strength for --auto ranking.")
@click.option("--max-depth", type=int, default=None, help="Tree depth cap (default 12).")
@click.option("--min-leaf", type=int, default=None, help="Minimum leaf size (default 2).")
@_guarded
def evaluate(input_path, label_column, config_path, output, features, auto_n, folds,
             tol, gamma, max_depth, min_leaf):
    """Cross-validated per-class TP/FP for a feature subset (JSON)."""
    config = _read_config(config_path)
    dataset = _load(input_path, label_column, config)
    folds = _resolve(folds, config, "folds", int, 10)
    max_depth = _resolve(max_depth, config, "max_depth", int, 12)
    min_leaf = _resolve(min_leaf, config, "min_leaf", int, 2)
    if (features is None) == (auto_n is None):
        raise DatasetError("exactly one of --features or --auto is required")
    if features is not None:
        subset = sorted(set(_parse_feature_refs(features, dataset.features.feature_names)))
    else:
        tol = _resolve(tol, config, "tol", float, 0.0, env="RANKMED_TOL")
        gamma = _resolve(gamma, config, "gamma", float, 1.0)
        _, subset = select_report(dataset, drop_bottom=auto_n, gamma=gamma, tol=tol)
    result = evaluate_subset(dataset.features, dataset.labels, subset,
                             folds=folds, max_depth=max_depth, min_leaf=min_leaf)
    params = {"folds": folds, "max_depth": max_depth, "min_leaf": min_leaf,
              "auto": auto_n, "features_flag": features}
    _emit(to_json(evaluate_report(dataset, result, params)), output)


if __name__ == "__main__":
    main()
