"""Command-line interface.

Subcommands::

    outlierkit list     [--format table|machine]
    outlierkit score    --config CFG --train CSV --test CSV [--out CSV]
    outlierkit labels   --config CFG --train CSV --test CSV [--out CSV]
    outlierkit evaluate --dataset NAME --seed N [--split F] [--config CFG]
                        [--manifest TSV] [--cache DIR]

Exit codes: 0 on success, 1 on data, config or runtime errors (message on
stderr), 2 on usage errors.

``list --format machine`` prints one JSON object per line with the keys
``name``, ``supervision``, ``package_tag`` and ``hyperparameters``. The
hyperparameters are a list of objects with ``name``, ``type``,
``constraint``, ``required`` and ``default``.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import default_config, parse_config
from .data import (
    BUILTIN_MANIFEST,
    CACHE_ENV,
    cache_root_from_env,
    load_dataset,
    parse_csv,
    read_manifest,
)
from .ensemble import fit_ensemble
from .exceptions import OutlierKitError, SingleClass
from .metrics import confusion_counts, precision_at_n, roc_auc
from .registry import REGISTRY
from .split import train_test_split

DEFAULT_SPLIT = 0.7


class UsageError(Exception):
    pass


def _fraction(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be a non-negative integer, got {text}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="outlierkit", description="Outlier detection toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list registered detectors")
    p.add_argument("--format", choices=("table", "machine"), default="table")

    for name, help_text in (("score", "write raw scores and probabilities"),
                            ("labels", "write normal/outlier labels")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--train", required=True, type=Path)
        p.add_argument("--test", required=True, type=Path)
        p.add_argument("--out", type=Path, help="output CSV (default: stdout)")

    p = sub.add_parser("evaluate", help="fit on a seeded split of a benchmark dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--split", type=_fraction, default=DEFAULT_SPLIT,
                   help=f"training fraction (default {DEFAULT_SPLIT})")
    p.add_argument("--config", type=Path, help="pipeline config (default: knn with defaults)")
    p.add_argument("--manifest", type=Path, default=BUILTIN_MANIFEST)
    p.add_argument("--cache", type=Path, help=f"cache root (default: ${CACHE_ENV})")
    return parser


def _read(path):
    try:
        return path.read_bytes()
    except OSError as exc:
        raise OutlierKitError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _emit(text, out, stdout):
    if out is None:
        stdout.write(text)
    else:
        try:
            out.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OutlierKitError(f"cannot write {out}: {exc.strerror or exc}") from exc


def _fmt(value):
    return repr(float(value))


def cmd_list(args, registry, stdout):
    metas = registry.list_detectors()
    if args.format == "machine":
        for meta in metas:
            stdout.write(json.dumps(meta.to_dict(), sort_keys=True) + "\n")
        return 0
    rows = [("name", "supervision", "package", "hyperparameters")]
    for meta in metas:
        params = "; ".join(
            f"{hp.name}={'<required>' if hp.required else hp.default} ({hp.constraint})"
            for hp in meta.hyperparameters
        )
        rows.append((meta.name, meta.supervision, meta.package_tag, params))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    for row in rows:
        stdout.write("  ".join(c.ljust(w) for c, w in zip(row, widths)) + "  " + row[3] + "\n")
    return 0


def _pipeline(args, registry):
    config = parse_config(_read(args.config), registry)
    train = parse_csv(_read(args.train))
    test = parse_csv(_read(args.test))
    return config, fit_ensemble(config, train, registry), test


def score_table(fitted, test):
    """Rows of ``(index, raw, probability)`` for the ``score`` command."""
    probability = fitted.predict_proba(test.features)
    if len(fitted.members_) == 1:
        raw = fitted.raw_scores(test.features).values[:, 0]
    else:
        raw = probability
    return list(zip(range(len(probability)), raw.tolist(), probability.tolist()))


def cmd_score(args, registry, stdout):
    _, fitted, test = _pipeline(args, registry)
    lines = ["index,raw,probability"]
    lines += [f"{i},{_fmt(r)},{_fmt(p)}" for i, r, p in score_table(fitted, test)]
    _emit("\n".join(lines) + "\n", args.out, stdout)
    return 0


def cmd_labels(args, registry, stdout):
    _, fitted, test = _pipeline(args, registry)
    labels = fitted.predict(test.features)
    lines = ["index,label"] + [f"{i},{label.value}" for i, label in enumerate(labels)]
    _emit("\n".join(lines) + "\n", args.out, stdout)
    return 0


def evaluate_report(config, dataset, name, split, seed, registry=None):
    """Metrics of ``config`` on a seeded split, as ordered ``(key, value)`` pairs."""
    if dataset.labels is None:
        raise OutlierKitError(f"dataset {name!r} has no ground-truth labels")
    train, test = train_test_split(dataset, split, seed)
    if train.n_samples == 0:
        raise OutlierKitError("training split is empty; use a larger --split")
    fitted = fit_ensemble(config, train.features, registry)
    scores = fitted.predict_proba(test.features)
    auc = roc_auc(scores, test.labels)
    mask = test.outlier_mask
    n_top = int(mask.sum())
    tp, fp, tn, fn = confusion_counts(fitted.predict(test.features), test.labels)
    return [
        ("dataset", name),
        ("seed", str(seed)),
        ("split", _fmt(split)),
        ("n_train", str(train.n_samples)),
        ("n_test", str(test.n_samples)),
        ("n_outliers_test", str(n_top)),
        ("roc_auc", _fmt(auc)),
        ("precision_at_n", _fmt(precision_at_n(scores, test.labels, n_top))),
        ("tp", str(tp)),
        ("fp", str(fp)),
        ("tn", str(tn)),
        ("fn", str(fn)),
    ]


def cmd_evaluate(args, registry, stdout):
    root = cache_root_from_env(args.cache)
    if root is None:
        raise UsageError(f"no cache root: pass --cache or set ${CACHE_ENV}")
    config = parse_config(_read(args.config), registry) if args.config else default_config()
    try:
        manifest = read_manifest(args.manifest)
    except OSError as exc:
        raise OutlierKitError(f"cannot read {args.manifest}: {exc.strerror or exc}") from exc
    dataset = load_dataset(args.dataset, manifest, root)
    try:
        report = evaluate_report(config, dataset, args.dataset, args.split, args.seed, registry)
    except SingleClass as exc:
        raise OutlierKitError(
            f"test split has no {exc.missing!r} instances; try a different --seed or --split"
        ) from exc
    stdout.write("".join(f"{k} = {v}\n" for k, v in report))
    return 0


COMMANDS = {"list": cmd_list, "score": cmd_score, "labels": cmd_labels,
            "evaluate": cmd_evaluate}


def main(argv=None, registry=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    registry = REGISTRY if registry is None else registry
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args, registry, stdout)
    except UsageError as exc:
        stderr.write(f"{parser.prog} {args.command}: usage error: {exc}\n")
        return 2
    except (OutlierKitError, ValueError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
