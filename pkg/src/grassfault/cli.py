"""Command-line front end.

    grassfault generate  --config gen.cfg --out data.csv
    grassfault crossval  data.csv --out reportdir [--k 10 --threads 4]
    grassfault train     data.csv --out model.json
    grassfault predict   model.json data.csv --out predictions.csv [--verbose]
    grassfault report    reportdir/report.json [--out plotdir]

Configuration files are flat ``key = value`` text; command-line flags win.
Errors are reported as one ``error: <kind>: <message>`` line on stderr with
exit status 2 (usage/configuration), 3 (data) or 4 (numerical failure).
"""
import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, fields

import numpy as np

from . import arma, grassmann, signalgen, svm
from .errors import DataFormatError, GrassfaultError, NumericalError, ParameterError
from .evaluation import METRICS, PipelineConfig, cross_validate, evaluate

FORMAT_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

_PIPELINE_KEYS = {f.name: f.type for f in fields(PipelineConfig)}
_GEN_KEYS = {
    "grid": str, "classes": "list:str", "locations": "list:float", "resistances": "list:float",
    "angles": "list:float", "load_scales": "list:float", "tau": int, "snr_db": float,
    "repetitions": int, "seed": int,
}


class ConfigError(ParameterError):
    pass


def read_config(path):
    """Parse a flat ``key = value`` file into a dict of strings."""
    if path is None:
        return {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    out = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lower() if key != "C" else "C"] = value
    if "c" in out:
        out["C"] = out.pop("c")
    return out


def _convert(key, value, kind):
    try:
        if isinstance(kind, str) and kind.startswith("list:"):
            conv = float if kind.endswith("float") else str
            return tuple(conv(v.strip()) for v in value.split(",") if v.strip())
        if kind in (int, "int"):
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        if kind in (float, "float"):
            return float(value)
        return str(value)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {value!r}") from None


def pipeline_config(args, raw):
    """PipelineConfig from config-file values overridden by CLI flags."""
    values = {}
    for key, value in raw.items():
        if key in _PIPELINE_KEYS:
            values[key] = _convert(key, value, _PIPELINE_KEYS[key])
        elif key not in _GEN_KEYS and key != "threads":
            raise ConfigError(f"unknown config key {key!r}")
    for flag, key in (("d", "d"), ("l", "l"), ("beta", "beta"), ("c", "C"), ("k", "k"), ("seed", "seed")):
        v = getattr(args, flag, None)
        if v is not None:
            values[key] = v
    return PipelineConfig(**values).validate()


def _threads(args, raw):
    if args.threads is not None:
        n = args.threads
    else:
        n = _convert("threads", raw.get("threads", "1"), int)
    if n < 1:
        raise ConfigError(f"threads must be >= 1, got {n}")
    return n


def cmd_generate(args):
    raw = read_config(args.config)
    gen = {}
    for key, value in raw.items():
        if key in _GEN_KEYS:
            gen[key] = _convert(key, value, _GEN_KEYS[key])
        elif key not in _PIPELINE_KEYS and key != "threads":
            raise ConfigError(f"unknown config key {key!r}")
    seed = args.seed if args.seed is not None else gen.get("seed", 0)
    snr = gen.get("snr_db", signalgen.DEFAULT_SNR_DB)
    grid_kind = gen.get("grid", "desk")
    try:
        classes = tuple(signalgen.FaultClass.parse(c) for c in gen.get("classes", [c.value for c in signalgen.FaultClass]))
    except DataFormatError as exc:
        raise ConfigError(str(exc)) from None
    if grid_kind == "desk":
        grid = [c for c in signalgen.desk_grid(seed, snr) if c.fault_class in classes]
    elif grid_kind in ("full", "custom"):
        defaults = dict(locations=signalgen.FULL_LOCATIONS, resistances=signalgen.FULL_RESISTANCES,
                        angles=signalgen.FULL_ANGLES, load_scales=signalgen.FULL_LOAD_SCALES)
        if grid_kind == "custom":
            defaults.update({k: gen[k] for k in defaults if k in gen})
        grid = signalgen.case_grid(classes, noise_snr_db=snr, seed=seed, **defaults)
    else:
        raise ConfigError(f"grid must be desk, full or custom, got {grid_kind!r}")
    ds = signalgen.generate_dataset(grid, gen.get("repetitions", 1), gen.get("tau", signalgen.DEFAULT_TAU))
    out = args.out or "dataset.csv"
    signalgen.save_csv(ds, out)
    counts = ds.class_counts()
    for c in signalgen.FaultClass:
        if c in counts:
            print(f"{c.value}\t{counts[c]}")
    print(f"total\t{len(ds)}\t-> {out}")
    return EXIT_OK


def _report_dict(res, config):
    folds = []
    for f, (rep, cm) in enumerate(zip(res.fold_reports, res.confusions), 1):
        folds.append({
            "fold": f,
            "n_test": cm.total,
            "per_class": {str(c): {m: (v if m == "support" else float(v)) for m, v in r.items()}
                          for c, r in rep.per_class.items()},
            "macro_avg": {m: float(rep.macro_avg[m]) for m in METRICS},
            "weighted_avg": {m: float(rep.weighted_avg[m]) for m in METRICS},
            "confusion": cm.counts.tolist(),
        })
    macro = {m: float(np.mean([r.macro_avg[m] for r in res.fold_reports])) for m in METRICS}
    return {
        "format_version": FORMAT_VERSION,
        "config": asdict(config),
        "classes": [str(c) for c in res.classes],
        "folds": folds,
        "average": {m: float(v) for m, v in res.average.items()},
        "average_macro": macro,
    }


def write_fold_table(report, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["fold", *METRICS])
        for f in report["folds"]:
            w.writerow([f"Fold {f['fold']}", *(f"{f['weighted_avg'][m]:.5f}" for m in METRICS)])
        w.writerow(["Average", *(f"{report['average'][m]:.5f}" for m in METRICS)])


def write_confusion(counts, classes, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(classes)
        for row in counts:
            w.writerow([int(v) for v in row])


def cmd_crossval(args):
    raw = read_config(args.config)
    config = pipeline_config(args, raw)
    threads = _threads(args, raw)
    ds = signalgen.load_csv(args.dataset)
    config.validate(ds.n_features)
    res = cross_validate(ds, config, threads=threads)
    report = _report_dict(res, config)
    out = args.out or "report"
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    write_fold_table(report, os.path.join(out, "folds.csv"))
    for f in report["folds"]:
        write_confusion(f["confusion"], report["classes"], os.path.join(out, f"confusion_fold{f['fold']}.csv"))
    print(render_report(report))
    return EXIT_OK


def classifier_to_dict(clf, config):
    """Serializable artifact; only support points are stored."""
    used = sorted({int(i) for m in clf.models for i in m.support_indices})
    remap = {old: new for new, old in enumerate(used)}
    pts = np.array([clf.train_points[i] for i in used]) if used else np.zeros((0, 0, 0))
    n, d = (pts.shape[1], pts.shape[2]) if used else (0, 0)
    return {
        "format_version": FORMAT_VERSION,
        "config": asdict(config),
        "classes": [str(c) for c in clf.classes],
        "points": {"count": len(used), "rows": n, "cols": d, "values": pts.ravel().tolist()},
        "models": [{
            "class_pair": [str(c) for c in m.class_pair],
            "support_indices": [remap[int(i)] for i in m.support_indices],
            "dual_coefs": m.dual_coefs.tolist(),
            "bias": m.bias,
            "C": m.C,
            "converged": m.converged,
        } for m in clf.models],
    }


def classifier_from_dict(doc):
    if doc.get("format_version") != FORMAT_VERSION:
        raise DataFormatError(f"unsupported model format version {doc.get('format_version')!r}")
    try:
        config = PipelineConfig(**doc["config"]).validate()
        p = doc["points"]
        vals = np.array(p["values"], dtype=float).reshape(p["count"], p["rows"], p["cols"])
        classes = [signalgen.FaultClass.parse(c) for c in doc["classes"]]
        models = [svm.BinaryModel(
            support_indices=np.array(m["support_indices"], dtype=np.int64),
            dual_coefs=np.array(m["dual_coefs"], dtype=float),
            bias=float(m["bias"]),
            class_pair=tuple(signalgen.FaultClass.parse(c) for c in m["class_pair"]),
            C=float(m["C"]),
            converged=bool(m["converged"]),
        ) for m in doc["models"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"malformed model file: {exc}") from None
    clf = svm.TrainedClassifier(models, classes, list(vals), config.beta, config.d, config.l, config.C, config.tol)
    return clf, config


def train_classifier(ds, config, threads=1):
    points = arma.embed_all(ds.windows, config.d, config.l, threads=threads)
    K = grassmann.gram_matrix(points, config.beta, threads=threads)
    models, classes = svm.train_multiclass(K, ds.labels, config.C, config.tol, threads=threads)
    return svm.TrainedClassifier(models, classes, points, config.beta, config.d, config.l, config.C, config.tol)


def predict_dataset(clf, ds, threads=1):
    """Predicted labels and per-model decision values for every window."""
    if clf.d > ds.n_features:
        raise ConfigError(f"model hidden dimension d={clf.d} exceeds the dataset's {ds.n_features} features")
    points = arma.embed_all(ds.windows, clf.d, clf.l, threads=threads)
    rows = grassmann.cross_gram(points, clf.train_points, clf.beta, threads=threads)
    return [svm.vote(clf.models, clf.classes, row) for row in rows]


def cmd_train(args):
    raw = read_config(args.config)
    config = pipeline_config(args, raw)
    threads = _threads(args, raw)
    ds = signalgen.load_csv(args.dataset)
    config.validate(ds.n_features)
    clf = train_classifier(ds, config, threads)
    out = args.out or "model.json"
    with open(out, "w") as fh:
        json.dump(classifier_to_dict(clf, config), fh)
        fh.write("\n")
    bad = [m.class_pair for m in clf.models if not m.converged]
    if bad:
        print(f"warning: {len(bad)} pair problems did not converge", file=sys.stderr)
    print(f"trained {len(clf.models)} pair models on {len(ds)} windows -> {out}")
    return EXIT_OK


def load_model(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise DataFormatError(f"model file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"model file is not valid JSON: {exc}") from None
    return classifier_from_dict(doc)


def cmd_predict(args):
    clf, _ = load_model(args.model)
    raw = read_config(args.config)
    threads = _threads(args, raw)
    ds = signalgen.load_csv(args.dataset)
    results = predict_dataset(clf, ds, threads)
    out = args.out or "predictions.csv"
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["index", "actual", "predicted"]
        if args.verbose:
            header += [f"{m.class_pair[0]}|{m.class_pair[1]}" for m in clf.models]
        w.writerow(header)
        for i, ((label, values), actual) in enumerate(zip(results, ds.labels)):
            row = [i, str(actual), str(label)]
            if args.verbose:
                row += [repr(float(v)) for v in values]
            w.writerow(row)
    pred = [r[0] for r in results]
    acc = sum(p == a for p, a in zip(pred, ds.labels)) / len(pred)
    print(f"predicted {len(pred)} windows, accuracy vs file labels {acc:.5f} -> {out}")
    return EXIT_OK


def render_report(report):
    """Plain-text tables: per-fold weighted metrics and pooled per-class metrics."""
    lines = [f"{'Fold':<10}" + "".join(f"{m:>11}" for m in METRICS)]
    for f in report["folds"]:
        lines.append(f"{'Fold ' + str(f['fold']):<10}" + "".join(f"{f['weighted_avg'][m]:>11.5f}" for m in METRICS))
    lines.append(f"{'Average':<10}" + "".join(f"{report['average'][m]:>11.5f}" for m in METRICS))
    classes = report["classes"]
    pooled = np.sum([f["confusion"] for f in report["folds"]], axis=0)
    _, rep = evaluate(*_expand(pooled, classes), classes)
    lines.append("")
    lines.append(f"{'Class':<10}" + "".join(f"{m:>11}" for m in METRICS) + f"{'support':>9}")
    for c in classes:
        r = rep.per_class[c]
        lines.append(f"{c:<10}" + "".join(f"{r[m]:>11.5f}" for m in METRICS) + f"{r['support']:>9d}")
    for name, avg in (("M. Avg.", rep.macro_avg), ("W. Avg.", rep.weighted_avg)):
        lines.append(f"{name:<10}" + "".join(f"{avg[m]:>11.5f}" for m in METRICS) + f"{avg['support']:>9d}")
    return "\n".join(lines)


def _expand(counts, classes):
    actual, predicted = [], []
    for i, a in enumerate(classes):
        for j, p in enumerate(classes):
            actual += [a] * int(counts[i][j])
            predicted += [p] * int(counts[i][j])
    return actual, predicted


def cmd_report(args):
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except FileNotFoundError:
        raise DataFormatError(f"report file not found: {args.report}") from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"report is not valid JSON: {exc}") from None
    if "folds" not in report or "classes" not in report:
        raise DataFormatError("report JSON lacks folds/classes")
    print(render_report(report))
    out = args.out or os.path.dirname(os.path.abspath(args.report))
    os.makedirs(out, exist_ok=True)
    classes = report["classes"]
    with open(os.path.join(out, "confusion_cells.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["fold", "actual", "predicted", "count"])
        for f in report["folds"]:
            for i, a in enumerate(classes):
                for j, p in enumerate(classes):
                    w.writerow([f["fold"], a, p, f["confusion"][i][j]])
    with open(os.path.join(out, "class_bars.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["fold", "class", "metric", "value"])
        for f in report["folds"]:
            for c in classes:
                for m in METRICS:
                    w.writerow([f["fold"], c, m, f"{f['per_class'][c][m]:.6f}"])
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--out", help="output path")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--d", type=int, help="hidden state dimension")
    common.add_argument("--l", type=int, help="observability truncation length")
    common.add_argument("--beta", type=float, help="kernel width")
    common.add_argument("--c", type=float, help="SVM penalty C")
    common.add_argument("--k", type=int, help="number of folds")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="grassfault", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="write a synthetic dataset CSV").set_defaults(func=cmd_generate)
    p = sub.add_parser("crossval", parents=[common], help="k-fold cross-validation")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_crossval)
    p = sub.add_parser("train", parents=[common], help="train on a full dataset")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_train)
    p = sub.add_parser("predict", parents=[common], help="label windows with a saved model")
    p.add_argument("model")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_predict)
    p = sub.add_parser("report", parents=[common], help="render a cross-validation report")
    p.add_argument("report")
    p.set_defaults(func=cmd_report)
    return parser


def _fail(kind, exc, code):
    msg = " ".join(str(exc).split())
    print(f"error: {kind}: {msg}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        return _fail("config", exc, EXIT_USAGE)
    except DataFormatError as exc:
        return _fail("data", exc, EXIT_DATA)
    except NumericalError as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    except GrassfaultError as exc:
        return _fail("error", exc, EXIT_DATA)
    except OSError as exc:
        return _fail("io", exc, EXIT_DATA)


if __name__ == "__main__":
    sys.exit(main())
