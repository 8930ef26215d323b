"""Command-line front end."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .classifier import (
    ClassifierServer,
    ModelClassifier,
    ModelMetadata,
    RemoteClassifier,
    StubClassifier,
    TrainingParams,
    accuracy,
    confusion_matrix,
    per_class_accuracy,
    predict,
    private_to_public_leak_rate,
    train,
)
from .classifier.model import Dataset, Split, split_dataset
from .classifier.synthetic import load_image_tree, write_image_tree
from .classifier.features import extract_features
from .daemon import DaemonConfig, GuardApiServer, GuardDaemon, run_bench
from .manifests import analyze_corpus
from .simulator import ScenarioError, parse_scenario, run_scenario
from .store import ContentStore, PhotoLibrary


def _add_classifier_flags(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--model", metavar="FILE", help="built-in model file")
    group.add_argument("--stub", metavar="FILE", help="scripted stub table file")
    group.add_argument("--remote", metavar="HOST:PORT", help="remote classifier endpoint")


def _build_classifier(args):
    if args.model:
        return ModelClassifier.from_file(args.model)
    if args.stub:
        return StubClassifier.from_file(args.stub)
    if args.remote:
        return RemoteClassifier.from_endpoint(args.remote)
    return None


def cmd_init(args) -> int:
    classifier = _build_classifier(args)
    library = PhotoLibrary(args.directory)
    store, report = ContentStore.initialize_scan(library, classifier)
    store_path = Path(args.store) if args.store else Path(args.directory) / ".photoguard-store"
    store.persist(store_path)
    print(f"scanned {report.scanned} photos, {len(store)} records -> {store_path}")
    for path, error in report.skipped:
        print(f"  skipped {path}: {error}", file=sys.stderr)
    return 0


def cmd_watch(args) -> int:
    config = DaemonConfig.from_file(args.config)
    guard = GuardDaemon(config)
    report = guard.startup()
    server = GuardApiServer(guard)
    server.serve_in_background()
    print(
        f"watching {config.library_root} ({len(guard.store)} records, "
        f"{report.classified} classified on startup); "
        f"api on http://{config.listen_host}:{config.listen_port}"
    )
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        print("shutting down")
    finally:
        server.shutdown()
        guard.shutdown()
    return 0


def cmd_classify(args) -> int:
    classifier = _build_classifier(args)
    if isinstance(classifier, ModelClassifier):
        features = extract_features(Path(args.file).read_bytes(), classifier.model.extractor)
        category, probs = predict(classifier.model, features)
        probs_text = " ".join(f"{p:.4f}" for p in probs)
        print(f"{category.label} (code {category.value}) probabilities [{probs_text}]")
    else:
        category = classifier.classify_file(args.file)
        print(f"{category.label} (code {category.value})")
    return 0


def cmd_simulate(args) -> int:
    text = Path(args.scenario).read_text()
    try:
        script = parse_scenario(text, source=args.scenario)
        store = ContentStore.load(args.store) if args.store and Path(args.store).exists() else ContentStore()
        trace = run_scenario(script, store=store, classifier=_build_classifier(args))
    except ScenarioError as exc:
        print(f"{args.scenario}: {exc}", file=sys.stderr)
        return 2
    print(trace.render(), end="")
    return 0 if trace.passed else 1


def cmd_bench(args) -> int:
    classifier = _build_classifier(args)
    if args.store and Path(args.store).exists():
        store = ContentStore.load(args.store)
    else:
        store, _ = ContentStore.initialize_scan(PhotoLibrary(args.library), classifier)
    report = run_bench(store, classifier, args.photos, args.trials, seed=args.seed)
    print(report.summary())
    if args.report:
        from .report import write_bench_report

        for path in write_bench_report(report, args.report):
            print(f"wrote {path}")
    return 0


def cmd_analyze_manifests(args) -> int:
    report = analyze_corpus(args.directory)
    from .report import format_corpus_table, write_corpus_report

    print(format_corpus_table(report))
    if args.report:
        for path in write_corpus_report(report, args.report):
            print(f"wrote {path}")
    return 0


def cmd_train(args) -> int:
    samples = load_image_tree(args.dataset)
    train_set, test_set = split_dataset(samples, test_fraction=args.test_fraction, seed=args.seed)
    params = TrainingParams(
        learning_rate=args.learning_rate,
        max_epochs=args.epochs,
        tolerance=args.tolerance,
        seed=args.seed,
    )
    result = train(train_set, params)
    test_acc = accuracy(result.model, test_set) if test_set.samples else float("nan")
    result.model.metadata = ModelMetadata(name="histogram-softmax", reported_accuracy=test_acc)
    result.model.save(args.out)
    result.model.metadata.size_bytes = Path(args.out).stat().st_size
    result.model.save(args.out)
    print(
        f"trained on {len(train_set)} samples ({len(result.loss_history) - 1} epochs), "
        f"final loss {result.final_loss:.4f}, test accuracy {test_acc:.3f} -> {args.out}"
    )
    return 0


def cmd_evaluate(args) -> int:
    samples = load_image_tree(args.dataset)
    model = ModelClassifier.from_file(args.model).model
    dataset = Dataset(samples, Split.TEST)
    cm = confusion_matrix(model, dataset)
    acc = accuracy(model, dataset)
    per_class = per_class_accuracy(cm)
    leak = private_to_public_leak_rate(cm)
    print(f"overall accuracy {acc:.4f} on {len(dataset)} samples")
    for category, value in per_class.items():
        shown = "undefined (no samples)" if value is None else f"{value:.4f}"
        print(f"  {category.label:16s} {shown}")
    print(f"private->public leak rate {'undefined' if leak is None else f'{leak:.4f}'}")
    if args.report:
        from .report import write_evaluation_report

        for path in write_evaluation_report(cm, args.report):
            print(f"wrote {path}")
    return 0


def cmd_serve_classifier(args) -> int:
    handle = ModelClassifier.from_file(args.model)

    def classify_fn(data: bytes):
        from .classifier.features import extract_features as _extract

        features = _extract(data, handle.model.extractor)
        return predict(handle.model, features)

    host, _, port = args.listen.rpartition(":")
    server = ClassifierServer((host or "127.0.0.1", int(port)), classify_fn)
    print(f"serving classifier on {host or '127.0.0.1'}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def cmd_make_fixtures(args) -> int:
    root = write_image_tree(args.directory, per_class=args.per_class, seed=args.seed)
    print(f"wrote {args.per_class} synthetic photos per category under {root}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="photoguard", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="scan a photo directory into a content store")
    p.add_argument("directory")
    p.add_argument("--store", help="store file (default <dir>/.photoguard-store)")
    _add_classifier_flags(p)
    p.set_defaults(fn=cmd_init)

    p = sub.add_parser("watch", help="run the guard daemon")
    p.add_argument("--config", required=True, help="JSON config file")
    p.set_defaults(fn=cmd_watch)

    p = sub.add_parser("classify", help="classify one photo file")
    p.add_argument("file")
    _add_classifier_flags(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("simulate", help="replay a scenario script")
    p.add_argument("scenario")
    p.add_argument("--store", help="existing store file to start from")
    _add_classifier_flags(p, required=False)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("bench", help="time cache lookups vs synchronous classification")
    p.add_argument("--photos", type=int, default=100)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--library", required=True, help="photo directory")
    p.add_argument("--store", help="existing store file (else the library is scanned)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--report", help="directory for bench.tsv and bench.png")
    _add_classifier_flags(p)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("analyze-manifests", help="permission-pair risk statistics over manifests")
    p.add_argument("directory")
    p.add_argument("--report", help="output file for per-app records (+ .png figure)")
    p.set_defaults(fn=cmd_analyze_manifests)

    p = sub.add_parser("train", help="train the built-in classifier on a labeled image tree")
    p.add_argument("--dataset", required=True, help="directory with one sub-directory per label")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--learning-rate", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="confusion matrix and per-class accuracy of a model")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--report", help="directory for TSVs and figures")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("serve-classifier", help="serve a model over the classifier wire protocol")
    p.add_argument("--model", required=True)
    p.add_argument("--listen", default="127.0.0.1:8751")
    p.set_defaults(fn=cmd_serve_classifier)

    p = sub.add_parser("make-fixtures", help="generate a synthetic labeled photo tree")
    p.add_argument("directory")
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_make_fixtures)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
