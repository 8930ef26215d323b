"""Report rendering: delimited records plus matplotlib figures on disk.

Every CLI report path emits both forms side by side: a machine-readable
tab/line-delimited file and a PNG chart of the same numbers.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .classifier.evaluate import CATEGORIES, ConfusionMatrix, per_class_accuracy
from .daemon.bench import TimingReport
from .manifests import CorpusReport


def write_corpus_report(report: CorpusReport, out_file: str | Path) -> list[Path]:
    """Line-delimited (app_id, risky) records plus a risk-proportion chart."""
    out_file = Path(out_file)
    out_file.parent.mkdir(parents=True, exist_ok=True)
    lines = ["app_id\trisky"]
    lines += [f"{app_id}\t{'1' if risky else '0'}" for app_id, risky in report.apps]
    out_file.write_text("\n".join(lines) + "\n")

    figure_path = out_file.with_suffix(".png")
    fig, ax = plt.subplots(figsize=(5, 3.2))
    safe = report.total_apps - report.risky_apps
    ax.bar(["storage+network", "other"], [report.risky_apps, safe], color=["#c0392b", "#7f8c8d"])
    title = "Apps requesting both storage read and network"
    if report.proportion is not None:
        title += f" ({report.proportion:.0%})"
    ax.set_title(title, fontsize=10)
    ax.set_ylabel("apps")
    fig.tight_layout()
    fig.savefig(figure_path, dpi=120)
    plt.close(fig)
    return [out_file, figure_path]


def format_corpus_table(report: CorpusReport) -> str:
    rows = [
        f"apps analyzed      {report.total_apps}",
        f"risky apps         {report.risky_apps}",
        f"proportion         {'undefined (empty corpus)' if report.proportion is None else f'{report.proportion:.2%}'}",
        f"unparsable files   {len(report.unparsable)}",
    ]
    if report.risky_ids:
        rows.append("risky app ids:")
        rows += [f"  {app_id}" for app_id in report.risky_ids]
    for path, error in report.unparsable:
        rows.append(f"  unparsable: {path}: {error}")
    return "\n".join(rows)


def write_bench_report(report: TimingReport, out_dir: str | Path) -> list[Path]:
    """Per-trial latency TSV plus a log-scale comparison figure."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tsv = out_dir / "bench.tsv"
    lines = ["trial\tlookup_ns\tclassify_ns"]
    lines += [f"{i}\t{l}\t{c}" for i, l, c in report.rows()]
    lines.append(f"# median_lookup_ns={report.median_lookup_ns:.0f}")
    lines.append(f"# median_classify_ns={report.median_classify_ns:.0f}")
    lines.append(f"# ratio={report.ratio:.2f}")
    tsv.write_text("\n".join(lines) + "\n")

    figure_path = out_dir / "bench.png"
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.boxplot(
        [np.array(report.lookup_ns) / 1e6, np.array(report.classify_ns) / 1e6],
        tick_labels=["cache lookup", "classification"],
    )
    ax.set_yscale("log")
    ax.set_ylabel("latency (ms)")
    ax.set_title(f"Decision source latency, median ratio {report.ratio:.1f}x", fontsize=10)
    fig.tight_layout()
    fig.savefig(figure_path, dpi=120)
    plt.close(fig)
    return [tsv, figure_path]


def write_evaluation_report(cm: ConfusionMatrix, out_dir: str | Path) -> list[Path]:
    """Confusion matrix TSV + heat map, per-class accuracy TSV + bar chart."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels = [c.label for c in CATEGORIES]

    cm_tsv = out_dir / "confusion.tsv"
    lines = ["actual\\predicted\t" + "\t".join(labels)]
    for cat in CATEGORIES:
        row = cm.counts[cat.value - 1]
        lines.append(cat.label + "\t" + "\t".join(str(int(v)) for v in row))
    cm_tsv.write_text("\n".join(lines) + "\n")

    acc = per_class_accuracy(cm)
    acc_tsv = out_dir / "per_class_accuracy.tsv"
    acc_lines = ["category\taccuracy"]
    acc_lines += [
        f"{cat.label}\t{'undefined' if acc[cat] is None else f'{acc[cat]:.4f}'}" for cat in CATEGORIES
    ]
    acc_tsv.write_text("\n".join(acc_lines) + "\n")

    cm_png = out_dir / "confusion.png"
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    im = ax.imshow(cm.counts, cmap="Blues")
    ax.set_xticks(range(5), labels, rotation=30, ha="right")
    ax.set_yticks(range(5), labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("actual")
    for i in range(5):
        for j in range(5):
            value = int(cm.counts[i, j])
            if value:
                ax.text(j, i, str(value), ha="center", va="center", fontsize=8)
    fig.colorbar(im, ax=ax, shrink=0.8)
    fig.tight_layout()
    fig.savefig(cm_png, dpi=120)
    plt.close(fig)

    acc_png = out_dir / "per_class_accuracy.png"
    fig, ax = plt.subplots(figsize=(5, 3.2))
    values = [0.0 if acc[cat] is None else acc[cat] for cat in CATEGORIES]
    ax.bar(labels, values, color="#2980b9")
    ax.set_ylim(0, 1.0)
    ax.set_ylabel("per-class accuracy")
    plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
    fig.tight_layout()
    fig.savefig(acc_png, dpi=120)
    plt.close(fig)

    return [cm_tsv, acc_tsv, cm_png, acc_png]
