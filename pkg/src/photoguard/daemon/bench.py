"""Cache-lookup vs synchronous-classification timing comparison.

The cache exists to take classification off the access path; this measures
how much that buys on the current machine. Absolute numbers are hardware
bound; the ratio is what matters.
"""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass, field

from ..classifier.handles import classify_file
from ..store import ContentStore


@dataclass
class TimingReport:
    lookup_ns: list[int] = field(default_factory=list)
    classify_ns: list[int] = field(default_factory=list)
    n_photos: int = 0
    trials: int = 0

    @property
    def median_lookup_ns(self) -> float:
        return statistics.median(self.lookup_ns)

    @property
    def median_classify_ns(self) -> float:
        return statistics.median(self.classify_ns)

    @property
    def ratio(self) -> float:
        return self.median_classify_ns / self.median_lookup_ns

    def summary(self) -> str:
        return (
            f"lookup median {self.median_lookup_ns / 1e6:.4f} ms, "
            f"classification median {self.median_classify_ns / 1e6:.4f} ms, "
            f"ratio {self.ratio:.1f}x "
            f"({self.n_photos} photos x {self.trials} trials)"
        )

    def rows(self) -> list[tuple[int, int, int]]:
        """(trial index, lookup ns, classify ns) rows for the delimited report."""
        return [(i, l, c) for i, (l, c) in enumerate(zip(self.lookup_ns, self.classify_ns))]


def run_bench(
    store: ContentStore,
    classifier,
    n_photos: int,
    trials: int,
    seed: int | None = None,
) -> TimingReport:
    """Time store lookups against synchronous classifications of the same photos."""
    if n_photos < 1 or trials < 1:
        raise ValueError("n_photos and trials must be at least 1")
    records = store.records()
    if len(records) < n_photos:
        raise ValueError(f"store has {len(records)} records, need at least {n_photos}")
    rng = random.Random(seed)
    chosen = rng.sample(records, n_photos)

    report = TimingReport(n_photos=n_photos, trials=trials)
    for record in chosen:
        for _ in range(trials):
            t0 = time.perf_counter_ns()
            store.lookup(record.photo_id)
            # clamp to the timer's resolution floor; never report zero latency
            report.lookup_ns.append(max(time.perf_counter_ns() - t0, 1))

            t0 = time.perf_counter_ns()
            classify_file(classifier, record.photo_id)
            report.classify_ns.append(max(time.perf_counter_ns() - t0, 1))
    return report
