"""Release gate: every acceptance criterion as a test, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

import random
import threading
import time
from itertools import product

import numpy as np
import pytest

from photoguard.policy import (
    AppRunState,
    ContentCategory,
    SystemStatus,
    Verdict,
    decision_table,
)
from photoguard.classifier.evaluate import (
    confusion_matrix,
    per_class_accuracy,
    private_to_public_leak_rate,
)
from photoguard.classifier.handles import ClassifierError, StubClassifier
from photoguard.classifier.model import (
    Dataset,
    SoftmaxModel,
    TrainingParams,
    accuracy,
    cross_entropy_loss,
    loss_gradient,
    split_dataset,
    train,
)
from photoguard.classifier.synthetic import make_feature_dataset, write_image_tree
from photoguard.daemon import ClassifierSelection, DaemonConfig, GuardDaemon, decision_allows_private_leak
from photoguard.daemon.bench import run_bench
from photoguard.manifests import INTERNET, READ_EXTERNAL_STORAGE, analyze_corpus
from photoguard.simulator import generate_decision_table_scenario, parse_scenario, run_scenario
from photoguard.store import ContentStore, PhotoLibrary, StoreLoadError, fingerprint_bytes
from tests.conftest import TABLE_CONFUSION, ContentHashClassifier


def verdict_line(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")


# -- 1. decision-table exhaustiveness -----------------------------------------


class TestCriterion1DecisionTable:
    def test_all_40_combinations_match_workflow_oracle(self, tmp_path):
        started = time.perf_counter()

        # independent oracle: the workflow arrows written out longhand
        def oracle(whitelisted, system, app_state, category):
            if whitelisted:
                return ("allow", "whitelisted")
            if system is SystemStatus.LOCKED:
                return ("deny", "screen_locked")
            if app_state is AppRunState.BACKGROUND:
                return ("deny", "app_in_background")
            if category is ContentCategory.PUBLIC:
                return ("allow", "public_content")
            return ("prompt", "private_content")

        rows = decision_table()
        assert len(rows) == 40
        seen = set()
        for row in rows:
            key = (row.whitelisted, row.system, row.app_state, row.category)
            assert key not in seen
            seen.add(key)
            expected = oracle(*key)
            got = (row.decision.verdict.value, row.decision.reason.value)
            assert got == expected, f"{key}: got {got}, expected {expected}"
        assert len(seen) == len(set(product((True, False), SystemStatus, AppRunState, ContentCategory)))

        # the same table expressed as a scenario script replays cleanly
        text = generate_decision_table_scenario(tmp_path / "fixtures")
        trace = run_scenario(parse_scenario(text), store=ContentStore())
        assert trace.passed, trace.render()

        elapsed = time.perf_counter() - started
        assert elapsed < 1.0
        verdict_line(
            "decision-table", True, f"40/40 verdicts match, scenario replay clean, {elapsed * 1000:.0f} ms"
        )


# -- 2. published evaluation reproduction ----------------------------------------


class TestCriterion2MatrixReproduction:
    def test_per_class_accuracy_and_leak_rate(self):
        acc = per_class_accuracy(TABLE_CONFUSION)
        checks = {
            ContentCategory.PHOTO_ID: 0.978,
            ContentCategory.FAMILY: 0.956,
            ContentCategory.NUDE: 0.862,
        }
        for category, target in checks.items():
            assert acc[category] == pytest.approx(target, abs=0.0005), category
        leak = private_to_public_leak_rate(TABLE_CONFUSION)
        assert leak == 0.0
        verdict_line(
            "matrix-reproduction",
            True,
            "photo_id/family/nude within +/-0.0005, leak rate exactly 0 over 610 private samples",
        )

    @pytest.mark.xfail(
        strict=True,
        reason=(
            "unattainable as stated: the matrix row gives 92/94 = 0.97872, which is "
            "0.00072 from the rounded reference value 0.978; the reference table "
            "truncated rather than rounded, so the 0.0005 gate cannot hold"
        ),
    )
    def test_legal_document_at_stated_tolerance(self):
        acc = per_class_accuracy(TABLE_CONFUSION)
        value = acc[ContentCategory.LEGAL_DOCUMENT]
        ok = abs(value - 0.978) <= 0.0005
        verdict_line(
            "matrix-reproduction/legal-document",
            ok,
            f"92/94 = {value:.5f} vs 0.978 +/- 0.0005",
        )
        assert ok

    def test_legal_document_exact_value_is_pinned(self):
        # the computation itself is correct; the gate above fails only on rounding
        acc = per_class_accuracy(TABLE_CONFUSION)
        assert acc[ContentCategory.LEGAL_DOCUMENT] == pytest.approx(92 / 94, abs=1e-12)


# -- 3. permission-pair statistic ------------------------------------------------


class TestCriterion3CorpusStatistic:
    def test_200_manifest_corpus_with_164_risky(self, tmp_path):
        corpus = tmp_path / "corpus"
        corpus.mkdir()
        extra = ["android.permission.CAMERA", "android.permission.NFC", "android.permission.VIBRATE"]
        rng = random.Random(31)
        for i in range(200):
            risky = i < 164
            permissions = [INTERNET]
            if risky:
                permissions.append(READ_EXTERNAL_STORAGE)
            permissions += rng.sample(extra, rng.randint(0, 3))
            rng.shuffle(permissions)
            body = "".join(f'<uses-permission android:name="{p}"/>' for p in permissions)
            (corpus / f"app{i:03d}.xml").write_text(
                f'<manifest xmlns:android="http://schemas.android.com/apk/res/android" '
                f'package="com.corpus.app{i:03d}">{body}</manifest>'
            )
        report = analyze_corpus(corpus)
        assert report.total_apps == 200
        assert report.risky_apps == 164
        assert report.proportion == 0.82

        # permuting elements inside any manifest leaves the report unchanged
        target = corpus / "app000.xml"
        text = target.read_text()
        head, body = text.split(">", 1)
        elements = body.replace("</manifest>", "").split("/>")
        elements = [e + "/>" for e in elements if e.strip()]
        rng.shuffle(elements)
        target.write_text(head + ">" + "".join(elements) + "</manifest>")
        permuted = analyze_corpus(corpus)
        assert permuted.risky_apps == report.risky_apps
        assert permuted.proportion == report.proportion
        assert permuted.risky_ids == report.risky_ids
        verdict_line("corpus-statistic", True, "164/200 -> 0.82 exactly, permutation-invariant")


# -- 4. classifier numerics -----------------------------------------------------


class TestCriterion4ClassifierNumerics:
    def test_gradient_loss_and_synthetic_accuracy(self):
        started = time.perf_counter()

        # (a) analytic gradient vs central differences on 100 random instances
        rng = np.random.default_rng(1234)
        worst = 0.0
        for _ in range(100):
            dim = int(rng.integers(2, 21))
            n = int(rng.integers(2, 51))
            model = SoftmaxModel(
                weights=rng.normal(scale=1.5, size=(5, dim)), bias=rng.normal(scale=1.5, size=5)
            )
            samples = [
                _sample(rng.normal(size=dim), ContentCategory(int(rng.integers(1, 6))))
                for _ in range(n)
            ]
            data = Dataset(samples)
            analytic = loss_gradient(model, data)
            fd_w, fd_b = _finite_difference(model, data, step=1e-5)
            num = np.sqrt(((analytic.weights - fd_w) ** 2).sum() + ((analytic.bias - fd_b) ** 2).sum())
            den = max(
                np.sqrt((analytic.weights**2).sum() + (analytic.bias**2).sum()),
                np.sqrt((fd_w**2).sum() + (fd_b**2).sum()),
                1e-12,
            )
            worst = max(worst, num / den)
        assert worst < 1e-4, f"worst relative gradient error {worst:.2e}"

        # (b) full-batch loss is non-increasing at learning_rate <= 0.1
        suite = make_feature_dataset(per_class=40, seed=77)
        history = train(suite, TrainingParams(learning_rate=0.1, max_epochs=150)).loss_history
        increases = np.diff(history)
        assert (increases <= 1e-9).all(), f"loss increased by {increases.max():.3e}"

        # (c) >= 200 samples per class, 20% held out, accuracy >= 0.95
        full = make_feature_dataset(per_class=200, seed=13)
        train_set, test_set = split_dataset(full.samples, test_fraction=0.2, seed=13)
        result = train(train_set, TrainingParams(learning_rate=0.5, max_epochs=300))
        test_accuracy = accuracy(result.model, test_set)
        assert test_accuracy >= 0.95

        elapsed = time.perf_counter() - started
        assert elapsed < 60.0
        verdict_line(
            "classifier-numerics",
            True,
            f"worst gradient err {worst:.1e}, loss monotone, "
            f"test accuracy {test_accuracy:.3f} on {len(test_set)} held-out samples, {elapsed:.1f} s",
        )


def _sample(features, label):
    from photoguard.classifier.model import LabeledSample

    return LabeledSample(np.asarray(features, dtype=np.float64), label)


def _finite_difference(model, data, step):
    grad_w = np.zeros_like(model.weights)
    grad_b = np.zeros_like(model.bias)
    for idx in np.ndindex(model.weights.shape):
        model.weights[idx] += step
        up = cross_entropy_loss(model, data)
        model.weights[idx] -= 2 * step
        down = cross_entropy_loss(model, data)
        model.weights[idx] += step
        grad_w[idx] = (up - down) / (2 * step)
    for i in range(model.bias.shape[0]):
        model.bias[i] += step
        up = cross_entropy_loss(model, data)
        model.bias[i] -= 2 * step
        down = cross_entropy_loss(model, data)
        model.bias[i] += step
        grad_b[i] = (up - down) / (2 * step)
    return grad_w, grad_b


# -- 5. timing: cache lookup vs synchronous classification ------------------------


class TestCriterion5Timing:
    def test_lookup_at_least_10x_faster_than_classification(self, tmp_path, trained_model):
        started = time.perf_counter()
        library_root = write_image_tree(tmp_path / "library", per_class=20, seed=5)
        from photoguard.classifier.handles import ModelClassifier

        handle = ModelClassifier(trained_model)
        store, report = ContentStore.initialize_scan(PhotoLibrary(library_root), handle)
        assert len(store) == 100 and not report.skipped
        timing = run_bench(store, handle, n_photos=100, trials=10, seed=5)
        assert len(timing.lookup_ns) == 1000
        assert min(timing.lookup_ns) > 0 and min(timing.classify_ns) > 0
        assert timing.ratio >= 10.0, timing.summary()
        elapsed = time.perf_counter() - started
        assert elapsed < 300.0
        verdict_line("timing", True, timing.summary() + f", wall {elapsed:.1f} s")


# -- 6. store coherence and durability --------------------------------------------


class TestCriterion6StoreCoherence:
    def test_randomized_op_sequence_ends_coherent(self, tmp_path, monkeypatch):
        rng = random.Random(2024)
        library_root = tmp_path / "library"
        library_root.mkdir()
        library = PhotoLibrary(library_root)
        classifier = ContentHashClassifier()
        store = ContentStore()
        live_files: list[str] = []
        counter = 0

        def random_bytes():
            return bytes(rng.getrandbits(8) for _ in range(rng.randint(8, 64)))

        operations = 1000
        for _ in range(operations):
            op = rng.choices(("add", "modify", "delete", "rescan"), weights=(5, 4, 2, 1))[0]
            if op == "add" or not live_files:
                counter += 1
                name = f"photo_{counter:05d}.jpg"
                (library_root / name).write_bytes(random_bytes())
                live_files.append(name)
                store.on_photo_added(library_root / name, classifier)
            elif op == "modify":
                name = rng.choice(live_files)
                (library_root / name).write_bytes(random_bytes())
                store.on_photo_added(library_root / name, classifier)
            elif op == "delete":
                name = live_files.pop(rng.randrange(len(live_files)))
                (library_root / name).unlink()
            else:
                store.rescan(library, classifier)

        final_report = store.rescan(library, classifier)
        assert len(store) == len(live_files)

        # coherence oracle: fresh classification of current bytes, fresh digests
        for record in store.records():
            data = open(record.photo_id, "rb").read()
            assert record.category is classifier.category_for_bytes(data)
            assert record.content_fingerprint == fingerprint_bytes(data)

        # durability: persist/load identity
        store_path = tmp_path / "store"
        store.persist(store_path)
        assert ContentStore.load(store_path) == store

        # kill-during-persist: the previous file stays loadable
        import photoguard.store as store_module

        def crash(src, dst):
            raise OSError("simulated kill during persist")

        snapshot = ContentStore.load(store_path)
        monkeypatch.setattr(store_module.os, "replace", crash)
        mutated = ContentStore(store.records())
        mutated.upsert_record(store.records()[0])
        with pytest.raises(OSError):
            mutated.persist(store_path)
        monkeypatch.undo()
        assert ContentStore.load(store_path) == snapshot
        verdict_line(
            "store-coherence",
            True,
            f"{operations} ops, {len(store)} live records coherent, "
            "round-trip identity, interrupted persist left prior store loadable",
        )


# -- 7. fail-closed audit under concurrency ----------------------------------------


class FlakyClassifier:
    """Content-hash classifier that errors at random; failures must fail closed."""

    def __init__(self, error_rate=0.5, seed=7):
        self._inner = ContentHashClassifier()
        self._rng = random.Random(seed)
        self._lock = threading.Lock()

    def classify_file(self, path):
        with self._lock:
            fail = self._rng.random() < 0.5
        if fail:
            raise ClassifierError("injected classifier fault")
        return self._inner.classify_file(path)


class TestCriterion7FailClosedAudit:
    def test_100_concurrent_requests_never_leak(self, tmp_path):
        library_root = tmp_path / "library"
        library_root.mkdir()
        oracle = ContentHashClassifier()
        paths = []
        for i in range(10):
            p = library_root / f"p{i}.jpg"
            p.write_bytes(f"photo number {i}".encode())
            paths.append(str(p))
        truth = {p: oracle.classify_file(p) for p in paths}

        stub_table = tmp_path / "unused-table.txt"
        stub_table.write_text("")
        config = DaemonConfig(
            library_root=library_root,
            store_path=tmp_path / "store",
            classifier=ClassifierSelection(stub_path=str(stub_table)),
            prompt_timeout=0.2,
            watch_interval=30.0,
        )
        guard = GuardDaemon(config, classifier=FlakyClassifier())
        guard.startup()
        try:
            rng = random.Random(404)
            guard.whitelist.add("backup")
            scripted = []
            for i in range(100):
                scripted.append(
                    (
                        rng.choice(["gallery", "editor", "backup"]),
                        rng.choice(paths),
                        rng.choice([SystemStatus.LOCKED, SystemStatus.UNLOCKED]),
                        rng.choice([AppRunState.FOREGROUND, AppRunState.BACKGROUND]),
                    )
                )
            barrier = threading.Barrier(100)
            errors = []

            def worker(args):
                barrier.wait()
                try:
                    guard.handle_access(*args)
                except Exception as exc:  # any crash fails the criterion
                    errors.append(exc)

            threads = [threading.Thread(target=worker, args=(s,)) for s in scripted]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
            assert errors == []

            entries = guard.audit.entries()
            assert len(entries) == 100
            leaks = [e for e in entries if decision_allows_private_leak(e)]
            assert leaks == []
            # allowed private accesses exist only via whitelist or a user answer
            for entry in entries:
                if entry.verdict == Verdict.ALLOW.value and entry.category not in ("public", None):
                    assert entry.reason in ("whitelisted", "user_allowed")
            verdict_line(
                "fail-closed-audit",
                True,
                f"100/100 audited, 0 leak entries, "
                f"{sum(1 for e in entries if e.reason == 'prompt_timeout')} timed-out prompts",
            )
        finally:
            guard.shutdown()
