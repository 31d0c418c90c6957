"""Acceptance gate: one test per criterion, each printing a PASS line with
its measured numbers.  Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from hsi3dcnn import cli, dimred, ingest, metrics, net, patches, synth

TABLE_SHAPES = [(9, 9, 14, 8), (7, 7, 10, 16), (5, 5, 8, 32), (3, 3, 6, 64)]
TABLE_PARAMS = [512, 5776, 13856, 55360, 884992, 32896, 774]


def _report(name, detail):
    print(f"\nACCEPTANCE {name}: PASS ({detail})")


def test_architecture_oracle(capsys):
    t0 = time.perf_counter()
    assert cli.main(["summary", "--window", "11", "--bands", "20", "--classes", "6"]) == 0
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out

    model = net.build_model(11, 20, 6)
    conv_rows = model.summary_rows[1:5]
    assert [r[1] for r in conv_rows] == TABLE_SHAPES
    flat_row = model.summary_rows[5]
    assert flat_row[1] == (3456,)
    dense_shapes = [r[1][0] for r in model.summary_rows[6::2]]
    assert dense_shapes == [256, 128, 6]
    param_rows = [r[2] for r in model.summary_rows if r[2] > 0]
    assert param_rows == TABLE_PARAMS
    assert model.param_count() == 994166
    assert "Total trainable parameters: 994166" in out
    for shape in TABLE_SHAPES:
        assert "(" + ", ".join(map(str, shape)) + ")" in out
    assert elapsed < 1.0
    with capsys.disabled():
        _report("architecture-oracle", f"all Table rows exact, {elapsed:.3f}s")


def test_gradient_correctness(capsys):
    t0 = time.perf_counter()
    model = net.build_model(11, 20, 3, seed=42, dtype=np.float64)
    rng = np.random.default_rng(42)
    x = rng.standard_normal((4, 1, 11, 11, 20))
    y = np.array([0, 1, 2, 1])

    def total_loss():
        losses, _ = net.softmax_loss_batch(model.forward(x, train=False), y)
        return float(losses.sum())

    logits = model.forward(x, train=False)
    _, grad = net.softmax_loss_batch(logits, y)
    model.zero_grads()
    model.backward(grad * len(y))  # gradient of the summed loss

    params = model.parameters()
    sizes = np.array([p.size for _, p, _ in params])
    offsets = np.cumsum(sizes) - sizes
    picks = rng.choice(sizes.sum(), size=200, replace=False)
    rels = []
    for pick in picks:
        t = int(np.searchsorted(offsets, pick, side="right") - 1)
        i = int(pick - offsets[t])
        _, p, g = params[t]
        flat = p.ravel()
        old = flat[i]
        h = 1e-5 * max(1.0, abs(old))
        flat[i] = old + h
        fp = total_loss()
        flat[i] = old - h
        fm = total_loss()
        flat[i] = old
        num = (fp - fm) / (2.0 * h)
        a = g.ravel()[i]
        rels.append(0.0 if num == a else abs(num - a) / max(abs(num), abs(a), 1e-8))
    rels = np.array(rels)
    elapsed = time.perf_counter() - t0
    frac_ok = float((rels < 1e-4).mean())
    assert frac_ok >= 0.99
    assert rels.max() < 1e-3
    assert elapsed < 120
    with capsys.disabled():
        _report("gradient-correctness",
                f"{frac_ok:.1%} within 1e-4, max rel {rels.max():.2e}, {elapsed:.1f}s")


def test_convolution_variant_equivalence(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    # jitter shapes around the four reference layer configurations
    base = [(1, 8, (3, 3, 7), (11, 11, 20)),
            (8, 16, (3, 3, 5), (9, 9, 14)),
            (16, 32, (3, 3, 3), (7, 7, 10)),
            (32, 64, (3, 3, 3), (5, 5, 8))]
    worst = 0.0
    for trial in range(50):
        c, f, (kh, kw, kd), (h, w, d) = base[trial % 4]
        h = max(kh, h + int(rng.integers(-2, 3)))
        w = max(kw, w + int(rng.integers(-2, 3)))
        d = max(kd, d + int(rng.integers(-2, 3)))
        c = max(1, c + int(rng.integers(-1, 2)))
        f = max(1, f + int(rng.integers(-2, 3)))
        x = rng.uniform(-1, 1, (1, c, h, w, d)).astype(np.float32)
        ww = rng.uniform(-1, 1, (f, c, kh, kw, kd)).astype(np.float32)
        bb = rng.uniform(-1, 1, f).astype(np.float32)
        a = net.conv3d_direct(x, ww, bb)
        b = net.conv3d_lowered(x, ww, bb)
        rel = float(np.abs(a - b).max() / max(1.0, np.abs(a).max()))
        worst = max(worst, rel)
        assert rel <= 1e-5
    elapsed = time.perf_counter() - t0
    assert elapsed < 60
    with capsys.disabled():
        _report("conv-variant-equivalence",
                f"50 shapes, worst rel diff {worst:.2e}, {elapsed:.1f}s")


def test_ipca_oracle(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    data = rng.standard_normal((500, 30))

    # oracle: one-shot covariance + numpy dense eigendecomposition
    mean_o = data.mean(axis=0)
    centered = data - mean_o
    cov = centered.T @ centered / data.shape[0]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(-eigvals, kind="stable")[:8]
    comps_o = eigvecs[:, order].T.copy()
    for row in comps_o:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    eig_o = eigvals[order]

    worst = 0.0
    for chunk in (1, 7, 64):
        acc = dimred.PCAAccumulator(l=30)
        for start in range(0, 500, chunk):
            dimred.fit_chunk(acc, data[start : start + chunk])
        model = dimred.finalize(acc, 8)
        delta = max(
            np.abs(model.mean - mean_o).max(),
            np.abs(model.components - comps_o).max(),
            np.abs(model.eigenvalues - eig_o).max(),
        )
        worst = max(worst, float(delta))
        assert delta < 1e-8

    acc = dimred.PCAAccumulator(l=30)
    dimred.fit_chunk(acc, data)
    full = dimred.finalize(acc, 30)
    trace = np.trace(cov)
    trace_err = abs(full.eigenvalues.sum() - trace) / trace
    assert trace_err < 1e-8
    elapsed = time.perf_counter() - t0
    assert elapsed < 10
    with capsys.disabled():
        _report("ipca-oracle",
                f"max |delta| {worst:.2e}, trace rel err {trace_err:.2e}, {elapsed:.1f}s")


def test_metrics_oracle(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(20):
        c = int(rng.integers(2, 9))
        counts = rng.integers(0, 80, size=(c, c))
        counts[0, 0] += 1  # nonempty
        cm = metrics.ConfusionMatrix(counts=counts.astype(np.int64))

        fc = counts.astype(np.float64)
        total = fc.sum()
        rows, cols = fc.sum(axis=1), fc.sum(axis=0)
        oa_o = np.trace(fc) / total
        recalls = np.diag(fc)[rows > 0] / rows[rows > 0]
        p_e = float(rows @ cols) / total**2
        kappa_o = (oa_o - p_e) / (1 - p_e)

        errs = [abs(metrics.overall_accuracy(cm) - oa_o),
                abs(metrics.kappa(cm) - kappa_o)]
        if (rows > 0).all():
            errs.append(abs(metrics.average_accuracy(cm)[0] - recalls.mean()))
        per_class, _ = metrics.per_class_prf(cm)
        for k, (p, r, f1, _) in enumerate(per_class):
            po = fc[k, k] / cols[k] if cols[k] > 0 else 0.0
            ro = fc[k, k] / rows[k] if rows[k] > 0 else 0.0
            fo = 2 * po * ro / (po + ro) if po + ro > 0 else 0.0
            errs += [abs(p - po), abs(r - ro), abs(f1 - fo)]
        worst = max(worst, max(errs))
        assert max(errs) < 1e-12

    hand = metrics.ConfusionMatrix(counts=np.array([[40, 10], [20, 30]], dtype=np.int64))
    assert metrics.kappa(hand) == 0.40
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    with capsys.disabled():
        _report("metrics-oracle",
                f"20 matrices, worst |delta| {worst:.2e}, kappa==0.40 exact, {elapsed:.2f}s")


def test_end_to_end_desk_scale(capsys):
    t0 = time.perf_counter()
    cube, gt = synth.make_scene(m=40, n=40, l=30, classes=4, noise_frac=0.1, seed=7)
    pca = dimred.fit_cube(cube, 10)
    reduced = dimred.transform(pca, cube, 10)
    split = ingest.stratified_split(gt, 0.35, 0.35, seed=7)
    train_set = patches.extract_labeled(reduced, gt, 11, split.train)
    val_set = patches.extract_labeled(reduced, gt, 11, split.val)
    test_set = patches.extract_labeled(reduced, gt, 11, split.test)

    model = net.build_model(11, 10, 4, seed=7)
    history = net.train(model, train_set, val_set, epochs=15, batch=256, lr=0.001, seed=7)
    assert history[-1].train_acc >= 0.99

    preds = net.predict(model, test_set.patches)
    cm = metrics.accumulate(test_set.labels, preds, 4)
    oa = metrics.overall_accuracy(cm)
    kap = metrics.kappa(cm)
    elapsed = time.perf_counter() - t0
    assert oa >= 0.95
    assert kap >= 0.90
    assert elapsed < 600
    with capsys.disabled():
        _report("end-to-end-desk-scale",
                f"test OA {oa:.4f}, kappa {kap:.4f}, n={len(test_set)}, {elapsed:.1f}s")


def test_determinism_bitwise(tmp_path, capsys):
    cube, gt = synth.make_scene(24, 24, 16, 4, 0.1, seed=5)
    cube_p, labels_p = tmp_path / "d.hsic", tmp_path / "d.hsil"
    ingest.save_cube(cube, cube_p)
    ingest.save_labels(gt, labels_p)

    def run(outdir):
        cmd = [
            sys.executable, "-m", "hsi3dcnn.cli", "--deterministic", "train",
            "--cube", str(cube_p), "--labels", str(labels_p),
            "--outdir", str(outdir), "--window", "9", "--components", "8",
            "--epochs", "2", "--batch", "64", "--seed", "9",
        ]
        r = subprocess.run(cmd, capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        return (outdir / "history.txt").read_bytes(), (outdir / "model.hsim").read_bytes()

    h1, c1 = run(tmp_path / "run1")
    h2, c2 = run(tmp_path / "run2")
    assert h1 == h2
    assert c1 == c2
    with capsys.disabled():
        _report("determinism",
                f"history ({len(h1)} bytes) and checkpoint ({len(c1)} bytes) bitwise identical")


@pytest.mark.skip(reason="full-benchmark reproduction needs the converted real "
                         "datasets (Indian Pines / Pavia / Salinas), which are "
                         "not distributed with the repository; run the sweep "
                         "command on converted cubes as a best-effort extended "
                         "check")
def test_full_benchmark_reproduction_extended():
    pass
