"""Command-line pipeline: summary, pca, train, evaluate, predict, sweep.

Every command echoes its effective configuration (including the seed) to
stdout and into the head of each text output file, so any run can be
reproduced from its artifacts.  ``--deterministic`` pins the numeric
libraries to one thread (set before numpy is first imported) and zeroes the
wall-clock column of history files so reruns are bitwise identical.

Engine imports happen inside the handlers on purpose; keep numpy out of the
module top level.
"""

import argparse
import os
import sys

SWEEP_WINDOWS = (11, 13, 15, 17, 19, 21, 25)

_THREAD_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def _echo(pairs) -> list:
    return [f"{k}={v}" for k, v in pairs]


def _print_echo(lines) -> None:
    for line in lines:
        print(f"# {line}")


def _write_text(path, echo_lines, body) -> None:
    with open(path, "w") as fh:
        for line in echo_lines:
            fh.write(f"# {line}\n")
        fh.write(body)


def _dtype(args):
    import numpy as np

    return np.float64 if args.precision == "float64" else np.float32


def _load_scene(args):
    from . import ingest
    from .errors import ShapeError

    cube = ingest.load_cube(args.cube)
    gt = ingest.load_labels(args.labels)
    if (gt.m, gt.n) != (cube.m, cube.n):
        raise ShapeError(
            f"labels {gt.m}x{gt.n} do not match cube {cube.m}x{cube.n}"
        )
    return cube, gt


def _fit_or_load_pca(args, cube, gt=None):
    from . import dimred, ingest
    from .errors import ConfigError

    if getattr(args, "pca_model", None):
        return dimred.load_model(args.pca_model), False
    coords = None
    if getattr(args, "pca_scope", "all") == "train":
        if gt is None:
            if not getattr(args, "labels", None):
                raise ConfigError("--pca-scope train needs --labels to build the split")
            gt = ingest.load_labels(args.labels)
        split = ingest.stratified_split(gt, args.train_frac, args.val_frac, args.seed)
        coords = split.train
    return dimred.fit_cube(cube, args.components, chunk_pixels=args.chunk, coords=coords), True


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_summary(args) -> int:
    from . import net

    model = net.build_model(args.window, args.bands, args.classes, dropout_rate=args.dropout)
    print(net.summary_text(model))
    return 0


def cmd_pca(args) -> int:
    from . import dimred, ingest

    cube = ingest.load_cube(args.cube)
    echo = _echo([
        ("command", "pca"), ("cube", args.cube), ("components", args.components),
        ("chunk", args.chunk), ("scope", args.pca_scope), ("seed", args.seed),
    ])
    _print_echo(echo)
    model, _ = _fit_or_load_pca(args, cube)
    dimred.save_model(model, args.out)
    ev = ", ".join(f"{v:.4g}" for v in model.eigenvalues)
    print(f"fitted {model.b} components over {cube.l} bands; eigenvalues: {ev}")
    print(f"wrote {args.out}")
    return 0


def _prepare_patches(args, cube, gt):
    """Shared front half of train/evaluate: PCA, transform, split, extract."""
    from . import dimred, ingest, patches

    pca, fitted = _fit_or_load_pca(args, cube, gt)
    reduced = dimred.transform(pca, cube, args.components)
    if args.precision == "float64":
        reduced = reduced.astype("float64")
    split = ingest.stratified_split(gt, args.train_frac, args.val_frac, args.seed)
    sets = {
        name: patches.extract_labeled(reduced, gt, args.window, coords)
        for name, coords in (("train", split.train), ("val", split.val), ("test", split.test))
    }
    return pca, fitted, reduced, sets


def _train_one(args, cube, gt, outdir):
    import numpy as np

    from . import dimred, net

    os.makedirs(outdir, exist_ok=True)
    echo = _echo([
        ("command", "train"), ("cube", args.cube), ("labels", args.labels),
        ("window", args.window), ("components", args.components),
        ("epochs", args.epochs), ("batch", args.batch), ("lr", args.lr),
        ("dropout", args.dropout), ("train_frac", args.train_frac),
        ("val_frac", args.val_frac), ("seed", args.seed),
        ("precision", args.precision), ("select", args.select),
        ("conv_impl", args.conv_impl), ("deterministic", args.deterministic),
    ])
    _print_echo(echo)

    pca, fitted, reduced, sets = _prepare_patches(args, cube, gt)
    if fitted:
        dimred.save_model(pca, os.path.join(outdir, "pca.hsip"))
    for name in ("train", "val", "test"):
        skipped = sets[name].n_skipped
        note = f" ({skipped} border pixels skipped)" if skipped else ""
        print(f"{name}: {len(sets[name])} patches{note}")

    model = net.build_model(
        args.window, args.components, gt.c, dropout_rate=args.dropout,
        seed=args.seed, dtype=_dtype(args), conv_impl=args.conv_impl,
    )
    history = net.train(
        model, sets["train"], sets["val"], epochs=args.epochs, batch=args.batch,
        lr=args.lr, seed=args.seed, select=args.select,
        log=lambda h: print(
            f"epoch {h.epoch:3d}  train_loss {h.train_loss:.4f}  train_acc {h.train_acc:.4f}  "
            f"val_loss {h.val_loss:.4f}  val_acc {h.val_acc:.4f}  {h.seconds:.2f}s"
        ),
    )
    ckpt = os.path.join(outdir, "model.hsim")
    net.save_checkpoint(model, ckpt)
    _write_text(
        os.path.join(outdir, "history.txt"), echo,
        net.format_history(history, deterministic=args.deterministic),
    )
    print(f"wrote {ckpt}")
    return model, reduced, sets, echo


def cmd_train(args) -> int:
    cube, gt = _load_scene(args)
    _train_one(args, cube, gt, args.outdir)
    return 0


def cmd_evaluate(args) -> int:
    from . import metrics, net

    cube, gt = _load_scene(args)
    echo = _echo([
        ("command", "evaluate"), ("cube", args.cube), ("labels", args.labels),
        ("checkpoint", args.checkpoint), ("split", args.split),
        ("window", args.window), ("components", args.components),
        ("train_frac", args.train_frac), ("val_frac", args.val_frac),
        ("seed", args.seed), ("precision", args.precision),
    ])
    _print_echo(echo)

    model = net.load_checkpoint(args.checkpoint, conv_impl=args.conv_impl)
    if model.s != args.window or model.b != args.components:
        from .errors import CheckpointError

        raise CheckpointError(
            f"checkpoint was trained with window {model.s}, {model.b} components; "
            f"got --window {args.window} --components {args.components}"
        )
    _, _, _, sets = _prepare_patches(args, cube, gt)
    chosen = sets[args.split]
    loss, acc, preds = net.evaluate_batches(model, chosen.patches, chosen.labels, args.batch)
    cm = metrics.accumulate(chosen.labels, preds, gt.c)
    os.makedirs(args.outdir, exist_ok=True)
    report = os.path.join(args.outdir, "report.txt")
    with open(report, "w") as fh:
        fh.write(metrics.report_text(cm, header_lines=echo))
    oa = metrics.overall_accuracy(cm)
    aa, _ = metrics.average_accuracy(cm)
    print(
        f"{args.split}: n={len(chosen)} loss={loss:.4f} "
        f"oa={metrics.percent(oa)} aa={metrics.percent(aa)} kappa={metrics.kappa(cm):.4f}"
    )
    print(f"wrote {report}")
    return 0


def cmd_predict(args) -> int:
    import numpy as np

    from . import dimred, ingest, net
    from .errors import ConfigError

    if args.mask_unlabeled and not args.labels:
        raise ConfigError("--mask-unlabeled needs --labels")
    cube = ingest.load_cube(args.cube)
    echo = _echo([
        ("command", "predict"), ("cube", args.cube), ("checkpoint", args.checkpoint),
        ("components", args.components), ("seed", args.seed),
        ("mask_unlabeled", bool(args.labels and args.mask_unlabeled)),
    ])
    _print_echo(echo)
    model = net.load_checkpoint(args.checkpoint, conv_impl=args.conv_impl)
    pca, _ = _fit_or_load_pca(args, cube)
    reduced = dimred.transform(pca, cube, args.components)
    class_map = net.predict_full_map(model, reduced, batch=args.batch)
    if args.labels and args.mask_unlabeled:
        gt = ingest.load_labels(args.labels)
        class_map = np.where(gt.labels > 0, class_map, 0)
    if class_map.max() > 255:
        raise ConfigError("more than 255 classes cannot be written as 8-bit PGM")
    header = "P5\n" + "".join(f"# {line}\n" for line in echo)
    header += f"{class_map.shape[1]} {class_map.shape[0]}\n255\n"
    with open(args.out, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(class_map.astype(np.uint8).tobytes())
    print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    from . import metrics, net

    cube, gt = _load_scene(args)
    echo = _echo([
        ("command", "sweep"), ("cube", args.cube), ("labels", args.labels),
        ("windows", ",".join(str(w) for w in args.windows)),
        ("components", args.components), ("epochs", args.epochs),
        ("batch", args.batch), ("lr", args.lr), ("dropout", args.dropout),
        ("train_frac", args.train_frac), ("val_frac", args.val_frac),
        ("seed", args.seed), ("precision", args.precision),
    ])
    _print_echo(echo)
    rows = []
    for window in args.windows:
        sub = argparse.Namespace(**vars(args))
        sub.window = window
        outdir = os.path.join(args.outdir, f"w{window}")
        model, reduced, sets, _ = _train_one(sub, cube, gt, outdir)
        chosen = sets["test"]
        _, _, preds = net.evaluate_batches(model, chosen.patches, chosen.labels, args.batch)
        cm = metrics.accumulate(chosen.labels, preds, gt.c)
        with open(os.path.join(outdir, "report.txt"), "w") as fh:
            fh.write(metrics.report_text(cm, header_lines=echo + [f"window={window}"]))
        oa = metrics.overall_accuracy(cm)
        aa, _ = metrics.average_accuracy(cm)
        rows.append((window, oa, aa, metrics.kappa(cm)))
        print(f"window {window}: oa={metrics.percent(oa)} aa={metrics.percent(aa)} "
              f"kappa={metrics.percent(rows[-1][3])}")
    body = ["window,oa,aa,kappa"]
    body += [f"{w},{oa!r},{aa!r},{k!r}" for w, oa, aa, k in rows]
    body.append("")
    body.append(f"{'Window':>8} {'OA':>8} {'AA':>8} {'Kappa':>8}")
    for w, oa, aa, k in rows:
        body.append(f"{w:>8} {metrics.percent(oa):>8} {metrics.percent(aa):>8} "
                    f"{metrics.percent(k):>8}")
    os.makedirs(args.outdir, exist_ok=True)
    grid = os.path.join(args.outdir, "grid.txt")
    _write_text(grid, echo, "\n".join(body) + "\n")
    print(f"wrote {grid}")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _add_common(p, *, needs_labels=True, needs_window=True):
    p.add_argument("--cube", required=True, help="input .hsic cube")
    if needs_labels:
        p.add_argument("--labels", required=True, help="input .hsil label grid")
    if needs_window:
        p.add_argument("--window", type=int, default=11, help="odd patch window size")
    p.add_argument("--components", type=int, default=20, help="PCA components kept")
    p.add_argument("--train-frac", type=float, default=0.35)
    p.add_argument("--val-frac", type=float, default=0.35)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch", type=int, default=256)
    p.add_argument("--precision", choices=("float32", "float64"), default="float32")
    p.add_argument("--conv-impl", choices=("lowered", "direct"), default="lowered")
    p.add_argument("--pca-model", default=None, help="reuse a saved .hsip model")
    p.add_argument("--pca-scope", choices=("all", "train"), default="all",
                   help="fit PCA on all pixels or training pixels only")
    p.add_argument("--chunk", type=int, default=4096, help="PCA chunk size in pixels")


def _add_train_opts(p):
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.001)
    p.add_argument("--dropout", type=float, default=0.4)
    p.add_argument("--select", choices=("final", "best-val"), default="final",
                   help="keep final-epoch weights or the best validation epoch")
    p.add_argument("--outdir", required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hsi3dcnn",
        description="Spectral-spatial 3D CNN pipeline for hyperspectral classification.",
    )
    ap.add_argument("--deterministic", action="store_true",
                    help="single-threaded numerics and timing-free output files")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summary", help="print the layer table for a configuration")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--bands", type=int, required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--dropout", type=float, default=0.4)
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("pca", help="fit the band-reduction model and save it")
    _add_common(p, needs_labels=False, needs_window=False)
    p.add_argument("--labels", default=None, help="needed when --pca-scope train")
    p.add_argument("--out", required=True, help="output .hsip path")
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("train", help="run the full training pipeline")
    _add_common(p)
    _add_train_opts(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="metrics report for a checkpoint on a split")
    _add_common(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", choices=("train", "val", "test"), default="test")
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="full-scene class map as binary PGM")
    _add_common(p, needs_labels=False, needs_window=False)
    p.add_argument("--labels", default=None)
    p.add_argument("--mask-unlabeled", action="store_true",
                   help="zero out pixels unlabeled in --labels")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True, help="output .pgm path")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="train/evaluate across a window-size grid")
    _add_common(p)
    _add_train_opts(p)
    p.add_argument("--windows", type=int, nargs="+", default=list(SWEEP_WINDOWS))
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.deterministic:
        for var in _THREAD_VARS:
            os.environ[var] = "1"  # before numpy's first import
    from .errors import EngineError

    try:
        return args.func(args)
    except EngineError as e:
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error[io]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
