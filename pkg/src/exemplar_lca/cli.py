"""Command-line surface for the coding/classification pipeline.

Subcommands: build-dict, encode, classify, reconstruct, flops, sweep,
eval. Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical
divergence. All outputs are deterministic for fixed config and seeds;
wall-clock timing goes to stderr (and the JSON "timing" field), never
into CSV.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import datasets as _data
from . import decoders as _dec
from . import evaluation as _eval
from . import formats as _fmt
from . import mnist as _mnist
from . import reconstruction as _rec
from . import workload as _wl
from .dictionary import build_dictionary, resolve_operator
from .encoder import encode, encode_batch, write_trace_csv
from .runconfig import RunConfig, load_config, validate_config
from .validation import DataError, DivergenceError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DIVERGED = 4


class UsageError(Exception):
    pass


def _log(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------- config


def _add_config_flags(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--threshold-lambda", type=float, dest="threshold_lambda")
    p.add_argument("--leak-tau", type=float, dest="leak_tau")
    p.add_argument("--steps", type=int)
    p.add_argument("--step-size", type=float, dest="step_size")
    p.add_argument("--backend", choices=["auto", "materialized", "matrix_free"])
    p.add_argument("--seed", type=int)
    p.add_argument("--dict-size", type=int, dest="dict_size")
    p.add_argument("--pixel-gain", type=float, dest="pixel_gain")
    p.add_argument("--input-norm", choices=["pixel", "l2"], dest="input_norm")
    p.add_argument("--gramian-budget-bytes", type=int, dest="gramian_budget_bytes")
    p.add_argument("--encode-batch-size", type=int, dest="encode_batch_size")
    p.add_argument("--early-stop-tol", type=float, dest="early_stop_tol")


_CONFIG_KEYS = (
    "threshold_lambda", "leak_tau", "steps", "step_size", "backend", "seed",
    "dict_size", "pixel_gain", "input_norm", "gramian_budget_bytes",
    "encode_batch_size", "early_stop_tol",
)


def _resolve_config(args, extra=()):
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for key in (*_CONFIG_KEYS, *extra):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return validate_config(cfg.merged(**overrides))


# ---------------------------------------------------------------- inputs


def _add_input_flags(p, split_default="test"):
    p.add_argument("--mnist-dir", help="directory with IDX image/label files")
    p.add_argument("--split", choices=["train", "test"], default=split_default)
    p.add_argument("--features", help="feature-matrix (FMAT) file")
    p.add_argument("--limit", type=int, help="use only the first N inputs")


def _load_vectors(args, cfg, for_reconstruction=False):
    """Load (vectors, labels, images_or_None) from IDX or FMAT sources.

    Classification inputs go through prepare_inputs (the documented
    l2/pixel scaling); reconstruction returns raw-scale rows and the
    caller unit-normalizes the encode input itself.
    """
    if bool(args.mnist_dir) == bool(args.features):
        raise UsageError("exactly one of --mnist-dir or --features is required")
    if args.mnist_dir:
        images, labels = _mnist.load_split(args.mnist_dir, args.split)
        if args.limit is not None:
            images, labels = images[: args.limit], labels[: args.limit]
        if images.shape[0] == 0:
            raise DataError("input set is empty")
        flat = images.reshape(images.shape[0], -1).astype(np.float32)
        if for_reconstruction:
            vectors = flat
        else:
            vectors = _data.prepare_inputs(flat, cfg.input_norm, cfg.pixel_gain)
        return vectors, labels.astype(np.int64), images
    fm = _fmt.read_feature_matrix(args.features)
    values, labels = fm.values, fm.labels
    if args.limit is not None:
        values = values[: args.limit]
        labels = labels[: args.limit] if labels is not None else None
    if values.shape[0] == 0:
        raise DataError("input set is empty")
    values = np.ascontiguousarray(values, dtype=np.float32)
    if not for_reconstruction:
        values = _data.prepare_inputs(values, cfg.input_norm, cfg.pixel_gain)
    labels64 = labels.astype(np.int64) if labels is not None else None
    return values, labels64, None


def _unit_rows(x):
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return x / norms


def _require(path, what):
    if not Path(path).exists():
        raise UsageError(f"{what} not found: {path}")
    return Path(path)


# ------------------------------------------------------------ build-dict


def cmd_build_dict(args):
    cfg = _resolve_config(args)
    if bool(args.mnist_dir) == bool(args.features):
        raise UsageError("exactly one of --mnist-dir or --features is required")
    if args.mnist_dir:
        images, labels = _mnist.load_split(args.mnist_dir, "train")
        # dictionaries keep raw pixel scale so reconstructions land in 0-255
        feats = images.reshape(images.shape[0], -1).astype(np.float32)
    else:
        fm = _fmt.read_feature_matrix(_require(args.features, "feature file"))
        if fm.labels is None:
            raise DataError(f"{args.features} has no labels; cannot build a dictionary")
        feats, labels = fm.values, fm.labels
    labels = np.asarray(labels, dtype=np.int64)
    if cfg.dict_size > feats.shape[0]:
        raise DataError(
            f"dictionary size {cfg.dict_size} exceeds available rows {feats.shape[0]}"
        )
    keep, _ = _data.split_dataset(
        None, labels, cfg.dict_size, cfg.seed, stratified=cfg.stratified
    )
    dictionary = build_dictionary(feats[keep], labels[keep])
    _fmt.write_dictionary(args.out, dictionary)
    hist = dictionary.class_histogram()
    if args.json:
        print(json.dumps({
            "out": str(args.out),
            "atoms": dictionary.m,
            "feature_dim": dictionary.n,
            "class_histogram": hist.tolist(),
        }))
    else:
        print(f"dictionary: {dictionary.m} atoms x {dictionary.n} features")
        print("class histogram: " + " ".join(str(int(c)) for c in hist))
    return EXIT_OK


# ---------------------------------------------------------------- encode


def _open_out(path):
    return open(path, "w") if path else sys.stdout


def cmd_encode(args):
    cfg = _resolve_config(args)
    dictionary = _fmt.read_dictionary(_require(args.dict, "dictionary"))
    vectors, _, _ = _load_vectors(args, cfg)
    if vectors.shape[1] != dictionary.n:
        raise DataError(
            f"input dim {vectors.shape[1]} does not match dictionary dim {dictionary.n}"
        )
    lca = cfg.to_lca_config()
    out = _open_out(args.out)
    try:
        out.write("input_index,atom_index,activation\n")
        index = 0
        for batch in _eval.encode_dataset(
            dictionary, vectors, lca, cfg.encode_batch_size
        ):
            for code in batch:
                for atom in np.flatnonzero(code.a):
                    out.write(f"{index},{int(atom)},{float(code.a[atom])!r}\n")
                index += 1
    finally:
        if out is not sys.stdout:
            out.close()
    if args.trace_dir:
        _dump_traces(args, cfg, dictionary, vectors)
    return EXIT_OK


def _dump_traces(args, cfg, dictionary, vectors, threshold=None):
    trace_dir = Path(args.trace_dir)
    trace_dir.mkdir(parents=True, exist_ok=True)
    lca = cfg.to_lca_config(record_trace=True, threshold=threshold)
    operator = resolve_operator(dictionary, lca.backend, lca.gramian_budget_bytes)
    count = min(vectors.shape[0], args.trace_limit)
    for i in range(count):
        code = encode(dictionary, vectors[i], lca, operator)
        with open(trace_dir / f"trace_{i:04d}.csv", "w") as fh:
            write_trace_csv(code, fh)
    _log(f"wrote {count} trace files to {trace_dir}")


# -------------------------------------------------------------- classify


def cmd_classify(args):
    cfg = _resolve_config(args)
    dictionary = _fmt.read_dictionary(_require(args.dict, "dictionary"))
    vectors, _, _ = _load_vectors(args, cfg)
    if vectors.shape[1] != dictionary.n:
        raise DataError(
            f"input dim {vectors.shape[1]} does not match dictionary dim {dictionary.n}"
        )
    decoder = args.decoder or cfg.decoder
    if decoder == "all":
        raise UsageError("classify needs a single decoder; use eval for all three")
    nn_model = None
    if decoder == _dec.SHALLOW_NN:
        if not args.nn_model:
            raise UsageError("--nn-model is required for the shallow_nn decoder")
        nn_model = _fmt.read_shallow_nn(_require(args.nn_model, "readout model"))
    lca = cfg.to_lca_config()
    out = _open_out(args.out)
    try:
        out.write("input_index,predicted,abstain,score\n")
        index = 0
        for batch in _eval.encode_dataset(
            dictionary, vectors, lca, cfg.encode_batch_size
        ):
            for code in batch:
                if decoder == _dec.MAX_ACTIVATION:
                    scores = _dec.decode_max_activation(code, dictionary)
                elif decoder == _dec.MAX_CLASS_SUM:
                    scores = _dec.decode_max_class_sum(code, dictionary)
                else:
                    scores = _dec.decode_shallow_nn(nn_model, code)
                top = scores.scores[scores.predicted]
                top = 0.0 if not np.isfinite(top) else float(top)
                out.write(
                    f"{index},{scores.predicted},{int(scores.abstain)},{top!r}\n"
                )
                index += 1
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ------------------------------------------------------------------ eval


def _eval_rows_csv(report, split):
    lines = ["decoder,split,top1,abstain_count,mean_firing_fraction"]
    for r in report.results:
        lines.append(
            f"{r.decoder},{split},{r.top1:.6f},{r.abstain_count},"
            f"{report.mean_firing_fraction:.8f}"
        )
    return "\n".join(lines) + "\n"


def cmd_eval(args):
    cfg = _resolve_config(args)
    dictionary = _fmt.read_dictionary(_require(args.dict, "dictionary"))
    vectors, labels, _ = _load_vectors(args, cfg)
    if labels is None:
        raise DataError("evaluation inputs carry no labels")
    if vectors.shape[0] == 0:
        raise DataError("empty evaluation set")
    if vectors.shape[1] != dictionary.n:
        raise DataError(
            f"input dim {vectors.shape[1]} does not match dictionary dim {dictionary.n}"
        )
    decoder = args.decoder or cfg.decoder
    kinds = list(_dec.DECODER_KINDS) if decoder == "all" else [decoder]
    lca = cfg.to_lca_config()

    nn_model = None
    if _dec.SHALLOW_NN in kinds:
        nn_model = _maybe_train_readout(args, cfg, dictionary, lca)

    report = _eval.evaluate_decoders(
        dictionary, vectors, labels, lca, kinds,
        nn_model=nn_model, batch_size=cfg.encode_batch_size,
    )
    _log(f"eval wall-clock: {report.wall_seconds:.2f}s over {report.total} inputs")
    csv_text = _eval_rows_csv(report, args.split)
    if args.json:
        print(json.dumps({
            "rows": [r.__dict__ for r in report.results],
            "split": args.split,
            "mean_firing_fraction": report.mean_firing_fraction,
            "per_step_firing_fraction": report.per_step_firing_fraction.tolist(),
            "timing": {"wall_seconds": report.wall_seconds},
        }))
    elif args.out:
        Path(args.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.trace_dir:
        _dump_traces(args, cfg, dictionary, vectors)
    return EXIT_OK


def _maybe_train_readout(args, cfg, dictionary, lca):
    if args.nn_model and Path(args.nn_model).exists():
        return _fmt.read_shallow_nn(args.nn_model)
    if args.train_features:
        fm = _fmt.read_feature_matrix(_require(args.train_features, "training features"))
        if fm.labels is None:
            raise DataError(f"{args.train_features} has no labels")
        train_vec = _data.prepare_inputs(
            fm.values.astype(np.float32), cfg.input_norm, cfg.pixel_gain
        )
        train_lab = fm.labels.astype(np.int64)
    elif args.mnist_dir:
        images, train_lab = _mnist.load_split(args.mnist_dir, "train")
        take, _ = _data.split_dataset(
            None, train_lab.astype(np.int64),
            min(cfg.nn_train_samples, images.shape[0]),
            cfg.seed + 1, stratified=True,
        )
        images, train_lab = images[take], train_lab[take].astype(np.int64)
        train_vec = _data.prepare_inputs(
            images.reshape(images.shape[0], -1).astype(np.float32),
            cfg.input_norm, cfg.pixel_gain,
        )
    else:
        raise UsageError(
            "shallow_nn needs --nn-model, --train-features, or --mnist-dir"
        )
    _log(f"training readout on {train_vec.shape[0]} codes")
    model = _eval.train_readout(
        dictionary, train_vec, train_lab, lca,
        _dec.ShallowNnConfig(
            epochs=cfg.shallow_nn_epochs,
            learning_rate=cfg.shallow_nn_learning_rate,
            batch_size=cfg.shallow_nn_batch_size,
            seed=cfg.shallow_nn_seed,
        ),
        batch_size=cfg.encode_batch_size,
    )
    if args.nn_model:
        _fmt.write_shallow_nn(args.nn_model, model)
        _log(f"saved readout model to {args.nn_model}")
    return model


# ------------------------------------------------------------ reconstruct


def cmd_reconstruct(args):
    cfg = _resolve_config(args)
    dictionary = _fmt.read_dictionary(_require(args.dict, "dictionary"))
    vectors, _, images = _load_vectors(args, cfg, for_reconstruction=True)
    if images is None:
        raise UsageError("reconstruct needs --mnist-dir (pixel images)")
    if vectors.shape[1] != dictionary.n:
        raise DataError(
            f"input dim {vectors.shape[1]} does not match dictionary dim {dictionary.n}"
        )
    count = vectors.shape[0] if args.count is None else min(args.count, vectors.shape[0])
    lam = args.recon_threshold if args.recon_threshold is not None \
        else cfg.recon_threshold_lambda
    lca = cfg.to_lca_config(threshold=lam)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)

    dictionaries = [("dataset", dictionary)]
    if args.compare_random:
        dictionaries.append(
            ("random", _rec.random_dictionary(dictionary.m, dictionary.n, cfg.seed))
        )
    # encode in the unit-norm working space; metrics compare raw pixels
    encode_inputs = _unit_rows(vectors)
    out = _open_out(args.out)
    try:
        out.write("image_index,dictionary,mse,psnr,ssim,iterations\n")
        side = images.shape[1]
        for name, d in dictionaries:
            operator = resolve_operator(d, lca.backend, lca.gramian_budget_bytes)
            for start in range(0, count, cfg.encode_batch_size):
                stop = min(count, start + cfg.encode_batch_size)
                batch = encode_batch(d, encode_inputs[start:stop], lca, operator)
                for offset, code in enumerate(batch):
                    i = start + offset
                    recon = _rec.reconstruct(d, code).reshape(side, side)
                    rep = _rec.quality_report(images[i], recon, code.steps_run)
                    out.write(
                        f"{i},{name},{rep.mse:.4f},{rep.psnr:.4f},"
                        f"{rep.ssim:.6f},{rep.iterations}\n"
                    )
                    if out_dir:
                        _rec.export_pgm(out_dir / f"{i:04d}_original.pgm", images[i])
                        _rec.export_pgm(out_dir / f"{i:04d}_{name}.pgm", recon)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# ----------------------------------------------------------------- flops


def cmd_flops(args):
    if args.table:
        rows = _wl.reference_table()
    else:
        for name in ("steps", "feature_dim", "dict_size", "firing"):
            if getattr(args, name) is None:
                raise UsageError(
                    "flops needs --steps --feature-dim --dict-size --firing (or --table)"
                )
        est = _wl.estimate(args.steps, args.feature_dim, args.dict_size, args.firing)
        rows = [{
            "extractor": "custom",
            "training_tflops": est.training_flops / 1e12,
            "K": est.params["K"],
            "N": est.params["N"],
            "M": est.params["M"],
            "M_hat": est.params["M_hat"],
            "inference_gflops": est.inference_flops / 1e9,
            "training_flops": est.training_flops,
            "inference_flops": est.inference_flops,
        }]
    if args.json:
        print(json.dumps(rows))
        return EXIT_OK
    header = f"{'Feature Extractor':<24}{'Training (TFLOPs)':>18}{'K':>5}{'N':>6}" \
             f"{'M':>8}{'M_hat':>7}{'Inference (GFLOPs)':>20}"
    print(header)
    for r in rows:
        print(
            f"{r['extractor']:<24}{r['training_tflops']:>18.2f}{r['K']:>5}"
            f"{r['N']:>6}{r['M']:>8}{r['M_hat']:>7}{r['inference_gflops']:>20.2f}"
        )
    return EXIT_OK


# ----------------------------------------------------------------- sweep


def _parse_grid(params):
    grid = {}
    casts = {
        "threshold_lambda": float, "leak_tau": float, "steps": int,
        "dict_size": int, "pixel_gain": float, "step_size": float,
    }
    for spec in params or ():
        if "=" not in spec:
            raise UsageError(f"--param must look like key=v1,v2 (got {spec!r})")
        key, _, raw = spec.partition("=")
        key = key.strip()
        if key not in casts:
            raise UsageError(
                f"sweep parameter must be one of {sorted(casts)}, got {key!r}"
            )
        try:
            grid[key] = [casts[key](v) for v in raw.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"--param {key}: {exc}") from exc
        if not grid[key]:
            raise UsageError(f"--param {key} lists no values")
    if not grid:
        raise UsageError("sweep needs at least one --param key=v1,v2")
    return grid


def _grid_points(grid):
    import itertools

    keys = sorted(grid)
    for combo in itertools.product(*(grid[k] for k in keys)):
        yield dict(zip(keys, combo))


def _point_hash(point):
    canon = json.dumps(point, sort_keys=True)
    return hashlib.sha1(canon.encode()).hexdigest()[:16]


def cmd_sweep(args):
    cfg = _resolve_config(args)
    grid = _parse_grid(args.param)
    if not args.mnist_dir:
        raise UsageError("sweep needs --mnist-dir")
    out_path = Path(args.out)
    ckpt_path = Path(str(out_path) + ".ckpt")

    done = {}
    if ckpt_path.exists():
        for line in ckpt_path.read_text().splitlines():
            key, _, row = line.partition(" ")
            if row:
                done[key] = row
    images, labels = _mnist.load_split(args.mnist_dir, "train")
    test_images, test_labels = _mnist.load_split(args.mnist_dir, args.split)
    if args.limit is not None:
        test_images, test_labels = test_images[: args.limit], test_labels[: args.limit]
    labels = labels.astype(np.int64)
    test_labels = test_labels.astype(np.int64)

    param_keys = sorted(grid)
    header = ",".join(param_keys) + ",top1,abstain_count,mean_firing_fraction"
    rows = []
    with open(ckpt_path, "a") as ckpt:
        for point in _grid_points(grid):
            key = _point_hash(point)
            if key in done:
                rows.append(done[key])
                continue
            row = _sweep_point(cfg, point, images, labels, test_images, test_labels)
            rows.append(row)
            ckpt.write(f"{key} {row}\n")
            ckpt.flush()
            _log(f"sweep point {point} -> {row}")
    out_path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return EXIT_OK


def _sweep_point(cfg, point, images, labels, test_images, test_labels):
    local = cfg.merged(**point)
    size = min(local.dict_size, images.shape[0])
    keep, _ = _data.split_dataset(None, labels, size, local.seed, local.stratified)
    feats = images[keep].reshape(keep.size, -1).astype(np.float32)
    dictionary = build_dictionary(feats, labels[keep])
    vectors = _data.prepare_inputs(
        test_images.reshape(test_images.shape[0], -1).astype(np.float32),
        local.input_norm, local.pixel_gain,
    )
    report = _eval.evaluate_decoders(
        dictionary, vectors, test_labels, local.to_lca_config(),
        [local.decoder if local.decoder != "all" else _dec.MAX_CLASS_SUM],
        batch_size=local.encode_batch_size,
    )
    r = report.results[0]
    values = ",".join(repr(point[k]) for k in sorted(point))
    return f"{values},{r.top1:.6f},{r.abstain_count},{report.mean_firing_fraction:.8f}"


# ------------------------------------------------------------------ main


def build_parser():
    parser = argparse.ArgumentParser(
        prog="exemplar-lca",
        description="Sparse-coding classification over an exemplar dictionary",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-dict", help="build and store an exemplar dictionary")
    _add_config_flags(p)
    p.add_argument("--mnist-dir")
    p.add_argument("--features")
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_build_dict)

    p = sub.add_parser("encode", help="write sparse codes as CSV")
    _add_config_flags(p)
    _add_input_flags(p)
    p.add_argument("--dict", required=True)
    p.add_argument("--out")
    p.add_argument("--trace-dir")
    p.add_argument("--trace-limit", type=int, default=8)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("classify", help="predict classes for inputs")
    _add_config_flags(p)
    _add_input_flags(p)
    p.add_argument("--dict", required=True)
    p.add_argument("--decoder", choices=[*_dec.DECODER_KINDS])
    p.add_argument("--nn-model")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("eval", help="accuracy report for one or all decoders")
    _add_config_flags(p)
    _add_input_flags(p)
    p.add_argument("--dict", required=True)
    p.add_argument("--decoder", choices=[*_dec.DECODER_KINDS, "all"])
    p.add_argument("--nn-model", help="load (or save after training) the readout")
    p.add_argument("--train-features", help="FMAT with labels for readout training")
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.add_argument("--trace-dir")
    p.add_argument("--trace-limit", type=int, default=8)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("reconstruct", help="rebuild images and score quality")
    _add_config_flags(p)
    _add_input_flags(p)
    p.add_argument("--dict", required=True)
    p.add_argument("--count", type=int)
    p.add_argument("--recon-threshold", type=float, dest="recon_threshold")
    p.add_argument("--compare-random", action="store_true")
    p.add_argument("--out")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("flops", help="analytical workload estimates")
    p.add_argument("--steps", type=int)
    p.add_argument("--feature-dim", type=int, dest="feature_dim")
    p.add_argument("--dict-size", type=int, dest="dict_size")
    p.add_argument("--firing", type=int)
    p.add_argument("--table", action="store_true", help="print the reference grid")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_flops)

    p = sub.add_parser("sweep", help="grid sweep with resume support")
    _add_config_flags(p)
    p.add_argument("--mnist-dir", required=True)
    p.add_argument("--split", choices=["train", "test"], default="test")
    p.add_argument("--limit", type=int)
    p.add_argument("--param", action="append",
                   help="key=v1,v2 (threshold_lambda, leak_tau, steps, dict_size, ...)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or EXIT_OK
    except UsageError as exc:
        _log(f"usage error: {exc}")
        return EXIT_USAGE
    except DataError as exc:
        _log(f"data error: {exc}")
        return EXIT_DATA
    except DivergenceError as exc:
        _log(f"numerical divergence: {exc}")
        return EXIT_DIVERGED
    except FileNotFoundError as exc:
        _log(f"data error: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
