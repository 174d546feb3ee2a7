"""Pipeline driver: generate -> init -> train -> eval -> chart, plus compare.

Every verb takes the experiment description either from a JSON file
(``--config``) or a built-in preset (``--preset default|desk|tiny``), and an
optional ``--seed-override R`` that re-derives all stage seeds from the root
seed R.  Outputs are deterministic functions of (config, seeds): rerunning a
verb with identical inputs produces byte-identical files.

Exit codes: 0 success; 2 malformed config or invalid values; 3 dimension
mismatch between config, dataset, and model; 4 I/O or file-format failure.
On failure, the last stderr line is machine-readable JSON:
``{"error": "<category>", "detail": "<message>"}``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import encoder, evalmetrics, fileio, synthgen
from .config import ConfigError, ExperimentConfig, preset
from .rng import substream
from .trainer import split_dataset, train

EXIT_CONFIG = 2
EXIT_DIMENSION = 3
EXIT_IO = 4


class DimensionError(ValueError):
    """Config, dataset, and model dimensions disagree."""


def _model_input_dim(model) -> int:
    return model.m


def _check_model_data(model, cs) -> None:
    m = cs.channels.shape[1]
    if _model_input_dim(model) != m:
        raise DimensionError(f"model expects M={_model_input_dim(model)} "
                             f"channel entries, dataset has M={m}")


def _load_dataset(cfg: ExperimentConfig, path: str):
    return fileio.read_dataset(path, sample_rate=cfg.sample_rate())


def _eval_indices(cfg: ExperimentConfig, n: int):
    """The train/held-out index split implied by the training seed."""
    return split_dataset(n, cfg.training.split_ratio, substream(cfg.seeds["training"], 0))


# ---------------------------------------------------------------------------
# verbs


def cmd_generate(cfg: ExperimentConfig, out_path: str) -> int:
    traj, radio, scat, n_expect = cfg.scenario_objects()
    track = synthgen.generate_trajectory(traj)
    cs = synthgen.synthesize_channels(track, radio, scat, sample_rate=traj.sample_rate)
    if n_expect is not None and cs.channels.shape[0] != n_expect:
        raise DimensionError(f"scenario produced {cs.channels.shape[0]} samples, "
                             f"expected {n_expect}")
    fileio.write_dataset(out_path, cs)
    n, m = cs.channels.shape
    print(f"generate: wrote {out_path} with N={n} samples, M={m} channel entries")
    return 0


def _init_model(cfg: ExperimentConfig, cs):
    e = cfg.encoder
    if e.init == "smart":
        return encoder.init_smart(cs, e.n_init, e.k_iso, e.k, e.d_out, cfg.seeds["init"])
    return encoder.init_random(cs.channels.shape[1], e.n_init, e.k, e.d_out,
                               cfg.seeds["init"])


def cmd_init(cfg: ExperimentConfig, data_path: str, out_path: str) -> int:
    cs = _load_dataset(cfg, data_path)
    if cfg.encoder.k > cfg.encoder.n_init:
        raise DimensionError(f"encoder.k={cfg.encoder.k} exceeds n_init={cfg.encoder.n_init}")
    if cfg.encoder.init == "smart" and cfg.encoder.n_init > cs.channels.shape[0]:
        raise DimensionError(f"encoder.n_init={cfg.encoder.n_init} exceeds "
                             f"dataset size {cs.channels.shape[0]}")
    model = _init_model(cfg, cs)
    fileio.write_model(out_path, model)
    print(f"init: wrote {out_path} ({cfg.encoder.init} init, "
          f"{encoder.count_params(model)} parameters)")
    return 0


def cmd_train(cfg: ExperimentConfig, data_path: str, model_in: str,
              model_out: str, loss_path: str | None) -> int:
    cs = _load_dataset(cfg, data_path)
    model = fileio.read_model(model_in)
    _check_model_data(model, cs)
    mining = cfg.mining_config(cs.sample_rate)
    report = train(model, cs, cfg.train_config(), mining)
    fileio.write_model(model_out, model)
    if loss_path is not None:
        fileio.write_text(loss_path, fileio.loss_csv(report.epoch_losses))
    print(f"train: {len(report.epoch_losses)} epochs, mean loss "
          f"{report.epoch_losses[0]:.6f} -> {report.epoch_losses[-1]:.6f}, "
          f"wrote {model_out}")
    return 0


def cmd_eval(cfg: ExperimentConfig, data_path: str, model_path: str,
             out_path: str) -> int:
    cs = _load_dataset(cfg, data_path)
    model = fileio.read_model(model_path)
    _check_model_data(model, cs)
    _, eval_idx = _eval_indices(cfg, cs.channels.shape[0])
    report = evalmetrics.evaluate(model, cs, eval_idx, cfg.k_grid)
    fileio.write_text(out_path, report.to_csv())
    k, frac, tw, ct = report.rows[0]
    print(f"eval: {report.n_eval} held-out samples, TW@{frac:g}={tw:.4f} "
          f"CT@{frac:g}={ct:.4f} (K={k}), wrote {out_path}")
    return 0


def cmd_chart(cfg: ExperimentConfig, data_path: str, model_path: str,
              out_base: str) -> int:
    cs = _load_dataset(cfg, data_path)
    model = fileio.read_model(model_path)
    _check_model_data(model, cs)
    if model.d_out != 2:
        raise DimensionError(f"chart export needs a 2-D chart, model has d_out={model.d_out}")
    chart, ok = encoder.chart_batch(model, cs.channels)
    csv_path, svg_path = out_base + ".csv", out_base + ".svg"
    fileio.write_text(csv_path, fileio.chart_csv(chart, np.asarray(cs.positions)))
    fileio.write_text(svg_path, fileio.chart_svg(chart))
    skipped = int(chart.shape[0] - np.count_nonzero(ok))
    note = f" ({skipped} degenerate samples charted at origin)" if skipped else ""
    print(f"chart: wrote {csv_path} and {svg_path}{note}")
    return 0


def cmd_compare(cfg: ExperimentConfig, out_dir: str) -> int:
    os.makedirs(out_dir, exist_ok=True)
    traj, radio, scat, n_expect = cfg.scenario_objects()
    track = synthgen.generate_trajectory(traj)
    cs = synthgen.synthesize_channels(track, radio, scat, sample_rate=traj.sample_rate)
    if n_expect is not None and cs.channels.shape[0] != n_expect:
        raise DimensionError(f"scenario produced {cs.channels.shape[0]} samples, "
                             f"expected {n_expect}")
    n, m = cs.channels.shape
    if cfg.encoder.n_init > n:
        raise DimensionError(f"encoder.n_init={cfg.encoder.n_init} exceeds dataset size {n}")
    _, eval_idx = _eval_indices(cfg, n)
    mining = cfg.mining_config(cs.sample_rate)
    e = cfg.encoder

    arms = [
        ("smart", lambda: encoder.init_smart(cs, e.n_init, e.k_iso, e.k, e.d_out,
                                             cfg.seeds["init"])),
        ("random", lambda: encoder.init_random(m, e.n_init, e.k, e.d_out,
                                               cfg.seeds["init"])),
    ]
    if cfg.baseline_mlp:
        arms.append(("mlp", lambda: encoder.mlp_init(m, cfg.seeds["init"], d_out=e.d_out)))

    lines = ["arm,phase,K,K_frac,trustworthiness,continuity"]
    for name, build in arms:
        model = build()
        for phase in ("untrained", "trained"):
            if phase == "trained":
                report = train(model, cs, cfg.train_config(), mining)
                fileio.write_text(os.path.join(out_dir, f"loss_{name}.csv"),
                                  fileio.loss_csv(report.epoch_losses))
            metrics = evalmetrics.evaluate(model, cs, eval_idx, cfg.k_grid)
            for k, frac, tw, ct in metrics.rows:
                lines.append(f"{name},{phase},{k},{float(frac)!r},{float(tw)!r},{float(ct)!r}")
            k, frac, tw, ct = metrics.rows[0]
            print(f"compare[{name}] {phase}: TW@{frac:g}={tw:.4f} CT@{frac:g}={ct:.4f}")
        fileio.write_model(os.path.join(out_dir, f"model_{name}.bin"), model)
        chart, _ = encoder.chart_batch(model, cs.channels)
        fileio.write_text(os.path.join(out_dir, f"chart_{name}.csv"),
                          fileio.chart_csv(chart, np.asarray(cs.positions)))
        fileio.write_text(os.path.join(out_dir, f"chart_{name}.svg"),
                          fileio.chart_svg(chart))
    fileio.write_text(os.path.join(out_dir, "metrics.csv"), "\n".join(lines) + "\n")
    print(f"compare: wrote {os.path.join(out_dir, 'metrics.csv')}")
    return 0


def cmd_show_config(cfg: ExperimentConfig, out_path: str | None) -> int:
    text = json.dumps(cfg.to_dict(), indent=2) + "\n"
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        fileio.write_text(out_path, text)
        print(f"show-config: wrote {out_path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", metavar="PATH", help="experiment config JSON file")
    group.add_argument("--preset", metavar="NAME", dest="preset_name",
                       help="built-in experiment: default, desk, or tiny")
    common.add_argument("--seed-override", type=int, metavar="R", default=None,
                        help="re-derive all stage seeds from root seed R")

    parser = argparse.ArgumentParser(
        prog="chanchart",
        description="Unsupervised channel charting pipeline on synthetic MIMO channels.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("generate", parents=[common], help="synthesize a channel dataset")
    p.add_argument("--out", required=True, metavar="DATA", help="dataset file to write")

    p = sub.add_parser("init", parents=[common], help="initialize an encoder model")
    p.add_argument("--data", required=True, metavar="DATA", help="dataset file")
    p.add_argument("--out", required=True, metavar="MODEL", help="model file to write")

    p = sub.add_parser("train", parents=[common], help="train a model on mined triplets")
    p.add_argument("--data", required=True, metavar="DATA", help="dataset file")
    p.add_argument("--model-in", required=True, metavar="MODEL", help="initial model file")
    p.add_argument("--out", required=True, metavar="MODEL", help="trained model file to write")
    p.add_argument("--loss-csv", default=None, metavar="CSV",
                   help="optional per-epoch mean loss CSV")

    p = sub.add_parser("eval", parents=[common],
                       help="score a model on the held-out split")
    p.add_argument("--data", required=True, metavar="DATA", help="dataset file")
    p.add_argument("--model", required=True, metavar="MODEL", help="model file")
    p.add_argument("--out", required=True, metavar="CSV", help="metrics CSV to write")

    p = sub.add_parser("chart", parents=[common],
                       help="export chart coordinates as CSV and SVG")
    p.add_argument("--data", required=True, metavar="DATA", help="dataset file")
    p.add_argument("--model", required=True, metavar="MODEL", help="model file")
    p.add_argument("--out", required=True, metavar="BASE",
                   help="output base path; writes BASE.csv and BASE.svg")

    p = sub.add_parser("compare", parents=[common],
                       help="run smart/random/mlp arms end-to-end on shared data")
    p.add_argument("--out", required=True, metavar="DIR", help="output directory")

    p = sub.add_parser("show-config", parents=[common],
                       help="print or write the resolved config JSON")
    p.add_argument("--out", default=None, metavar="PATH",
                   help="write here instead of stdout ('-' for stdout)")

    return parser


def _resolve_config(args) -> ExperimentConfig:
    if args.preset_name is not None:
        cfg = preset(args.preset_name)
    else:
        cfg = ExperimentConfig.from_file(args.config)
    if args.seed_override is not None:
        cfg = cfg.with_seed_root(args.seed_override)
    return cfg


def _dispatch(args) -> int:
    cfg = _resolve_config(args)
    if args.verb == "generate":
        return cmd_generate(cfg, args.out)
    if args.verb == "init":
        return cmd_init(cfg, args.data, args.out)
    if args.verb == "train":
        return cmd_train(cfg, args.data, args.model_in, args.out, args.loss_csv)
    if args.verb == "eval":
        return cmd_eval(cfg, args.data, args.model, args.out)
    if args.verb == "chart":
        return cmd_chart(cfg, args.data, args.model, args.out)
    if args.verb == "compare":
        return cmd_compare(cfg, args.out)
    if args.verb == "show-config":
        return cmd_show_config(cfg, args.out)
    raise AssertionError(f"unhandled verb {args.verb}")


def _fail(category: str, detail: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": category, "detail": detail}) + "\n")
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)
    except fileio.FileFormatError as exc:
        return _fail("format", str(exc), EXIT_IO)
    except DimensionError as exc:
        return _fail("dimension", str(exc), EXIT_DIMENSION)
    except OSError as exc:
        return _fail("io", str(exc), EXIT_IO)
    except ValueError as exc:
        return _fail("config", str(exc), EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
