"""Command line interface for the recognition toolkit.

Subcommands cover the experiment stages (``preprocess``, ``featurize``,
``train``, ``evaluate``), one-off classification (``classify``), the
HTTP service (``serve``) and a quick recording viewer (``view``).
Relative data paths resolve against ``SYMREC_ROOT`` when set, otherwise
against the config file's directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .dataset import load_corpus, save_labels_csv, save_recordings_jsonl, split_dataset
from .errors import SymrecError
from .evaluate import default_equivalences, mer_error, topn_error
from .features import apply_standardization, compose, fit_standardization
from .pipeline import (
    load_bundle,
    parse_config,
    run_experiment,
    save_feature_cache,
)
from .recording import Recording, bounding_box, parse_recording


def _add_config_arguments(parser):
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "--reference-mode",
        action="store_true",
        default=True,
        help="deterministic single-threaded execution (always on; kept as an "
        "explicit switch for replication scripts)",
    )


def _cmd_preprocess(args) -> int:
    config = parse_config(args.config)
    corpus = load_corpus(
        config.resolve_path(config.raw_data), config.resolve_path(config.raw_labels)
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    processed = [config.queue.apply(rec) for rec in corpus.recordings]
    save_recordings_jsonl(processed, out_dir / "preprocessed.jsonl")
    save_labels_csv({r.id: r.label for r in processed}, out_dir / "preprocessed.labels.csv")
    print(f"wrote {len(processed)} recordings to {out_dir / 'preprocessed.jsonl'}")
    return 0


def _cmd_featurize(args) -> int:
    config = parse_config(args.config)
    seed = args.seed if args.seed is not None else config.train_config.seed
    corpus = load_corpus(
        config.resolve_path(config.raw_data), config.resolve_path(config.raw_labels)
    )
    splits = split_dataset(corpus.recordings, config.fractions, seed=seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    std = None
    for name, part in (("train", splits.train), ("validation", splits.validation),
                       ("test", splits.test)):
        processed = [config.queue.apply(rec) for rec in part]
        if processed:
            x = np.stack([compose(rec, config.feature_specs) for rec in processed])
            y = np.array([corpus.symbols.id_for(r.label) for r in processed])
        else:
            from .features import total_dimension

            x = np.zeros((0, total_dimension(config.feature_specs)))
            y = np.zeros(0, dtype=int)
        if name == "train":
            std = fit_standardization(x, mode=config.standardization_mode)
        if x.shape[0]:
            x = apply_standardization(std, x)
        save_feature_cache(out_dir / f"{name}.npz", x, y, config.feature_specs,
                           corpus.symbols)
        print(f"{name}: {x.shape[0]} vectors of dimension {x.shape[1]}")
    with open(out_dir / "standardization.json", "w") as fh:
        json.dump(std.to_dict(), fh)
    return 0


def _cmd_train(args) -> int:
    config = parse_config(args.config)
    result = run_experiment(config, seed=args.seed, out_dir=args.out)
    for measure, value in result.report.items():
        print(f"{measure}: {100.0 * value:.2f} %")
    if result.out_dir is not None:
        print(f"artifacts in {result.out_dir}")
    return 0


def _cmd_evaluate(args) -> int:
    bundle = load_bundle(args.model)
    corpus = load_corpus(args.data, args.labels)
    results = []
    for rec in corpus.recordings:
        ranked = bundle.classify(rec, k=10)
        results.append((ranked, corpus.symbols.id_for(rec.label)))
    classes = default_equivalences(corpus.symbols)
    rows = [
        ("top1_error", topn_error(results, 1)),
        ("top3_error", topn_error(results, 3)),
        ("mer_error", mer_error(results, classes)),
    ]
    for measure, value in rows:
        print(f"{measure},{100.0 * value:.2f}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("measure,value\n")
            for measure, value in rows:
                fh.write(f"{measure},{100.0 * value:.2f}\n")
    return 0


def _cmd_classify(args) -> int:
    bundle = load_bundle(args.model)
    raw = Path(args.file).read_text()
    rec = parse_recording(raw)
    ranked = bundle.classify(rec, k=args.k)
    for symbol_id, probability in ranked:
        command = (
            bundle.symbols.command_for(symbol_id)
            if bundle.symbols is not None and symbol_id in bundle.symbols
            else "?"
        )
        print(f"{probability:10.6f}  {symbol_id:6d}  {command}")
    return 0


def _cmd_synth(args) -> int:
    from .synth import make_dataset

    recordings, labels = make_dataset(per_class=args.per_class, seed=args.seed or 0)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_recordings_jsonl(recordings, out_dir / "raw.jsonl")
    save_labels_csv(
        {i + 1: label for i, label in enumerate(labels)},
        out_dir / "raw.labels.csv",
    )
    print(f"wrote {len(recordings)} synthetic recordings to {out_dir / 'raw.jsonl'}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        bundle_path=args.model,
        static_dir=args.static,
        cors_origins=args.cors_origin or None,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _render_text_grid(rec: Recording, size: int = 24) -> str:
    from .features import Bitmap

    cells = Bitmap(n=size).compute(rec).reshape(size, size)
    return "\n".join("".join("#" if v > 0 else "." for v in row) for row in cells)


def _cmd_view(args) -> int:
    with open(args.data) as fh:
        lines = fh.readlines()
    if not 1 <= args.id <= len(lines):
        print(f"recording id {args.id} out of range (1..{len(lines)})", file=sys.stderr)
        return 1
    rec = parse_recording(lines[args.id - 1], id=args.id)
    print(f"recording {args.id}: {len(rec.strokes)} strokes, "
          f"{rec.point_count()} points, bounding box {bounding_box(rec)}")
    if args.png:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(4, 4))
        for stroke in rec.strokes:
            ax.plot(stroke.xy[:, 0], stroke.xy[:, 1], marker=".")
        ax.invert_yaxis()  # canvas origin is top-left
        ax.set_aspect("equal")
        fig.savefig(args.png, dpi=120)
        print(f"wrote {args.png}")
    else:
        print(_render_text_grid(rec))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symrec",
        description="on-line handwritten math symbol recognition toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="apply the config's queue to the raw corpus")
    _add_config_arguments(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("featurize", help="split, preprocess and cache feature matrices")
    _add_config_arguments(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("train", help="run the full experiment and persist artifacts")
    _add_config_arguments(p)
    p.add_argument("--out", default=None, help="artifact output directory")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a bundle on a labeled corpus")
    p.add_argument("--model", required=True, help="classifier bundle file")
    p.add_argument("--data", required=True, help="recordings JSONL")
    p.add_argument("--labels", required=True, help="label CSV")
    p.add_argument("--out", default=None, help="report CSV path")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("classify", help="classify one recording file")
    p.add_argument("file", help="recording JSON file")
    p.add_argument("--model", required=True, help="classifier bundle file")
    p.add_argument("-k", type=int, default=10)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("synth", help="generate a synthetic 5-symbol demo corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--per-class", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("serve", help="start the HTTP classification service")
    p.add_argument("--model", required=True, help="classifier bundle file")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None, help="frontend bundle directory")
    p.add_argument(
        "--cors-origin",
        action="append",
        default=None,
        help="allowed CORS origin (repeatable; default: any)",
    )
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("view", help="print a recording as a text grid (or PNG)")
    p.add_argument("id", type=int, help="1-based recording id in the JSONL file")
    p.add_argument("--data", required=True, help="recordings JSONL")
    p.add_argument("--png", default=None, help="write a PNG instead")
    p.set_defaults(func=_cmd_view)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SymrecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
