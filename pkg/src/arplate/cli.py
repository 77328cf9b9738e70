"""Command-line interface.

Subcommands: gen-dataset, train, recognize, locate, eval.  Exit codes
are a stable contract: 0 success (including "no plate found"), 1 usage
error, 2 data error (unreadable or malformed inputs), 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import labels
from .acr import GlyphClassifier
from .config import (
    ConfigError,
    augment_params,
    load_config,
    locator_config,
    scene_params,
    train_settings,
)
from .evalkit import evaluate
from .locator import (
    PlateLocator,
    crop,
    draw_box_outlines,
    locate_with_stages,
    stage_images,
)
from .nn import AcrwError
from .raster import PnmError, read_pnm, to_gray, write_pnm
from .reader import PlateReader
from .segmenter import segment_plate
from .synth import (
    AtlasError,
    default_atlas,
    gen_char_dataset,
    gen_scene_dataset,
    load_atlas,
    load_char_dataset,
    read_truth,
)

DATA_ERRORS = (FileNotFoundError, NotADirectoryError, IsADirectoryError,
               PnmError, AcrwError, AtlasError, ConfigError, ValueError)

STAGE_ORDER = ("gray", "edges", "binary", "dilated", "median", "filled", "eroded")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="arplate",
                     description="Arabic license plate localization and recognition")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset", help="generate a synthetic corpus")
    p.add_argument("--kind", choices=("chars", "scenes"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-class", type=int, default=None)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--atlas", default=None)
    p.set_defaults(func=_cmd_gen_dataset)

    p = sub.add_parser("train", help="train the character classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--preset", choices=("desk", "paper-replica"), default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("recognize", help="read plates in an image")
    p.add_argument("--image", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--inspect", default=None,
                   help="dump the top plate crop and numbered character crops here")
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_recognize)

    p = sub.add_parser("locate", help="run the locator and dump its stages")
    p.add_argument("--image", required=True)
    p.add_argument("--inspect", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_locate)

    p = sub.add_parser("eval", help="evaluate on a scene directory")
    p.add_argument("--scenes", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--config", default=None)
    p.set_defaults(func=_cmd_eval)
    return parser


def _load_cfg(path):
    return load_config(path) if path else {}


def _atlas(args, cfg):
    path = getattr(args, "atlas", None) or cfg.get("paths.atlas")
    return load_atlas(path) if path else default_atlas()


def _cmd_gen_dataset(args) -> int:
    cfg = _load_cfg(args.config)
    atlas = _atlas(args, cfg)
    out = Path(args.out)
    if args.kind == "chars":
        per_class = args.per_class or cfg.get("synth.per_class", 100)
        params = augment_params(cfg, seed=args.seed)
        manifest = gen_char_dataset(atlas, per_class, params, out)
        print(f"wrote {len(manifest)} glyph images + labels.tsv to {out}")
    else:
        count = args.count or cfg.get("synth.count", 200)
        names = gen_scene_dataset(atlas, count, out, seed=args.seed,
                                  scene_params=scene_params(cfg))
        print(f"wrote {len(names)} scenes (+ truth JSONs) to {out}")
    return 0


def _cmd_train(args) -> int:
    cfg = _load_cfg(args.config)
    settings = train_settings(cfg)
    if args.preset:
        settings["preset"] = args.preset
    if args.epochs is not None:
        settings["epochs"] = args.epochs
    if args.seed is not None:
        settings["seed"] = args.seed
    settings.setdefault("preset", "desk")
    X, y = load_char_dataset(args.data)
    clf = GlyphClassifier(**settings)
    clf.fit(X, y)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    clf.save(out)
    from .acr import write_metrics
    write_metrics(clf.metrics_, out.parent / "metrics.tsv")
    last = clf.metrics_[-1]
    print(f"trained {settings['preset']} preset for {last.epoch} epochs: "
          f"train_acc={last.train_acc:.4f} val_acc={last.val_acc:.4f}")
    print(f"wrote {out} and {out.parent / 'metrics.tsv'}")
    return 0


def _reader(args, cfg) -> PlateReader:
    clf = GlyphClassifier.load(args.weights)
    loc = PlateLocator(**locator_config(cfg).__dict__)
    return PlateReader(locator=loc, classifier=clf)


def _reading_json(reading) -> dict:
    chars = []
    for ch, conf in zip(reading.digits + reading.letters, reading.confidences):
        chars.append({
            "char": ch,
            "latin": labels.id_to_latin(labels.char_to_id(ch)),
            "confidence": round(conf, 6),
        })
    return {
        "bbox": list(reading.bbox) if reading.bbox else None,
        "digits": reading.digits,
        "letters": reading.letters,
        "latin": reading.latin,
        "confidence": round(reading.confidence, 6),
        "chars": chars,
    }


def _dump_char_crops(image, reading, out_dir: Path) -> None:
    """Write the winning plate crop plus its numbered character crops."""
    out_dir.mkdir(parents=True, exist_ok=True)
    arr = np.asarray(image)
    gray = to_gray(arr) if arr.ndim == 3 else arr
    plate = crop(gray, reading.bbox)
    write_pnm(plate, out_dir / "plate.pgm")
    boxes, glyphs = segment_plate(plate)
    for box, glyph in zip(boxes, glyphs):
        rendered = np.floor(glyph * 255.0 + 0.5).astype(np.uint8)
        write_pnm(rendered, out_dir / f"char_{box.order_index + 1:02d}.pgm")


def _cmd_recognize(args) -> int:
    cfg = _load_cfg(args.config)
    reader = _reader(args, cfg)
    image = read_pnm(args.image)
    readings = reader.read(image)
    if args.inspect and readings:
        _dump_char_crops(image, readings[0], Path(args.inspect))
    if args.json:
        payload = {"image": str(args.image),
                   "plates": [_reading_json(r) for r in readings]}
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
    elif not readings:
        print("no plate found")
    else:
        for i, r in enumerate(readings, 1):
            print(f"plate {i}: {r.latin}  digits={r.digits} letters={r.letters} "
                  f"bbox={r.bbox} confidence={r.confidence:.3f}")
    return 0


def _cmd_locate(args) -> int:
    cfg = _load_cfg(args.config)
    image = read_pnm(args.image)
    candidates, stages = locate_with_stages(image, locator_config(cfg))
    out = Path(args.inspect)
    out.mkdir(parents=True, exist_ok=True)
    rendered = stage_images(stages)
    for i, name in enumerate(STAGE_ORDER, 1):
        write_pnm(rendered[name], out / f"stage_{i:02d}_{name}.pgm")
    overlay = draw_box_outlines(rendered["lines"], [c.bbox for c in candidates])
    write_pnm(overlay, out / "stage_08_candidates.pgm")
    payload = {
        "image": str(args.image),
        "candidates": [
            {"bbox": list(c.bbox), "score": round(c.score, 6),
             "fill_ratio": round(c.fill_ratio, 6),
             "aspect_error": round(c.aspect_error, 6)}
            for c in candidates
        ],
    }
    (out / "candidates.json").write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote 8 stage dumps + candidates.json to {out}")
    return 0


def _scene_pairs(scene_dir: Path):
    images = sorted(scene_dir.glob("*.ppm"))
    if not images:
        raise FileNotFoundError(f"no .ppm scenes in {scene_dir}")
    pairs = []
    for img_path in images:
        truth_path = img_path.with_suffix(".json")
        if not truth_path.exists():
            raise FileNotFoundError(f"missing truth file {truth_path}")
        pairs.append((read_pnm(img_path), read_truth(truth_path)))
    return pairs


def _cmd_eval(args) -> int:
    cfg = _load_cfg(args.config)
    reader = _reader(args, cfg)
    pairs = _scene_pairs(Path(args.scenes))
    report = evaluate(pairs, reader)
    Path(args.report).write_text(
        json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True) + "\n",
        encoding="utf-8")
    print(report.format_table())
    print()
    print("model            recognition rate")
    print(f"this work        {report.recognition_rate * 100:.1f}%")
    print(f"report written to {args.report}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports and exits
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
