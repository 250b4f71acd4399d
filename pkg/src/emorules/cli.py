"""Command-line entry point: classify, explain, evaluate, gen, tables."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classify import METHODS
from .config import Config
from .features import ExtractionError
from .harness import ManifestError, dump_report, evaluate_corpus, explain, format_report, write_suite
from .pipeline import classify_image
from .raster import Rect, read_image
from .synthcorpus import generate_suite

EXIT_USAGE = 1
EXIT_EXTRACTION = 2


def _face_rect(text: str) -> Rect:
    try:
        x0, y0, w, h = (int(v) for v in text.split(","))
        return Rect(x0, y0, w, h)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected x0,y0,w,h, got {text!r} ({exc})") from None


def _load_config(args) -> Config:
    return Config.load(args.config) if args.config else Config()


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def cmd_classify(args) -> int:
    cfg = _load_config(args)
    img = read_image(args.image)
    try:
        fv, decision = classify_image(img, args.method, cfg, args.face_rect)
    except ExtractionError as exc:
        print(json.dumps({"path": str(args.image), "error": str(exc), "stage": exc.stage}))
        return _fail(f"extraction failed at stage {exc.stage}: {exc}", EXIT_EXTRACTION)
    out = {"path": str(args.image), **decision.as_dict(), "features": fv.as_dict()}
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_explain(args) -> int:
    cfg = _load_config(args)
    img = read_image(args.image)
    if args.face_rect is not None:
        from .pipeline import prepare_face
        img = prepare_face(img, args.face_rect)
    try:
        paths = explain(img, args.out, cfg)
    except ExtractionError as exc:
        return _fail(f"extraction failed at stage {exc.stage}: {exc}", EXIT_EXTRACTION)
    for p in paths:
        print(p)
    return 0


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    try:
        report = evaluate_corpus(args.corpus, args.manifest, args.method, cfg, args.threads)
    except (ManifestError, FileNotFoundError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    text = dump_report(report)
    if args.report:
        Path(args.report).write_text(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print(format_report(report))
    return 0


def cmd_gen(args) -> int:
    cfg = _load_config(args)
    items = generate_suite(args.count, args.seed, cfg.rule_table())
    manifest = write_suite(items, args.out)
    print(f"wrote {len(items)} faces and {manifest}")
    return 0


def cmd_tables(args) -> int:
    cfg = _load_config(args)
    print(cfg.rule_table().format())
    print()
    print(cfg.weight_matrix().format())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="emorules", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file overriding default parameters")

    method = argparse.ArgumentParser(add_help=False)
    method.add_argument("--method", choices=METHODS, default="wmv")

    p = sub.add_parser("classify", parents=[common, method], help="classify one face image")
    p.add_argument("image", type=Path)
    p.add_argument("--face-rect", type=_face_rect, help="x0,y0,w,h of the face in the image")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("explain", parents=[common], help="write intermediate planes for one image")
    p.add_argument("image", type=Path)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--face-rect", type=_face_rect)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("evaluate", parents=[common, method], help="score a labeled corpus")
    p.add_argument("corpus", type=Path, help="directory holding the images")
    p.add_argument("--manifest", type=Path, help="CSV with path,emotion (default: CORPUS/manifest.csv)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--report", type=Path, help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic labeled corpus")
    p.add_argument("count", type=int, help="faces per emotion")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("tables", parents=[common], help="print the rule table and weight matrix")
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        return _fail("--threads must be >= 1", EXIT_USAGE)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        return _fail(str(exc), EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
