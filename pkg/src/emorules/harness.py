"""Corpus evaluation, suite export and intermediate-plane export.

Report JSON layout (``evaluate``)::

    method, total, classified, failed, correct, overall_accuracy,
    per_emotion: {label: {items, failed, correct, accuracy}},
    confusion: {labels, matrix}      # rows = true label, columns = predicted
    fallback_count, skipped, unclassifiable: [path, ...],
    records: [{path, emotion, label, method, fallback_used, scores, features,
               error, stage, seconds}],
    timing: {median_seconds, mean_seconds, total_seconds},
    config: {...}

``total`` counts every labeled item, extraction failures included, so
``overall_accuracy == 100 * trace(confusion) / total``. Confusion rows only
hold classified items; failures are listed per emotion under ``failed``.
The ``seconds`` and ``timing`` fields are the only non-deterministic ones.
"""
from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .classify import EMOTIONS, Emotion, accuracy, classify
from .config import Config
from .edges import canny
from .features import FEATURES, ExtractionError, FeatureVector
from .morphology import disk_se, gradient
from .pipeline import extract_features
from .raster import read_image, to_gray, write_png
from .synthcorpus import SuiteItem

MANIFEST_NAME = "manifest.csv"
TIMING_KEYS = ("seconds", "timing")


class ManifestError(ValueError):
    pass


# --- suites ------------------------------------------------------------------

def write_suite(items: list[SuiteItem], out_dir) -> Path:
    """PNG per face plus ``manifest.csv`` with the ground-truth features."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = out / MANIFEST_NAME
    with manifest.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "emotion", *FEATURES])
        for item in items:
            write_png(out / item.name, item.image)
            writer.writerow([item.name, item.emotion.value,
                             *(repr(float(getattr(item.truth, f))) for f in FEATURES)])
    return manifest


def read_manifest(path) -> list[dict]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"path", "emotion"} <= set(reader.fieldnames):
            raise ManifestError(f"{path}: manifest needs 'path' and 'emotion' columns")
        rows = [row for row in reader]
    if not rows:
        raise ManifestError(f"{path}: manifest has no rows")
    for i, row in enumerate(rows, start=2):
        if not row.get("path") or row.get("emotion") is None:
            raise ManifestError(f"{path}:{i}: missing path or emotion")
    return rows


# --- evaluation --------------------------------------------------------------

def _evaluate_one(image_path: Path, label: Emotion, method: str, cfg: Config, rules, weights) -> dict:
    record = {"emotion": label.value, "label": None, "method": method, "fallback_used": False,
              "scores": None, "features": None, "error": None, "stage": None}
    start = time.perf_counter()
    try:
        img = read_image(image_path)
        fv = extract_features(img, cfg)
        decision = classify(fv, method, rules, weights)
    except ExtractionError as exc:
        record.update(error=str(exc), stage=exc.stage)
    except (OSError, ValueError) as exc:
        record.update(error=f"{type(exc).__name__}: {exc}", stage="read_image")
    else:
        d = decision.as_dict()
        record.update(label=d["label"], fallback_used=d["fallback_used"], scores=d["scores"],
                      features=fv.as_dict())
    record["seconds"] = time.perf_counter() - start
    return record


def evaluate_corpus(corpus_dir, manifest=None, method: str = "wmv", cfg: Config | None = None,
                    threads: int = 1) -> dict:
    cfg = cfg or Config()
    corpus = Path(corpus_dir)
    rows = read_manifest(manifest or corpus / MANIFEST_NAME)
    rules, weights = cfg.rule_table(), cfg.weight_matrix()

    jobs, skipped, unclassifiable = [], 0, []
    for row in rows:
        text = row["emotion"].strip()
        if text.lower() == "skip":
            skipped += 1
            continue
        try:
            label = Emotion.parse(text)
        except ValueError:
            unclassifiable.append(row["path"])
            continue
        jobs.append((row["path"], label))

    run = lambda job: _evaluate_one(corpus / job[0], job[1], method, cfg, rules, weights)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    records = [{"path": path, **rec} for (path, _), rec in zip(jobs, results)]
    return build_report(records, method, cfg, skipped, unclassifiable)


def build_report(records: list[dict], method: str, cfg: Config, skipped: int = 0,
                 unclassifiable=()) -> dict:
    index = {e.value: i for i, e in enumerate(EMOTIONS)}
    matrix = np.zeros((len(EMOTIONS), len(EMOTIONS)), dtype=int)
    per = {e.value: {"items": 0, "failed": 0, "correct": 0} for e in EMOTIONS}
    for rec in records:
        stats = per[rec["emotion"]]
        if rec["label"] is None:
            stats["failed"] += 1
            continue
        stats["items"] += 1
        stats["correct"] += rec["label"] == rec["emotion"]
        matrix[index[rec["emotion"]], index[rec["label"]]] += 1
    for stats in per.values():
        n = stats["items"] + stats["failed"]
        stats["accuracy"] = 100.0 * stats["correct"] / n if n else None
    total = len(records)
    seconds = [r["seconds"] for r in records]
    return {
        "method": method,
        "total": total,
        "classified": int(matrix.sum()),
        "failed": total - int(matrix.sum()),
        "correct": int(np.trace(matrix)),
        "overall_accuracy": (accuracy((r["label"], r["emotion"]) for r in records) if total else None),
        "per_emotion": per,
        "confusion": {"labels": [e.value for e in EMOTIONS], "matrix": matrix.tolist()},
        "fallback_count": sum(bool(r["fallback_used"]) for r in records),
        "skipped": skipped,
        "unclassifiable": list(unclassifiable),
        "records": records,
        "timing": {
            "median_seconds": float(np.median(seconds)) if seconds else None,
            "mean_seconds": float(np.mean(seconds)) if seconds else None,
            "total_seconds": float(np.sum(seconds)),
        },
        "config": cfg.to_dict(),
    }


def strip_timing(report: dict) -> dict:
    out = {k: v for k, v in report.items() if k not in TIMING_KEYS}
    out["records"] = [{k: v for k, v in r.items() if k not in TIMING_KEYS} for r in report["records"]]
    return out


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def format_report(report: dict) -> str:
    labels = report["confusion"]["labels"]
    short = [l[:3] for l in labels]
    lines = [f"method: {report['method']}   items: {report['total']}   "
             f"failed: {report['failed']}   fallback: {report['fallback_count']}",
             "",
             "true \\ pred  " + " ".join(f"{s:>5}" for s in short) + "   acc%"]
    for label, row in zip(labels, report["confusion"]["matrix"]):
        acc = report["per_emotion"][label]["accuracy"]
        acc_text = f"{acc:6.1f}" if acc is not None else "     -"
        lines.append(f"{label:<12} " + " ".join(f"{v:>5}" for v in row) + f" {acc_text}")
    overall = report["overall_accuracy"]
    lines.append("")
    lines.append(f"overall accuracy: {overall:.1f}%" if overall is not None else "overall accuracy: -")
    timing = report.get("timing", {})
    if timing.get("median_seconds") is not None:
        lines.append(f"median time per image: {timing['median_seconds'] * 1000:.1f} ms")
    if report["unclassifiable"]:
        lines.append(f"unclassifiable labels: {len(report['unclassifiable'])}")
    for rec in report["records"]:
        if rec["error"]:
            lines.append(f"FAILED {rec['path']}: {rec['error']}")
    return "\n".join(lines)


# --- explain -----------------------------------------------------------------

EXPLAIN_FILES = (
    "eye_map.png", "eyes_overlay.png", "mouth_map.png", "mouth_edges.png", "mouth_rows.csv",
    "brow_gradient.png", "brow_line.png", "corner_map.png", "wrinkle_canny.png",
)


def _normalised(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    top = p.max()
    return p / top if top > 0 else p


def _side_by_side(planes, gap_value=0):
    height = max(p.shape[0] for p in planes)
    padded = []
    for p in planes:
        pad = [(0, height - p.shape[0]), (0, 0)] + [(0, 0)] * (p.ndim - 2)
        padded.append(np.pad(p, pad, constant_values=gap_value))
        padded.append(np.full((height, 2) + p.shape[2:], gap_value, dtype=p.dtype))
    return np.concatenate(padded[:-1], axis=1)


def _mark(img: np.ndarray, row: float, col: float, color, size: int = 4) -> None:
    r, c = int(round(row)), int(round(col))
    h, w = img.shape[:2]
    img[max(r - size, 0):min(r + size + 1, h), min(max(c, 0), w - 1)] = color
    img[min(max(r, 0), h - 1), max(c - size, 0):min(c + size + 1, w)] = color


def _outline(img: np.ndarray, rect, color) -> None:
    img[rect.y0, rect.x0:rect.x1] = color
    img[rect.y1 - 1, rect.x0:rect.x1] = color
    img[rect.y0:rect.y1, rect.x0] = color
    img[rect.y0:rect.y1, rect.x1 - 1] = color


def explain(img: np.ndarray, out_dir, cfg: Config | None = None) -> list[Path]:
    """Write the nine intermediate artifacts for one face; returns their paths."""
    cfg = cfg or Config()
    trace: dict = {}
    extract_features(img, cfg, trace=trace)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / name for name in EXPLAIN_FILES}

    write_png(paths["eye_map.png"], trace["eye_map"])

    overlay = trace["face"].copy()
    regions = trace["regions"]
    for rect in (regions.left_brow, regions.right_brow, regions.wrinkle, regions.lips):
        _outline(overlay, rect, (255, 255, 0))
    for row, col in (trace["eyes"].left, trace["eyes"].right):
        _mark(overlay, row, col, (0, 255, 0))
    write_png(paths["eyes_overlay.png"], overlay)

    mouth = trace["mouth"]
    write_png(paths["mouth_map.png"], mouth["map"])
    write_png(paths["mouth_edges.png"], _normalised(mouth["edges"]))
    peaks = set(mouth["peaks"].positions)
    with paths["mouth_rows.csv"].open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "edge_sum", "smoothed", "peak"])
        for i, (raw, smooth) in enumerate(zip(mouth["rows"], mouth["smoothed"])):
            writer.writerow([i, f"{raw:.6f}", f"{smooth:.6f}", int(i in peaks)])

    grads = [_normalised(gradient(to_gray(brow), disk_se(cfg.brow_gradient_radius)))
             for brow, _, _ in trace["brows"]]
    write_png(paths["brow_gradient.png"], _side_by_side(grads))

    lined = []
    for brow, _, line in trace["brows"]:
        canvas = brow.copy()
        for col, row in enumerate(line):
            if row >= 0:
                canvas[row, col] = (0, 255, 0)
        lined.append(canvas)
    write_png(paths["brow_line.png"], _side_by_side(lined))

    cmap = (np.clip(_normalised(trace["corner_map"]), 0, 1) * 255).astype(np.uint8)
    corners_img = np.repeat(cmap[:, :, None], 3, axis=2)
    for row, col in (trace["corners"].left, trace["corners"].right):
        _mark(corners_img, row, col, (255, 0, 0), size=3)
    write_png(paths["corner_map.png"], corners_img)

    write_png(paths["wrinkle_canny.png"], canny(trace["wrinkle"], cfg.canny))
    return [paths[name] for name in EXPLAIN_FILES]
