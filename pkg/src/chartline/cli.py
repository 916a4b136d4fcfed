"""Batch command-line driver for the full pipeline.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  A JSON config
file (via --config or the CHARTLINE_CONFIG env var) can preset any flag;
explicit flags win.  All randomness flows from --seed.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import evaluate, exchange, synthgen
from .core import LineMask
from .errors import ChartlineError, RejectedMaskError
from .extract import ExtractionConfig, extract_series, suppress_duplicates
from .rasterize import render_line_mask
from .segment import DEFAULT_COLOR_TOL, segment_by_color
from .synthgen import PALETTE


def _load_config(ctx, param, value):
    if value is None:
        return None
    try:
        with open(value, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise click.UsageError(f"cannot read config file {value}: {e}")
    if not isinstance(cfg, dict):
        raise click.UsageError("config file must hold a JSON object")
    ctx.default_map = cfg
    return value


@click.group()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    envvar="CHARTLINE_CONFIG",
    callback=_load_config,
    expose_value=False,
    is_eager=True,
    help="JSON file presetting per-subcommand flag defaults.",
)
def main():
    """Line-chart corpus generation, segmentation, extraction and scoring."""


def _run_many(fn, items, jobs: int, keep_going: bool):
    """Apply fn to items, collecting (item, error) failures."""
    failures = []
    if jobs <= 1:
        for item in items:
            try:
                fn(item)
            except ChartlineError as e:
                failures.append((item, e))
                if not keep_going:
                    break
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(fn, item): item for item in items}
            for fut, item in futures.items():
                try:
                    fut.result()
                except ChartlineError as e:
                    failures.append((item, e))
    return failures


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, required=True)
@click.option(
    "--profile",
    type=click.Choice(synthgen.PROFILES),
    default="mixed",
    show_default=True,
)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def generate(seed, count, profile, out, jobs):
    """Write COUNT synthetic chart samples and annotations into OUT."""
    if count < 1:
        raise click.UsageError("--count must be >= 1")
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)

    def one(i: int):
        child = int(np.random.SeedSequence([seed, i]).generate_state(1)[0])
        sample = synthgen.generate_sample(child, profile)
        sample.metadata["profile"] = profile
        exchange.write_chart_sample(sample, out_dir, f"sample_{i:05d}")

    failures = _run_many(one, range(count), jobs, keep_going=False)
    if failures:
        raise click.ClickException(f"generation failed: {failures[0][1]}")
    click.echo(f"wrote {count} samples to {out_dir}")


@main.command("render-masks")
@click.option("--annotations", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--thickness", type=int, default=3, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def render_masks(annotations, thickness, out, jobs):
    """Render ground-truth mask bundles from annotated point series."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = sorted(p for p in Path(annotations).glob("*.json") if not p.name.endswith(".masks.json"))
    if not paths:
        raise click.UsageError(f"no annotation files in {annotations}")

    def one(path: Path):
        sample = exchange.read_chart_sample(path, load_image=False)
        masks = [
            render_line_mask(s, sample.image.width, sample.image.height, thickness)
            for s in sample.gt_series
        ]
        exchange.write_mask_bundle(
            masks, path.with_suffix(".png").name, out_dir / f"{path.stem}.masks.json",
            width=sample.image.width, height=sample.image.height,
        )

    failures = _run_many(one, paths, jobs, keep_going=False)
    if failures:
        raise click.ClickException(f"{failures[0][0]}: {failures[0][1]}")
    click.echo(f"wrote {len(paths)} mask bundles to {out_dir}")


@main.command()
@click.option("--images", type=click.Path(exists=True, file_okay=False), required=True,
              help="Directory of samples (PNG + annotation JSON for the plot area).")
@click.option("--method", type=click.Choice(["baseline"]), default="baseline",
              show_default=True)
@click.option("--tol", type=int, default=DEFAULT_COLOR_TOL, show_default=True,
              help="Per-channel Chebyshev color distance.")
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def segment(images, method, tol, out, jobs):
    """Predict line masks with the classical color-clustering baseline."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = sorted(p for p in Path(images).glob("*.json") if not p.name.endswith(".masks.json"))
    if not paths:
        raise click.UsageError(f"no annotated samples in {images}")

    def one(path: Path):
        sample = exchange.read_chart_sample(path)
        masks = segment_by_color(sample.image, sample.plot_area, tol)
        exchange.write_mask_bundle(
            masks, path.with_suffix(".png").name, out_dir / f"{path.stem}.masks.json",
            width=sample.image.width, height=sample.image.height,
        )

    failures = _run_many(one, paths, jobs, keep_going=False)
    if failures:
        raise click.ClickException(f"{failures[0][0]}: {failures[0][1]}")
    click.echo(f"wrote {len(paths)} predicted bundles to {out_dir}")


@main.command()
@click.option("--masks", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--delta-x", type=int, default=1, show_default=True)
@click.option("--min-pixels", type=int, default=10, show_default=True)
@click.option("--iou-threshold", type=float, default=0.75, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=1, show_default=True)
def extract(masks, delta_x, min_pixels, iou_threshold, out, jobs):
    """Convert mask bundles into ordered data-series files."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = ExtractionConfig(
        delta_x=delta_x,
        min_mask_pixels=min_pixels,
        iou_suppression_threshold=iou_threshold,
    )
    paths = sorted(Path(masks).glob("*.masks.json"))
    if not paths:
        raise click.UsageError(f"no mask bundles in {masks}")

    def one(path: Path):
        bundle, image_ref = exchange.read_mask_bundle(path)
        if bundle:
            bundle = suppress_duplicates(bundle, cfg)
        series = []
        for m in bundle:
            try:
                series.append(extract_series(m, cfg))
            except RejectedMaskError:
                continue
        if not series:
            click.echo(f"warning: {path.name}: no extractable masks", err=True)
        stem = path.name[: -len(".masks.json")]
        width = bundle[0].width if bundle else 1
        height = bundle[0].height if bundle else 1
        exchange.write_series_file(
            series, out_dir / f"{stem}.series.json", width, height, image_ref
        )

    failures = _run_many(one, paths, jobs, keep_going=False)
    if failures:
        raise click.ClickException(f"{failures[0][0]}: {failures[0][1]}")
    click.echo(f"wrote {len(paths)} series files to {out_dir}")


def _find_pred_file(pred_dir: Path, stem: str) -> Path | None:
    for candidate in (pred_dir / f"{stem}.series.json", pred_dir / f"{stem}.json"):
        if candidate.exists():
            return candidate
    return None


@main.command()
@click.option("--pred", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--gt", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--mode", type=click.Choice([evaluate.MODE_6A, evaluate.MODE_6B]),
              default=evaluate.MODE_6A, show_default=True)
@click.option("--report", type=click.Path(dir_okay=False), required=True)
@click.option("--keep-going", is_flag=True,
              help="Record per-chart failures in the report instead of aborting.")
@click.option("--jobs", type=int, default=1, show_default=True)
def score(pred, gt, mode, report, keep_going, jobs):
    """Score predicted series files against ground-truth annotations."""
    gt_paths = sorted(p for p in Path(gt).glob("*.json")
                      if not p.name.endswith((".masks.json", ".series.json")))
    if not gt_paths:
        raise click.UsageError(f"no ground-truth annotations in {gt}")
    pred_dir = Path(pred)
    entries: dict[str, dict] = {}

    def one(path: Path):
        sample = exchange.read_chart_sample(path, load_image=False)
        pred_path = _find_pred_file(pred_dir, path.stem)
        if pred_path is None:
            raise ChartlineError(f"no prediction file for {path.stem}")
        preds, _, _ = exchange.read_series_file(pred_path, strict=False)
        result = evaluate.evaluate_chart(preds, sample.gt_series, sample.plot_area, mode)
        entries[path.stem] = {
            "name": path.stem,
            "score": 100.0 * result.score,
            "n_pred": len(preds),
            "n_gt": len(sample.gt_series),
            "pattern": sample.metadata.get("pattern", "unknown"),
            "assignment": [[i, j] for i, j in result.assignment],
            "per_pair_similarity": result.per_pair_similarity,
        }

    failures = _run_many(one, gt_paths, jobs, keep_going)
    for path, err in failures:
        entries[path.stem] = {"name": path.stem, "error": str(err)}
    scored = [e for e in entries.values() if "error" not in e]
    agg = evaluate.aggregate_scores([e["score"] / 100.0 for e in scored])
    per_pattern = {}
    for e in scored:
        per_pattern.setdefault(e["pattern"], []).append(e["score"] / 100.0)
    doc = {
        "mode": mode,
        "aggregate": agg,
        "per_pattern": {
            k: evaluate.aggregate_scores(v) for k, v in sorted(per_pattern.items())
        },
        "per_chart": [entries[k] for k in sorted(entries)],
    }
    exchange.write_json_doc(Path(report), doc)
    if agg["count"]:
        click.echo(
            f"task-{mode}: mean {agg['mean']:.2f}  median {agg['median']:.2f}  "
            f"({agg['count']} charts, {len(failures)} failed)"
        )
    else:
        click.echo(f"task-{mode}: no charts scored ({len(failures)} failed)")
    if failures and not keep_going:
        raise click.ClickException(f"{failures[0][0]}: {failures[0][1]}")


@main.command()
@click.option("--image", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--masks", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def overlay(image, masks, out):
    """Write IMAGE with each mask tinted a distinct hue at 50% alpha."""
    img = exchange.read_png(image)
    bundle, _ = exchange.read_mask_bundle(masks)
    px = np.asarray(img.pixels).astype(np.float64).copy()
    for i, m in enumerate(bundle):
        if (m.width, m.height) != (img.width, img.height):
            raise click.ClickException("mask dimensions do not match the image")
        color = np.array(PALETTE[i % len(PALETTE)], dtype=np.float64)
        px[m.bits] = 0.5 * px[m.bits] + 0.5 * color
    tinted = px.round().astype(np.uint8)
    from .core import RasterImage

    exchange.write_png(out, RasterImage(img.width, img.height, tinted))
    click.echo(f"wrote overlay to {out}")


if __name__ == "__main__":
    sys.exit(main())
