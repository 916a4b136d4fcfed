"""File formats: chart samples, mask bundles, series files, score reports.

All writers are byte-deterministic: JSON with sorted keys, compact
separators, and floats fixed at 4 decimal places; images as 8-bit RGB PNG.
All writes are atomic (temp file + rename).  Paths inside documents are
relative to the document's directory.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from .core import (
    AxisCalibration,
    Box,
    ChartSample,
    LineMask,
    PointSeries,
    RasterImage,
    RleMask,
    rle_decode,
    rle_encode,
)
from .errors import FormatError

__all__ = [
    "write_chart_sample",
    "read_chart_sample",
    "write_mask_bundle",
    "read_mask_bundle",
    "write_series_file",
    "read_series_file",
    "write_json_doc",
    "read_json_doc",
    "write_png",
    "read_png",
]


def _round_floats(value):
    if isinstance(value, float):
        return round(value, 4)
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_doc(path: Path, doc: dict) -> None:
    text = json.dumps(_round_floats(doc), sort_keys=True, separators=(",", ":"))
    _atomic_write_bytes(Path(path), text.encode("utf-8") + b"\n")


def read_json_doc(path: Path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError("/", f"invalid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise FormatError("/", "document root must be an object")
    return doc


def write_png(path: Path, img: RasterImage) -> None:
    buf = Image.fromarray(np.asarray(img.pixels), mode="RGB")
    import io

    out = io.BytesIO()
    buf.save(out, format="PNG")
    _atomic_write_bytes(Path(path), out.getvalue())


def read_png(path: Path) -> RasterImage:
    with Image.open(path) as im:
        rgb = im.convert("RGB")
        px = np.asarray(rgb, dtype=np.uint8)
    return RasterImage(px.shape[1], px.shape[0], px)


def _check_keys(obj: dict, required: set, optional: set, path: str, strict: bool):
    missing = required - obj.keys()
    if missing:
        raise FormatError(f"{path}/{sorted(missing)[0]}", "required field missing")
    if strict:
        unknown = obj.keys() - required - optional
        if unknown:
            raise FormatError(f"{path}/{sorted(unknown)[0]}", "unknown field")


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise FormatError(path, message)


def _series_to_json(series: list[PointSeries]):
    return [[[float(x), float(y)] for x, y in s] for s in series]


def _series_from_json(raw, path: str) -> list[PointSeries]:
    _require(isinstance(raw, list), path, "must be a list of series")
    out = []
    for i, pts in enumerate(raw):
        _require(isinstance(pts, list) and len(pts) >= 2, f"{path}/{i}",
                 "series must list >= 2 points")
        for j, p in enumerate(pts):
            _require(
                isinstance(p, list) and len(p) == 2
                and all(isinstance(v, (int, float)) for v in p),
                f"{path}/{i}/{j}", "point must be [x, y]",
            )
        try:
            out.append(PointSeries(pts))
        except Exception as e:
            raise FormatError(f"{path}/{i}", str(e)) from e
    return out


# -- chart samples ----------------------------------------------------------

def write_chart_sample(sample: ChartSample, out_dir: Path, name: str) -> Path:
    """Write {name}.png + {name}.json; returns the annotation path."""
    out_dir = Path(out_dir)
    write_png(out_dir / f"{name}.png", sample.image)
    doc = {
        "image": f"{name}.png",
        "width": sample.image.width,
        "height": sample.image.height,
        "plot_area": {
            "x0": sample.plot_area.x0,
            "y0": sample.plot_area.y0,
            "x1": sample.plot_area.x1,
            "y1": sample.plot_area.y1,
        },
        "series": _series_to_json(sample.gt_series),
        "metadata": dict(sample.metadata),
    }
    if sample.axis_calibration is not None:
        cal = sample.axis_calibration
        doc["axis_calibration"] = {
            "x_refs": [[float(p), float(d)] for p, d in cal.x_refs],
            "y_refs": [[float(p), float(d)] for p, d in cal.y_refs],
        }
    path = out_dir / f"{name}.json"
    write_json_doc(path, doc)
    return path


def read_chart_sample(path: Path, strict: bool = True, load_image: bool = True) -> ChartSample:
    path = Path(path)
    doc = read_json_doc(path)
    _check_keys(
        doc,
        required={"image", "width", "height", "plot_area", "series", "metadata"},
        optional={"axis_calibration"},
        path="",
        strict=strict,
    )
    _require(isinstance(doc["width"], int) and doc["width"] >= 1, "/width", "must be int >= 1")
    _require(isinstance(doc["height"], int) and doc["height"] >= 1, "/height", "must be int >= 1")
    pa = doc["plot_area"]
    _require(isinstance(pa, dict), "/plot_area", "must be an object")
    _check_keys(pa, {"x0", "y0", "x1", "y1"}, set(), "/plot_area", strict)
    try:
        box = Box(pa["x0"], pa["y0"], pa["x1"], pa["y1"])
    except Exception as e:
        raise FormatError("/plot_area", str(e)) from e
    series = _series_from_json(doc["series"], "/series")
    meta = doc["metadata"]
    _require(
        isinstance(meta, dict) and all(
            isinstance(k, str) and isinstance(v, str) for k, v in meta.items()
        ),
        "/metadata", "must map strings to strings",
    )
    cal = None
    if "axis_calibration" in doc:
        raw = doc["axis_calibration"]
        _check_keys(raw, {"x_refs", "y_refs"}, set(), "/axis_calibration", strict)
        try:
            cal = AxisCalibration(
                x_refs=tuple((float(p), float(d)) for p, d in raw["x_refs"]),
                y_refs=tuple((float(p), float(d)) for p, d in raw["y_refs"]),
            )
        except Exception as e:
            raise FormatError("/axis_calibration", str(e)) from e
    if load_image:
        image = read_png(path.parent / doc["image"])
        _require(
            (image.width, image.height) == (doc["width"], doc["height"]),
            "/image", "referenced image size does not match width/height",
        )
    else:
        image = RasterImage.blank(doc["width"], doc["height"])
    try:
        return ChartSample(image, series, box, cal, dict(meta))
    except Exception as e:
        raise FormatError("/series", str(e)) from e


# -- mask bundles -----------------------------------------------------------

def write_mask_bundle(masks: list[LineMask], image_ref: str, path: Path,
                      width: int | None = None, height: int | None = None) -> None:
    """Single JSON document carrying all masks for one image, RLE-encoded,
    ordered by descending confidence."""
    if masks:
        width, height = masks[0].width, masks[0].height
    elif width is None or height is None:
        raise FormatError("/masks", "empty bundle needs explicit width/height")
    ordered = sorted(
        range(len(masks)), key=lambda i: (-masks[i].confidence, i)
    )
    doc = {
        "image": image_ref,
        "width": width,
        "height": height,
        "masks": [
            {
                "confidence": masks[i].confidence,
                "rle": list(rle_encode(masks[i]).runs),
            }
            for i in ordered
        ],
    }
    write_json_doc(Path(path), doc)


def read_mask_bundle(path: Path, strict: bool = True) -> tuple[list[LineMask], str]:
    doc = read_json_doc(Path(path))
    _check_keys(doc, {"image", "width", "height", "masks"}, set(), "", strict)
    width, height = doc["width"], doc["height"]
    _require(isinstance(width, int) and width >= 1, "/width", "must be int >= 1")
    _require(isinstance(height, int) and height >= 1, "/height", "must be int >= 1")
    _require(isinstance(doc["masks"], list), "/masks", "must be a list")
    masks: list[LineMask] = []
    for i, entry in enumerate(doc["masks"]):
        mpath = f"/masks/{i}"
        _require(isinstance(entry, dict), mpath, "must be an object")
        _check_keys(entry, {"confidence", "rle"}, set(), mpath, strict)
        conf = entry["confidence"]
        _require(
            isinstance(conf, (int, float)) and 0.0 <= conf <= 1.0,
            f"{mpath}/confidence", "must be a number in [0, 1]",
        )
        runs = entry["rle"]
        _require(
            isinstance(runs, list) and all(isinstance(r, int) and r >= 0 for r in runs),
            f"{mpath}/rle", "must be a list of non-negative integers",
        )
        try:
            rle = RleMask(width, height, tuple(runs))
        except FormatError as e:
            raise FormatError(f"{mpath}/rle", str(e)) from e
        masks.append(rle_decode(rle, confidence=float(conf)))
    return masks, doc["image"]


# -- series files (extraction output) ---------------------------------------

def write_series_file(series: list[PointSeries], path: Path, width: int,
                      height: int, image_ref: str | None = None) -> None:
    doc = {
        "image": image_ref,
        "width": width,
        "height": height,
        "series": _series_to_json(series),
    }
    write_json_doc(Path(path), doc)


def read_series_file(path: Path, strict: bool = True):
    """Returns (series, width, height).  Also accepts annotation documents
    (their extra fields are ignored in lenient mode)."""
    doc = read_json_doc(Path(path))
    _check_keys(doc, {"width", "height", "series"}, {"image"}, "", strict)
    series = _series_from_json(doc["series"], "/series")
    return series, doc["width"], doc["height"]
