"""Dataset scanning, class balance, and per-class pixel-value histograms.

The expected layout is ``root/{train,test}/{ClassA,ClassB,...}/*.{jpg,png}``.
Pixel values are grayscale luminance in [0, 255]: images are converted to
RGB and collapsed with the Rec.601 weights (0.299 R + 0.587 G + 0.114 B),
rounded half away from zero. Grayscale sources pass through unchanged
under this rule. The weighting lives in :func:`rgb_to_luma` and nowhere
else.

Corrupt files never abort a scan: they are skipped and reported per file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from PIL import Image, UnidentifiedImageError

__all__ = [
    "DatasetManifest",
    "PixelHistogram",
    "HistogramSummary",
    "IMAGE_SUFFIXES",
    "rgb_to_luma",
    "scan_dataset",
    "class_balance",
    "pixel_histogram",
    "histogram_report",
    "list_images",
    "write_histogram_csv",
]

IMAGE_SUFFIXES = (".jpg", ".jpeg", ".png")


@dataclass(frozen=True)
class DatasetManifest:
    """What a directory scan found: counts per split per class, plus anomalies."""

    root: str
    splits: tuple[str, ...]
    counts: dict[str, dict[str, int]]
    image_sizes: dict[str, int]
    missing_class_dirs: tuple[str, ...] = ()
    unknown_dirs: tuple[str, ...] = ()
    undecodable: tuple[str, ...] = ()

    def split_total(self, split: str) -> int:
        return sum(self.counts.get(split, {}).values())

    @property
    def total(self) -> int:
        return sum(self.split_total(s) for s in self.counts)

    def to_dict(self) -> dict:
        return {
            "root": self.root,
            "splits": list(self.splits),
            "counts": {s: dict(c) for s, c in self.counts.items()},
            "totals": {s: self.split_total(s) for s in self.counts},
            "image_sizes": dict(self.image_sizes),
            "missing_class_dirs": list(self.missing_class_dirs),
            "unknown_dirs": list(self.unknown_dirs),
            "undecodable": list(self.undecodable),
        }


@dataclass(frozen=True)
class PixelHistogram:
    """256-bin luminance frequency table for one class."""

    label: str
    bins: np.ndarray
    images_counted: int
    pixels_counted: int
    skipped: tuple[str, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.bins, dtype=np.int64)
        if arr.shape != (256,):
            raise ValueError(f"need 256 bins, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "bins", arr)

    @property
    def mean_pixel(self) -> float:
        if self.pixels_counted == 0:
            raise ValueError(f"histogram for {self.label!r} is empty")
        return float((self.bins * np.arange(256)).sum() / self.pixels_counted)

    def mass_above(self, threshold: int = 128) -> float:
        """Fraction of pixels with luminance >= threshold."""
        if self.pixels_counted == 0:
            raise ValueError(f"histogram for {self.label!r} is empty")
        return float(self.bins[threshold:].sum() / self.pixels_counted)


@dataclass(frozen=True)
class HistogramSummary:
    """Per-class comparison rows plus where the artifacts were written."""

    rows: tuple[dict, ...]
    csv_path: Path | None = None
    plot_paths: tuple[Path, ...] = ()


def rgb_to_luma(rgb: np.ndarray) -> np.ndarray:
    """Integer Rec.601 luminance of an (..., 3) uint8 array.

    Values are non-negative, so floor(x + 0.5) is rounding half away
    from zero.
    """
    arr = np.asarray(rgb, dtype=np.float64)
    luma = arr[..., 0] * 0.299 + arr[..., 1] * 0.587 + arr[..., 2] * 0.114
    return np.clip(np.floor(luma + 0.5), 0, 255).astype(np.int64)


def list_images(directory: Path) -> list[Path]:
    """Image files directly under ``directory``, sorted by name."""
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )


def scan_dataset(
    root: str | Path,
    expected_classes: Sequence[str],
    splits: Sequence[str] = ("train", "test"),
) -> DatasetManifest:
    """Walk the dataset tree and count decodable images per split per class.

    A missing split or class folder is flagged, not fatal; subfolders
    outside ``expected_classes`` are listed but not counted; files whose
    image header fails to decode are listed in ``undecodable``.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset root does not exist: {root}")
    counts: dict[str, dict[str, int]] = {}
    sizes: dict[str, int] = {}
    missing: list[str] = []
    unknown: list[str] = []
    undecodable: list[str] = []
    for split in splits:
        split_dir = root / split
        counts[split] = {c: 0 for c in expected_classes}
        if not split_dir.is_dir():
            missing.append(split)
            continue
        for sub in sorted(p for p in split_dir.iterdir() if p.is_dir()):
            if sub.name not in expected_classes:
                unknown.append(f"{split}/{sub.name}")
        for cls in expected_classes:
            cls_dir = split_dir / cls
            if not cls_dir.is_dir():
                missing.append(f"{split}/{cls}")
                continue
            for path in list_images(cls_dir):
                try:
                    with Image.open(path) as img:
                        size = f"{img.width}x{img.height}"
                except (UnidentifiedImageError, OSError):
                    undecodable.append(str(path.relative_to(root)))
                    continue
                counts[split][cls] += 1
                sizes[size] = sizes.get(size, 0) + 1
    return DatasetManifest(
        root=str(root),
        splits=tuple(splits),
        counts=counts,
        image_sizes=sizes,
        missing_class_dirs=tuple(missing),
        unknown_dirs=tuple(unknown),
        undecodable=tuple(undecodable),
    )


def class_balance(manifest: DatasetManifest, split: str | None = None) -> dict[str, float]:
    """Per-class fraction of images, over one split or the whole dataset."""
    if split is None:
        totals: dict[str, int] = {}
        for per_class in manifest.counts.values():
            for cls, n in per_class.items():
                totals[cls] = totals.get(cls, 0) + n
    else:
        totals = dict(manifest.counts.get(split, {}))
    grand = sum(totals.values())
    if grand == 0:
        raise ValueError("cannot compute class balance of an empty manifest")
    return {cls: n / grand for cls, n in totals.items()}


def pixel_histogram(paths: Iterable[str | Path], label: str) -> PixelHistogram:
    """Luminance histogram over all decodable images in ``paths``.

    Bin merges are exact integer additions, so chunking or parallel
    decoding cannot change the result.
    """
    bins = np.zeros(256, dtype=np.int64)
    images = 0
    pixels = 0
    skipped: list[str] = []
    for path in paths:
        path = Path(path)
        try:
            with Image.open(path) as img:
                rgb = np.asarray(img.convert("RGB"))
        except (UnidentifiedImageError, OSError) as exc:
            skipped.append(f"{path}: {exc}")
            continue
        luma = rgb_to_luma(rgb)
        bins += np.bincount(luma.ravel(), minlength=256)
        images += 1
        pixels += luma.size
    if images == 0:
        raise ValueError(f"no decodable images for class {label!r}")
    return PixelHistogram(
        label=label,
        bins=bins,
        images_counted=images,
        pixels_counted=pixels,
        skipped=tuple(skipped),
    )


def write_histogram_csv(histograms: Sequence[PixelHistogram], path: str | Path) -> Path:
    """Canonical delimited artifact: one row per (class, bin)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class", "bin", "count"])
        for hist in histograms:
            for value in range(256):
                writer.writerow([hist.label, value, int(hist.bins[value])])
    return path


def histogram_report(
    histograms: Sequence[PixelHistogram],
    out_dir: str | Path | None = None,
    plots: bool = False,
) -> HistogramSummary:
    """Compare class histograms; optionally write the CSV and bar charts.

    Each summary row carries the class mean pixel value and the fraction
    of mass at or above luminance 128.
    """
    if not histograms:
        raise ValueError("need at least one class histogram")
    rows = tuple(
        {
            "class": h.label,
            "images": h.images_counted,
            "pixels": h.pixels_counted,
            "mean_pixel": h.mean_pixel,
            "mass_above_128": h.mass_above(128),
        }
        for h in histograms
    )
    csv_path = None
    plot_paths: tuple[Path, ...] = ()
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = write_histogram_csv(histograms, out_dir / "histogram.csv")
        if plots:
            from .plots import save_pixel_histograms

            plot_paths = tuple(save_pixel_histograms(histograms, out_dir))
    return HistogramSummary(rows=rows, csv_path=csv_path, plot_paths=plot_paths)
