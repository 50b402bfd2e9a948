from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from PIL import Image

from freshcost.dataset_eda import (
    class_balance,
    histogram_report,
    list_images,
    pixel_histogram,
    rgb_to_luma,
    scan_dataset,
    write_histogram_csv,
)

CLASSES = ["Fresh", "Half-Fresh", "Spoiled"]


def save_solid(path, rgb, size=(2, 2)):
    Image.new("RGB", size, rgb).save(path)


def make_tree(root, spec):
    """spec: {split: {class: [rgb colors]}}; one 2x2 image per color."""
    for split, classes in spec.items():
        for cls, colors in classes.items():
            d = root / split / cls
            d.mkdir(parents=True)
            for k, rgb in enumerate(colors):
                save_solid(d / f"img{k:03d}.png", rgb)


def luma_oracle(r, g, b):
    # same rounding rule, scalar arithmetic, no numpy
    return int(math.floor(0.299 * r + 0.587 * g + 0.114 * b + 0.5))


def test_all_black_image(tmp_path):
    save_solid(tmp_path / "black.png", (0, 0, 0))
    hist = pixel_histogram([tmp_path / "black.png"], "dark")
    assert hist.bins[0] == 4
    assert hist.bins[1:].sum() == 0
    assert hist.pixels_counted == 4


def test_all_white_image(tmp_path):
    save_solid(tmp_path / "white.png", (255, 255, 255))
    hist = pixel_histogram([tmp_path / "white.png"], "light")
    assert hist.bins[255] == 4
    assert hist.bins[:255].sum() == 0


def test_pure_red_and_blue_pixels(tmp_path):
    img = Image.new("RGB", (1, 2))
    img.putpixel((0, 0), (255, 0, 0))
    img.putpixel((0, 1), (0, 0, 255))
    img.save(tmp_path / "rb.png")
    hist = pixel_histogram([tmp_path / "rb.png"], "rb")
    assert luma_oracle(255, 0, 0) == 76
    assert luma_oracle(0, 0, 255) == 29
    assert hist.bins[76] == 1
    assert hist.bins[29] == 1
    assert hist.bins.sum() == 2


@given(
    r=st.integers(0, 255), g=st.integers(0, 255), b=st.integers(0, 255)
)
def test_luma_matches_scalar_oracle_and_stays_in_range(r, g, b):
    value = int(rgb_to_luma(np.array([[r, g, b]], dtype=np.uint8))[0])
    assert value == luma_oracle(r, g, b)
    assert 0 <= value <= 255


def test_grayscale_values_pass_through(tmp_path):
    img = Image.new("L", (1, 3))
    for y, v in enumerate((0, 128, 200)):
        img.putpixel((0, y), v)
    img.save(tmp_path / "gray.png")
    hist = pixel_histogram([tmp_path / "gray.png"], "gray")
    assert hist.bins[0] == hist.bins[128] == hist.bins[200] == 1


def test_histogram_conservation_on_random_images(tmp_path):
    rng = np.random.default_rng(21)
    paths = []
    total_pixels = 0
    for k in range(5):
        w, h = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        arr = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
        path = tmp_path / f"r{k}.png"
        Image.fromarray(arr, "RGB").save(path)
        paths.append(path)
        total_pixels += w * h
    hist = pixel_histogram(paths, "random")
    assert int(hist.bins.sum()) == hist.pixels_counted == total_pixels
    assert hist.images_counted == 5


def test_histogram_skips_corrupt_files_and_reports_them(tmp_path):
    save_solid(tmp_path / "ok.png", (10, 10, 10))
    (tmp_path / "broken.png").write_bytes(b"not an image at all")
    hist = pixel_histogram([tmp_path / "ok.png", tmp_path / "broken.png"], "mixed")
    assert hist.images_counted == 1
    assert len(hist.skipped) == 1
    assert "broken.png" in hist.skipped[0]


def test_histogram_with_no_decodable_images_raises(tmp_path):
    (tmp_path / "junk.png").write_bytes(b"junk")
    with pytest.raises(ValueError):
        pixel_histogram([tmp_path / "junk.png"], "empty")


def test_scan_counts_per_class(tmp_path):
    make_tree(
        tmp_path,
        {
            "train": {
                "Fresh": [(200, 60, 60)] * 2,
                "Half-Fresh": [(140, 60, 60)] * 3,
                "Spoiled": [(60, 30, 30)] * 4,
            }
        },
    )
    manifest = scan_dataset(tmp_path, CLASSES)
    assert manifest.counts["train"] == {"Fresh": 2, "Half-Fresh": 3, "Spoiled": 4}
    assert manifest.split_total("train") == 9
    assert manifest.split_total("test") == 0
    assert "test" in manifest.missing_class_dirs
    assert manifest.image_sizes == {"2x2": 9}


def test_scan_empty_class_folders(tmp_path):
    for cls in CLASSES:
        (tmp_path / "train" / cls).mkdir(parents=True)
        (tmp_path / "test" / cls).mkdir(parents=True)
    manifest = scan_dataset(tmp_path, CLASSES)
    assert manifest.total == 0
    assert manifest.missing_class_dirs == ()


def test_scan_missing_root_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        scan_dataset(tmp_path / "nope", CLASSES)


def test_scan_flags_unknown_folders_and_corrupt_files(tmp_path):
    make_tree(tmp_path, {"train": {"Fresh": [(200, 60, 60)]}})
    (tmp_path / "train" / "Extras").mkdir()
    (tmp_path / "train" / "Fresh" / "corrupt.jpg").write_bytes(b"nope")
    manifest = scan_dataset(tmp_path, CLASSES)
    assert "train/Extras" in manifest.unknown_dirs
    assert manifest.counts["train"]["Fresh"] == 1
    assert any("corrupt.jpg" in f for f in manifest.undecodable)


def test_scan_is_deterministic(tmp_path):
    make_tree(
        tmp_path,
        {"train": {"Fresh": [(200, 0, 0)] * 2, "Half-Fresh": [(10, 10, 10)]}},
    )
    assert scan_dataset(tmp_path, CLASSES) == scan_dataset(tmp_path, CLASSES)


def test_class_balance_fractions(tmp_path):
    make_tree(
        tmp_path,
        {
            "train": {
                "Fresh": [(200, 0, 0)] * 2,
                "Half-Fresh": [(100, 0, 0)] * 2,
                "Spoiled": [(50, 0, 0)] * 2,
            }
        },
    )
    manifest = scan_dataset(tmp_path, CLASSES)
    balance = class_balance(manifest)
    assert balance == {c: pytest.approx(1 / 3) for c in CLASSES}
    assert sum(balance.values()) == pytest.approx(1.0, abs=1e-9)


def test_class_balance_arbitrary_counts():
    # pure arithmetic check on a synthetic manifest
    from freshcost.dataset_eda import DatasetManifest

    manifest = DatasetManifest(
        root=".",
        splits=("train",),
        counts={"train": {"a": 600, "b": 600, "c": 616}},
        image_sizes={},
    )
    balance = class_balance(manifest, "train")
    assert balance["a"] == pytest.approx(600 / 1816)
    assert balance["c"] == pytest.approx(616 / 1816)
    single = DatasetManifest(
        root=".", splits=("train",), counts={"train": {"a": 1, "b": 0, "c": 0}},
        image_sizes={},
    )
    assert class_balance(single) == {"a": 1.0, "b": 0.0, "c": 0.0}


def test_class_balance_empty_manifest_raises(tmp_path):
    for cls in CLASSES:
        (tmp_path / "train" / cls).mkdir(parents=True)
    manifest = scan_dataset(tmp_path, CLASSES)
    with pytest.raises(ValueError):
        class_balance(manifest)


def test_histogram_report_orders_light_above_dark(tmp_path):
    make_tree(
        tmp_path,
        {
            "train": {
                "Fresh": [(230, 200, 200)] * 2,
                "Half-Fresh": [(150, 110, 110)] * 2,
                "Spoiled": [(60, 35, 35)] * 2,
            }
        },
    )
    hists = [
        pixel_histogram(list_images(tmp_path / "train" / cls), cls) for cls in CLASSES
    ]
    summary = histogram_report(hists, out_dir=tmp_path / "out")
    means = {r["class"]: r["mean_pixel"] for r in summary.rows}
    assert means["Fresh"] > means["Half-Fresh"] > means["Spoiled"]
    mass = {r["class"]: r["mass_above_128"] for r in summary.rows}
    assert mass["Fresh"] == 1.0
    assert mass["Spoiled"] == 0.0

    csv_lines = (tmp_path / "out" / "histogram.csv").read_text().splitlines()
    assert csv_lines[0] == "class,bin,count"
    assert len(csv_lines) == 1 + 256 * 3


def test_histogram_report_identical_inputs_identical_rows(tmp_path):
    save_solid(tmp_path / "a.png", (99, 99, 99))
    h1 = pixel_histogram([tmp_path / "a.png"], "one")
    h2 = pixel_histogram([tmp_path / "a.png"], "one")
    r1 = histogram_report([h1]).rows
    r2 = histogram_report([h2]).rows
    assert r1 == r2
    assert len(r1) == 1


def test_histogram_report_requires_input():
    with pytest.raises(ValueError):
        histogram_report([])


def test_histogram_report_renders_plots(tmp_path):
    save_solid(tmp_path / "a.png", (10, 200, 30))
    hist = pixel_histogram([tmp_path / "a.png"], "green")
    summary = histogram_report([hist], out_dir=tmp_path / "out", plots=True)
    assert summary.plot_paths == (tmp_path / "out" / "hist_green.png",)
    assert summary.plot_paths[0].stat().st_size > 0


def test_write_histogram_csv_round_trips_counts(tmp_path):
    save_solid(tmp_path / "a.png", (0, 0, 0))
    hist = pixel_histogram([tmp_path / "a.png"], "k")
    path = write_histogram_csv([hist], tmp_path / "h.csv")
    rows = [line.split(",") for line in path.read_text().splitlines()[1:]]
    total = sum(int(r[2]) for r in rows)
    assert total == hist.pixels_counted
