from __future__ import annotations

import numpy as np
import pytest

from freshtrain.pipeline import train
from toydata import CLASS_COLORS, fast_config, write_images


@pytest.fixture(scope="session")
def toy_root(tmp_path_factory):
    """Tiny class-folder dataset: 12 train / 6 test images across FR/HF/SP."""
    root = tmp_path_factory.mktemp("toy-dataset")
    rng = np.random.default_rng(99)
    for cls, color in CLASS_COLORS.items():
        write_images(root / "train" / cls, color, 4, rng)
        write_images(root / "test" / cls, color, 2, rng)
    return root


@pytest.fixture(scope="session")
def trained(toy_root, tmp_path_factory):
    """One smoke-trained fine-tune checkpoint shared across tests."""
    out_dir = tmp_path_factory.mktemp("weights-ft")
    config = fast_config()
    log = train(config, toy_root, out_dir)
    return config, out_dir, log
