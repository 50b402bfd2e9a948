"""Training configuration and the augmentation pipelines it implies.

Defaults follow the published recipe: batch 32, 5 epochs, Adam at 1e-3,
cross-entropy loss, ImageNet normalization. Augmentation magnitudes the
recipe leaves open (color jitter, rotation) default to mild values and
are config-exposed.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

from torchvision import transforms

VARIANTS = ("resnet18", "resnet50")
STRATEGIES = ("feature-extract", "fine-tune")
OPTIMIZERS = ("adam", "adamw", "sgd")

IMAGENET_MEAN = [0.485, 0.456, 0.406]
IMAGENET_STD = [0.229, 0.224, 0.225]

# transform types that draw randomness; the eval path must contain none of these
STOCHASTIC_OPS = (
    transforms.RandomResizedCrop,
    transforms.RandomHorizontalFlip,
    transforms.ColorJitter,
    transforms.RandomRotation,
)


@dataclass(frozen=True)
class TrainConfig:
    variant: str = "resnet18"
    strategy: str = "fine-tune"
    batch_size: int = 32
    epochs: int = 5
    learning_rate: float = 0.001
    optimizer: str = "adam"
    loss: str = "cross-entropy"
    seed: int = 0
    val_fraction: float = 0.2
    pretrained: bool = True
    image_size: int = 224
    color_jitter: float = 0.2
    rotation_degrees: float = 15.0
    num_workers: int = 0
    model_id: str | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.loss != "cross-entropy":
            raise ValueError("only cross-entropy loss is supported")
        if not 0.0 <= self.val_fraction < 1.0:
            raise ValueError("val_fraction must be in [0, 1)")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")

    @property
    def resolved_model_id(self) -> str:
        if self.model_id:
            return self.model_id
        tag = "fe" if self.strategy == "feature-extract" else "ft"
        return f"{self.variant}-{tag}"

    def to_json(self) -> dict:
        return asdict(self)


def load_config(path: str | Path) -> TrainConfig:
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    known = TrainConfig.__dataclass_fields__
    unknown = set(doc) - set(known)
    if unknown:
        raise ValueError(f"{path}: unknown config fields {sorted(unknown)}")
    return TrainConfig(**doc)


def train_transforms(config: TrainConfig) -> transforms.Compose:
    return transforms.Compose([
        transforms.RandomResizedCrop(config.image_size),
        transforms.RandomHorizontalFlip(),
        transforms.ColorJitter(
            brightness=config.color_jitter,
            contrast=config.color_jitter,
            saturation=config.color_jitter,
        ),
        transforms.RandomRotation(config.rotation_degrees),
        transforms.ToTensor(),
        transforms.Normalize(IMAGENET_MEAN, IMAGENET_STD),
    ])


def eval_transforms(config: TrainConfig) -> transforms.Compose:
    return transforms.Compose([
        transforms.Resize(config.image_size + config.image_size // 8),
        transforms.CenterCrop(config.image_size),
        transforms.ToTensor(),
        transforms.Normalize(IMAGENET_MEAN, IMAGENET_STD),
    ])
