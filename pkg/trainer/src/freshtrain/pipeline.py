"""Model building, training, and prediction-file export.

The trainer talks to the evaluation toolkit only through the JSON-lines
prediction format (see the toolkit's docs/formats.md): a header object
with schema_version/classes/model_id, then one record per image with
softmax probabilities.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch
from torch import nn
from torch.utils.data import DataLoader, Subset
from torchvision import models
from torchvision.datasets import ImageFolder

from .config import TrainConfig, eval_transforms, train_transforms

PREDICTION_SCHEMA_VERSION = 1


def build_model(config: TrainConfig, num_classes: int) -> nn.Module:
    """A ResNet with its final layer reshaped to the class count.

    Feature extraction freezes every parameter except the new final
    layer; fine-tuning leaves everything trainable.
    """
    if config.variant == "resnet18":
        weights = models.ResNet18_Weights.DEFAULT if config.pretrained else None
        model = models.resnet18(weights=weights)
    else:
        weights = models.ResNet50_Weights.DEFAULT if config.pretrained else None
        model = models.resnet50(weights=weights)
    if config.strategy == "feature-extract":
        for param in model.parameters():
            param.requires_grad = False
    model.fc = nn.Linear(model.fc.in_features, num_classes)
    return model


def _make_optimizer(config: TrainConfig, model: nn.Module):
    params = [p for p in model.parameters() if p.requires_grad]
    if config.optimizer == "adam":
        return torch.optim.Adam(params, lr=config.learning_rate)
    if config.optimizer == "adamw":
        return torch.optim.AdamW(params, lr=config.learning_rate)
    return torch.optim.SGD(params, lr=config.learning_rate)


def _split_indices(n: int, val_fraction: float, seed: int) -> tuple[list[int], list[int]]:
    gen = torch.Generator().manual_seed(seed)
    order = torch.randperm(n, generator=gen).tolist()
    val_size = int(round(n * val_fraction))
    val_size = min(val_size, n - 1)  # never empty the training split
    return order[val_size:], order[:val_size]


def _epoch_pass(model, loader, criterion, optimizer=None):
    training = optimizer is not None
    model.train(training)
    total_loss, correct, seen = 0.0, 0, 0
    with torch.set_grad_enabled(training):
        for inputs, targets in loader:
            outputs = model(inputs)
            loss = criterion(outputs, targets)
            if training:
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            total_loss += loss.item() * targets.size(0)
            correct += int((outputs.argmax(dim=1) == targets).sum())
            seen += targets.size(0)
    return total_loss / seen, correct / seen


def train(config: TrainConfig, data_root: str | Path, out_dir: str | Path) -> dict:
    """Train per the config on ``data_root/train`` and save weights + log.

    Returns the training log. Deterministic for a given seed up to
    backend nondeterminism.
    """
    data_root = Path(data_root)
    train_dir = data_root / "train"
    if not train_dir.is_dir():
        raise ValueError(f"no train split under {data_root}")
    torch.manual_seed(config.seed)

    aug_dataset = ImageFolder(str(train_dir), transform=train_transforms(config))
    plain_dataset = ImageFolder(str(train_dir), transform=eval_transforms(config))
    classes = aug_dataset.classes
    if len(classes) < 2:
        raise ValueError(f"need at least 2 class folders under {train_dir}")
    if len(aug_dataset) == 0:
        raise ValueError(f"train split under {data_root} is empty")

    train_idx, val_idx = _split_indices(len(aug_dataset), config.val_fraction, config.seed)
    train_loader = DataLoader(
        Subset(aug_dataset, train_idx),
        batch_size=config.batch_size,
        shuffle=True,
        num_workers=config.num_workers,
        generator=torch.Generator().manual_seed(config.seed),
    )
    val_loader = (
        DataLoader(Subset(plain_dataset, val_idx), batch_size=config.batch_size,
                   num_workers=config.num_workers)
        if val_idx else None
    )

    model = build_model(config, len(classes))
    criterion = nn.CrossEntropyLoss()
    optimizer = _make_optimizer(config, model)

    log = {"model_id": config.resolved_model_id, "classes": classes,
           "config": config.to_json(), "epochs": []}
    for epoch in range(config.epochs):
        train_loss, train_acc = _epoch_pass(model, train_loader, criterion, optimizer)
        entry = {"epoch": epoch + 1, "train_loss": train_loss, "train_accuracy": train_acc}
        if val_loader is not None:
            val_loss, val_acc = _epoch_pass(model, val_loader, criterion)
            entry.update(val_loss=val_loss, val_accuracy=val_acc)
        log["epochs"].append(entry)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(
        {"state_dict": model.state_dict(), "classes": classes, "config": config.to_json()},
        out_dir / "weights.pt",
    )
    (out_dir / "training_log.json").write_text(json.dumps(log, indent=2) + "\n")
    return log


def load_checkpoint(weights_path: str | Path) -> tuple[nn.Module, list[str], TrainConfig]:
    checkpoint = torch.load(Path(weights_path), map_location="cpu", weights_only=True)
    config = TrainConfig(**checkpoint["config"])
    classes = list(checkpoint["classes"])
    model = build_model(
        TrainConfig(**{**checkpoint["config"], "pretrained": False}), len(classes)
    )
    model.load_state_dict(checkpoint["state_dict"])
    model.eval()
    return model, classes, config


def predict(weights_path: str | Path, data_root: str | Path, out_path: str | Path) -> int:
    """Run the saved model over a class-folder split and write a prediction file.

    One JSON line per image: item_id (path relative to the split root),
    the folder label as ``actual``, the argmax label as ``predicted``,
    and the full softmax vector as ``probs``. Returns the record count.
    """
    model, classes, config = load_checkpoint(weights_path)
    data_root = Path(data_root)
    dataset = ImageFolder(str(data_root), transform=eval_transforms(config),
                          allow_empty=True)
    if dataset.classes != classes:
        raise ValueError(
            f"class folders {dataset.classes} under {data_root} do not match "
            f"the checkpoint classes {classes}"
        )
    loader = DataLoader(dataset, batch_size=config.batch_size,
                        num_workers=config.num_workers)
    model_id = config.resolved_model_id

    out_path = Path(out_path)
    written = 0
    with out_path.open("w") as fh:
        header = {"schema_version": PREDICTION_SCHEMA_VERSION,
                  "classes": classes, "model_id": model_id}
        fh.write(json.dumps(header) + "\n")
        with torch.no_grad():
            for batch, (inputs, targets) in enumerate(loader):
                probs = torch.softmax(model(inputs), dim=1)
                predicted = probs.argmax(dim=1)
                for row in range(targets.size(0)):
                    index = batch * config.batch_size + row
                    path, _ = dataset.samples[index]
                    record = {
                        "item_id": str(Path(path).relative_to(data_root)),
                        "actual": classes[int(targets[row])],
                        "predicted": classes[int(predicted[row])],
                        "probs": [float(p) for p in probs[row]],
                    }
                    fh.write(json.dumps(record) + "\n")
                    written += 1
    return written
