"""ResNet transfer-learning trainer for freshness classification."""

from .config import TrainConfig, eval_transforms, load_config, train_transforms
from .pipeline import build_model, load_checkpoint, predict, train

__version__ = "0.1.0"
