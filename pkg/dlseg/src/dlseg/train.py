"""Training loop: weighted cross-entropy, adaptive optimizer, early stopping.

The loss applies log-softmax to the class scores and feeds the negative
log-likelihood criterion, weighted per class to counter the background's
dominance. Validation loss drives early stopping: once it fails to improve
for more than ``early_stopping_patience`` consecutive epochs, training ends.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn.functional as F

from .errors import TrainingError


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    weight_decay: float = 1e-4
    batch_size: int = 4
    max_epochs: int = 200
    early_stopping_patience: int = 20
    class_weights: tuple[float, ...] | None = None
    seed: int = 0

    def __post_init__(self):
        if min(self.learning_rate, self.weight_decay) < 0:
            raise ValueError("rates must be non-negative")
        if self.batch_size < 1 or self.max_epochs < 1:
            raise ValueError("batch_size and max_epochs must be >= 1")
        if self.early_stopping_patience < 0:
            raise ValueError("patience must be >= 0")


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float


@dataclass(frozen=True)
class History:
    epochs: tuple[EpochStats, ...]
    stopped_early: bool
    best_val_loss: float
    seconds: float

    def as_rows(self) -> list[list]:
        return [[e.epoch, e.train_loss, e.val_loss] for e in self.epochs]


def weighted_loss(
    logits: torch.Tensor,
    target: torch.Tensor,
    class_weights: torch.Tensor | None = None,
) -> torch.Tensor:
    """Log-softmax followed by class-weighted negative log-likelihood."""
    return F.nll_loss(F.log_softmax(logits, dim=1), target, weight=class_weights)


def _to_tensor(images: np.ndarray, masks: np.ndarray) -> tuple[torch.Tensor, torch.Tensor]:
    return (
        torch.as_tensor(np.ascontiguousarray(images), dtype=torch.float32),
        torch.as_tensor(np.ascontiguousarray(masks), dtype=torch.long),
    )


def train(
    model: torch.nn.Module,
    train_images: np.ndarray,
    train_masks: np.ndarray,
    cfg: TrainConfig,
    val_images: np.ndarray | None = None,
    val_masks: np.ndarray | None = None,
) -> History:
    """Fit the model; returns the per-epoch loss history.

    Without a validation split the training set doubles as one (the overfit
    use case). Deterministic for a fixed seed on CPU: the only stochastic
    inputs are the parameter init and the shuffle order, both drawn from the
    seeded torch generator.
    """
    if len(train_images) == 0:
        raise TrainingError("empty training set")
    torch.manual_seed(cfg.seed)
    x, y = _to_tensor(train_images, train_masks)
    if val_images is None:
        vx, vy = x, y
    else:
        vx, vy = _to_tensor(val_images, val_masks)

    weights = None
    if cfg.class_weights is not None:
        weights = torch.as_tensor(cfg.class_weights, dtype=torch.float32)

    optimizer = torch.optim.Adam(
        model.parameters(), lr=cfg.learning_rate, weight_decay=cfg.weight_decay
    )
    generator = torch.Generator().manual_seed(cfg.seed)

    stats: list[EpochStats] = []
    best_val = math.inf
    bad_epochs = 0
    stopped_early = False
    t0 = time.monotonic()
    for epoch in range(1, cfg.max_epochs + 1):
        model.train()
        order = torch.randperm(len(x), generator=generator)
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            optimizer.zero_grad()
            loss = weighted_loss(model(x[idx]), y[idx], weights)
            if not torch.isfinite(loss):
                raise TrainingError(f"loss diverged at epoch {epoch}")
            loss.backward()
            optimizer.step()
            epoch_losses.append(float(loss.detach()))

        model.eval()
        with torch.no_grad():
            val_loss = float(weighted_loss(model(vx), vy, weights))
        if not math.isfinite(val_loss):
            raise TrainingError(f"validation loss diverged at epoch {epoch}")
        stats.append(EpochStats(epoch=epoch,
                                train_loss=float(np.mean(epoch_losses)),
                                val_loss=val_loss))
        if val_loss < best_val:
            best_val = val_loss
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs > cfg.early_stopping_patience:
                stopped_early = True
                break

    return History(
        epochs=tuple(stats),
        stopped_early=stopped_early,
        best_val_loss=best_val,
        seconds=time.monotonic() - t0,
    )


def mean_iou(pred: np.ndarray, truth: np.ndarray, classes: int = 4) -> float:
    """Macro-averaged IoU over the classes present in either array."""
    ious = []
    for k in range(classes):
        p = pred == k
        t = truth == k
        union = np.logical_or(p, t).sum()
        if union == 0:
            continue
        ious.append(np.logical_and(p, t).sum() / union)
    return float(np.mean(ious))


def predict_labels(model: torch.nn.Module, images: np.ndarray) -> np.ndarray:
    """Argmax class per pixel for a batch of normalized images."""
    model.eval()
    with torch.no_grad():
        logits = model(torch.as_tensor(images, dtype=torch.float32))
    return logits.argmax(dim=1).numpy().astype(np.uint8)
