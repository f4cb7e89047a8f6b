"""Training loop: Adam with BCE loss, fixed validation split, early
stopping on validation F1."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .data import ScenarioBatch, normalization_stats
from .model import CgcaAl


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    weight_decay: float = 1e-4
    batch_size: int = 128
    max_epochs: int = 300
    patience: int = 20
    val_fraction: float = 0.15
    seed: int = 0
    threshold: float = 0.5


@dataclass
class TrainResult:
    epochs_run: int
    best_epoch: int
    best_val_f1: float
    history: list[dict]


def f1_score(pred: torch.Tensor, true: torch.Tensor) -> float:
    tp = float(((pred == 1) & (true == 1)).sum())
    fp = float(((pred == 1) & (true == 0)).sum())
    fn = float(((pred == 0) & (true == 1)).sum())
    denom = 2 * tp + fp + fn
    return 1.0 if denom == 0 else 2 * tp / denom


def _split(batch: ScenarioBatch, val_fraction: float,
           generator: torch.Generator) -> tuple[ScenarioBatch, ScenarioBatch]:
    n = batch.features.shape[0]
    perm = torch.randperm(n, generator=generator)
    n_val = max(1, int(round(n * val_fraction)))
    val_idx, train_idx = perm[:n_val], perm[n_val:]

    def take(idx):
        return ScenarioBatch(batch.features[idx], batch.labels[idx],
                             batch.n_attacked[idx])
    return take(train_idx), take(val_idx)


def train(model: CgcaAl, data: ScenarioBatch,
          config: TrainConfig = TrainConfig()) -> TrainResult:
    torch.manual_seed(config.seed)
    generator = torch.Generator().manual_seed(config.seed)
    mean, std = normalization_stats(data)
    model.set_normalization(mean, std)
    train_set, val_set = _split(data, config.val_fraction, generator)

    optimizer = torch.optim.Adam(model.parameters(),
                                 lr=config.learning_rate,
                                 weight_decay=config.weight_decay)
    loss_fn = nn.BCELoss()

    best_f1 = -1.0
    best_epoch = 0
    best_state = None
    history = []
    n = train_set.features.shape[0]
    for epoch in range(1, config.max_epochs + 1):
        model.train()
        perm = torch.randperm(n, generator=generator)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            idx = perm[start:start + config.batch_size]
            optimizer.zero_grad()
            y = model(train_set.features[idx])
            loss = loss_fn(y, train_set.labels[idx])
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * len(idx)
        epoch_loss /= n

        model.eval()
        with torch.no_grad():
            y_val = model(val_set.features)
            val_loss = float(loss_fn(y_val, val_set.labels))
            val_f1 = f1_score((y_val >= config.threshold).int(),
                              val_set.labels.int())
        history.append({"epoch": epoch, "train_loss": epoch_loss,
                        "val_loss": val_loss, "val_f1": val_f1})
        if val_f1 > best_f1:
            best_f1, best_epoch = val_f1, epoch
            best_state = {k: v.detach().clone()
                          for k, v in model.state_dict().items()}
        elif epoch - best_epoch >= config.patience:
            break

    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return TrainResult(epochs_run=len(history), best_epoch=best_epoch,
                       best_val_f1=best_f1, history=history)


def evaluate_f1(model: CgcaAl, batch: ScenarioBatch,
                threshold: float = 0.5) -> float:
    model.eval()
    with torch.no_grad():
        y = model(batch.features)
    return f1_score((y >= threshold).int(), batch.labels.int())


def predict(model: CgcaAl, features: torch.Tensor) -> np.ndarray:
    model.eval()
    with torch.no_grad():
        y = model(features)
    return y.clamp(0.0, 1.0).numpy()
