"""Classification metrics for attack localization and the normalized
estimation error for line state identification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class ClassificationMetrics:
    tp: int
    fp: int
    tn: int
    fn: int
    accuracy: float
    far: float
    mdr: float
    f1: float


def classification_metrics(pred, true) -> ClassificationMetrics:
    """Accuracy, false alarm rate FP/(FP+TN), missed detection rate
    FN/(TP+FN) and F1 = 2TP/(2TP+FP+FN) over binary label vectors.

    FAR is reported 0 when there are no negatives, MDR 0 when there are
    no positives.
    """
    pred = np.asarray(pred)
    true = np.asarray(true)
    if pred.shape != true.shape:
        raise MetricsError(f"length mismatch: {pred.shape} vs {true.shape}")
    for v in (pred, true):
        if not np.all((v == 0) | (v == 1)):
            raise MetricsError("labels must be binary")
    tp = int(np.sum((pred == 1) & (true == 1)))
    fp = int(np.sum((pred == 1) & (true == 0)))
    tn = int(np.sum((pred == 0) & (true == 0)))
    fn = int(np.sum((pred == 0) & (true == 1)))
    total = tp + fp + tn + fn
    return ClassificationMetrics(
        tp=tp, fp=fp, tn=tn, fn=fn,
        accuracy=(tp + tn) / total,
        far=fp / (fp + tn) if (fp + tn) else 0.0,
        mdr=fn / (tp + fn) if (tp + fn) else 0.0,
        f1=2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else 1.0,
    )


def normalized_error(x_hat: np.ndarray, x_true: np.ndarray) -> float:
    """||x_true - x_hat||_2 / ||x_true||_2.

    The denominator is the ground-truth norm: dividing by the estimate is
    ill-defined whenever the estimate is zero.
    """
    x_hat = np.asarray(x_hat, dtype=float)
    x_true = np.asarray(x_true, dtype=float)
    if x_hat.shape != x_true.shape:
        raise MetricsError("dimension mismatch")
    denom = float(np.linalg.norm(x_true))
    if denom == 0.0:
        raise MetricsError("ground truth is the zero vector")
    return float(np.linalg.norm(x_true - x_hat)) / denom


def labels_from_x(x: np.ndarray, threshold: float = 0.5) -> np.ndarray:
    """Binary labels from a continuous attack vector (cross-reporting only)."""
    return (np.asarray(x) >= threshold).astype(int)
