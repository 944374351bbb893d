"""Training loop: Adam, stepped learning-rate decay, early stopping on
validation loss, model selection by best validation accuracy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import torch

from .cten import TensorRecord
from .errors import ShapeError, SplitError
from .model import ConnectivityCnn, ModelSpec, build_model


@dataclass(frozen=True)
class TrainSpec:
    lr0: float = 1e-4
    decay: float = 0.8
    decay_every: int = 10
    patience: int = 40
    max_epochs: int = 500
    batch_size: int = 32
    split: tuple[float, float, float] = (0.8, 0.1, 0.1)

    def __post_init__(self):
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise SplitError(f"split fractions must sum to 1: {self.split}")


@dataclass
class Checkpoint:
    state_dict: dict
    model_spec: ModelSpec
    band_mean: np.ndarray
    band_std: np.ndarray
    best_epoch: int
    best_val_acc: float


def learning_rate(epoch: int, spec: TrainSpec) -> float:
    """lr0 scaled by decay^(epoch // decay_every).

    Computed with exact rational arithmetic so decimal-friendly schedules
    stay decimal (1e-4 with decay 0.8 gives exactly 8e-5, 6.4e-5, ...)
    instead of accumulating binary rounding error.
    """
    k = epoch // spec.decay_every
    return float(Fraction(str(spec.lr0)) * Fraction(str(spec.decay)) ** k)


def early_stop_epoch(val_losses: Sequence[float],
                     patience: int) -> Optional[int]:
    """Epoch index at which training halts, or None if it never does.

    Training stops at the first epoch that is ``patience`` epochs past
    the last strict improvement of the validation loss.
    """
    best = float("inf")
    best_epoch = -1
    for epoch, loss in enumerate(val_losses):
        if loss < best:
            best = loss
            best_epoch = epoch
        elif epoch - best_epoch >= patience:
            return epoch
    return None


def stratified_split(labels: Sequence[int], split: tuple[float, float, float],
                     seed: int):
    """Per-class shuffled (train, val, test) index lists."""
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, val, test = [], [], []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        n = len(idx)
        n_tr = int(round(split[0] * n))
        n_va = int(round(split[1] * n))
        if n_tr < 1:
            raise SplitError(f"class {cls} has no training examples "
                             f"({n} total)")
        train += idx[:n_tr].tolist()
        val += idx[n_tr:n_tr + n_va].tolist()
        test += idx[n_tr + n_va:].tolist()
    return sorted(train), sorted(val), sorted(test)


def to_batch(records: Sequence[TensorRecord]) -> torch.Tensor:
    """Stack (n, n, bands) tensors into a channels-first float batch."""
    arr = np.stack([r.data for r in records])
    return torch.from_numpy(arr).permute(0, 3, 1, 2).float()


def band_stats(batch: torch.Tensor) -> tuple[np.ndarray, np.ndarray]:
    """Per-band mean and std over a channels-first batch."""
    mean = batch.mean(dim=(0, 2, 3)).numpy()
    std = batch.std(dim=(0, 2, 3)).numpy()
    std = np.where(std < 1e-8, 1.0, std)
    return mean, std


def normalize(batch: torch.Tensor, mean: np.ndarray,
              std: np.ndarray) -> torch.Tensor:
    m = torch.from_numpy(mean).float().view(1, -1, 1, 1)
    s = torch.from_numpy(std).float().view(1, -1, 1, 1)
    return (batch - m) / s


def _evaluate(model: ConnectivityCnn, x: torch.Tensor, y: torch.Tensor,
              batch_size: int):
    model.eval()
    loss_sum, correct = 0.0, 0
    with torch.no_grad():
        for i in range(0, len(x), batch_size):
            xb, yb = x[i:i + batch_size], y[i:i + batch_size]
            logits = model.logits(xb)
            loss_sum += torch.nn.functional.cross_entropy(
                logits, yb, reduction="sum").item()
            correct += (logits.argmax(dim=1) == yb).sum().item()
    return loss_sum / len(x), correct / len(x)


def train(records: Sequence[TensorRecord], model_spec: ModelSpec,
          spec: TrainSpec, seed: int = 0):
    """Train on tensors labelled by their video id.

    Returns (checkpoint, log) where log is a list of per-epoch dicts with
    the learning rate, losses and accuracies.
    """
    labels = [r.video for r in records]
    tr_idx, va_idx, _ = stratified_split(labels, spec.split, seed)
    if not va_idx:
        raise SplitError("validation split is empty")

    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True)
    model = build_model(model_spec)

    x_all = to_batch(records)
    if x_all.shape[1] != model_spec.n_bands:
        raise ShapeError(f"tensors have {x_all.shape[1]} bands, model "
                         f"expects {model_spec.n_bands}")
    y_all = torch.tensor(labels, dtype=torch.long)
    mean, std = band_stats(x_all[tr_idx])
    x_all = normalize(x_all, mean, std)
    x_tr, y_tr = x_all[tr_idx], y_all[tr_idx]
    x_va, y_va = x_all[va_idx], y_all[va_idx]

    opt = torch.optim.Adam(model.parameters(), lr=spec.lr0)
    shuffler = torch.Generator().manual_seed(seed)
    log = []
    val_losses = []
    best_acc, best_state, best_epoch = -1.0, None, -1

    for epoch in range(spec.max_epochs):
        lr = learning_rate(epoch, spec)
        for group in opt.param_groups:
            group["lr"] = lr

        model.train()
        perm = torch.randperm(len(x_tr), generator=shuffler)
        loss_sum, correct = 0.0, 0
        for i in range(0, len(perm), spec.batch_size):
            sel = perm[i:i + spec.batch_size]
            xb, yb = x_tr[sel], y_tr[sel]
            opt.zero_grad()
            logits = model.logits(xb)
            loss = torch.nn.functional.cross_entropy(logits, yb)
            loss.backward()
            opt.step()
            loss_sum += loss.item() * len(sel)
            correct += (logits.argmax(dim=1) == yb).sum().item()

        val_loss, val_acc = _evaluate(model, x_va, y_va, spec.batch_size)
        val_losses.append(val_loss)
        log.append({"epoch": epoch, "lr": lr,
                    "train_loss": loss_sum / len(x_tr),
                    "train_acc": correct / len(x_tr),
                    "val_loss": val_loss, "val_acc": val_acc})
        if val_acc > best_acc:
            best_acc = val_acc
            best_epoch = epoch
            best_state = {k: v.detach().clone()
                          for k, v in model.state_dict().items()}
        if early_stop_epoch(val_losses, spec.patience) is not None:
            break

    checkpoint = Checkpoint(state_dict=best_state, model_spec=model_spec,
                            band_mean=mean, band_std=std,
                            best_epoch=best_epoch, best_val_acc=best_acc)
    return checkpoint, log


def save_log(log, path) -> None:
    with open(path, "w") as f:
        for entry in log:
            f.write(json.dumps(entry) + "\n")


def save_checkpoint(checkpoint: Checkpoint, path) -> None:
    torch.save({
        "state_dict": checkpoint.state_dict,
        "kernel_size": checkpoint.model_spec.kernel_size,
        "n_bands": checkpoint.model_spec.n_bands,
        "band_mean": checkpoint.band_mean,
        "band_std": checkpoint.band_std,
        "best_epoch": checkpoint.best_epoch,
        "best_val_acc": checkpoint.best_val_acc,
    }, path)


def load_checkpoint(path) -> Checkpoint:
    blob = torch.load(path, weights_only=False)
    return Checkpoint(
        state_dict=blob["state_dict"],
        model_spec=ModelSpec(kernel_size=blob["kernel_size"],
                             n_bands=blob["n_bands"]),
        band_mean=blob["band_mean"], band_std=blob["band_std"],
        best_epoch=blob["best_epoch"], best_val_acc=blob["best_val_acc"])
