"""Inference and prediction-file emission.

The output CSV (`instance_id,true,predicted`) is the interface consumed
by the connectivity toolkit's statistics commands.
"""

from __future__ import annotations

from typing import Sequence

import torch

from .cten import TensorRecord
from .errors import ShapeError
from .model import build_model
from .train import Checkpoint, normalize, to_batch


def predict(checkpoint: Checkpoint,
            records: Sequence[TensorRecord]) -> list[tuple[int, int, int]]:
    """Rows of (instance_id, true_label, predicted_label).

    Instance ids are the record positions in the tensor file; the true
    label is the record's video id.
    """
    model = build_model(checkpoint.model_spec)
    model.load_state_dict(checkpoint.state_dict)
    model.eval()
    x = to_batch(records)
    if x.shape[1] != checkpoint.model_spec.n_bands:
        raise ShapeError(f"tensors have {x.shape[1]} bands, checkpoint "
                         f"expects {checkpoint.model_spec.n_bands}")
    x = normalize(x, checkpoint.band_mean, checkpoint.band_std)
    with torch.no_grad():
        pred = model(x).argmax(dim=1)
    return [(i, r.video, int(p))
            for i, (r, p) in enumerate(zip(records, pred))]


def write_predictions(rows, path) -> None:
    with open(path, "w") as f:
        f.write("instance_id,true,predicted\n")
        for instance_id, true_label, predicted in rows:
            f.write(f"{instance_id},{true_label},{predicted}\n")
